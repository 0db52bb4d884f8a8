//! Element symbols and the valence table used for hydrogen filling,
//! valence checking and SELFIES bonding capacities.

use std::fmt;

const SYMBOLS: [&str; 86] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn",
];

/// A chemical element, identified by atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const SI: Element = Element(14);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const SE: Element = Element(34);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (1..=SYMBOLS.len() as u8).contains(&z).then_some(Element(z))
    }

    /// Looks up a symbol with exact capitalisation ("Cl", not "CL").
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|i| Element(i as u8 + 1))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize - 1]
    }

    pub fn is_halogen(self) -> bool {
        matches!(self, Element::F | Element::CL | Element::BR | Element::I)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// How the allowed valences of an element shift with formal charge when no
/// explicit override is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeRule {
    /// Group 14: valence drops by |charge| (C+ and C- are both trivalent).
    Tetrel,
    /// Group 13: a negative charge adds a bond, a positive one removes it.
    Boron,
    /// Groups 15-17: lowest valence shifts by +charge (N+ = 4, O- = 1).
    Hetero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementSpec {
    pub element: Element,
    /// Allowed valences of the neutral atom, ascending.
    pub valences: Vec<u8>,
    /// Writable without brackets in SMILES and filled with implicit hydrogens.
    pub organic: bool,
    /// May carry a lowercase aromatic symbol.
    pub aromatic: bool,
    pub charge_rule: ChargeRule,
    /// Explicit valence sets for particular charges, overriding the rule.
    pub charged: Vec<(i8, Vec<u8>)>,
}

impl ElementSpec {
    pub fn new(element: Element, valences: &[u8], charge_rule: ChargeRule) -> Self {
        ElementSpec {
            element,
            valences: valences.to_vec(),
            organic: false,
            aromatic: false,
            charge_rule,
            charged: Vec::new(),
        }
    }

    fn organic(mut self) -> Self {
        self.organic = true;
        self
    }

    fn aromatic(mut self) -> Self {
        self.aromatic = true;
        self
    }

    fn with_charged(mut self, charge: i8, valences: &[u8]) -> Self {
        self.charged.push((charge, valences.to_vec()));
        self
    }

    /// Allowed valences for the given formal charge, ascending. Empty when the
    /// charge leaves no bonding capacity.
    pub fn valences_for(&self, charge: i8) -> Vec<u8> {
        if charge == 0 {
            return self.valences.clone();
        }
        if let Some((_, v)) = self.charged.iter().find(|(c, _)| *c == charge) {
            return v.clone();
        }
        let lowest = i16::from(self.valences[0]);
        let q = i16::from(charge);
        let v = match self.charge_rule {
            ChargeRule::Tetrel => lowest - q.abs(),
            ChargeRule::Boron => lowest - q,
            ChargeRule::Hetero => lowest + q,
        };
        if v > 0 {
            vec![v as u8]
        } else {
            Vec::new()
        }
    }
}

/// The set of elements the parsers, decoders and checkers accept.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementTable {
    specs: Vec<ElementSpec>,
}

impl ElementTable {
    /// Organic subset plus Se and Si. The ±1 overrides give the same maximum
    /// bonding capacity as the SELFIES default constraints.
    pub fn standard() -> Self {
        use ChargeRule::*;
        let specs = vec![
            ElementSpec::new(Element::B, &[3], Boron)
                .organic()
                .aromatic(),
            ElementSpec::new(Element::C, &[4], Tetrel)
                .organic()
                .aromatic(),
            ElementSpec::new(Element::N, &[3, 5], Hetero)
                .organic()
                .aromatic()
                .with_charged(1, &[4])
                .with_charged(-1, &[2]),
            ElementSpec::new(Element::O, &[2], Hetero)
                .organic()
                .aromatic(),
            ElementSpec::new(Element::F, &[1], Hetero).organic(),
            ElementSpec::new(Element::SI, &[4], Tetrel),
            ElementSpec::new(Element::P, &[3, 5], Hetero)
                .organic()
                .aromatic()
                .with_charged(1, &[4])
                .with_charged(-1, &[2, 4, 6]),
            ElementSpec::new(Element::S, &[2, 4, 6], Hetero)
                .organic()
                .aromatic()
                .with_charged(1, &[3, 5])
                .with_charged(-1, &[1, 3, 5]),
            ElementSpec::new(Element::CL, &[1], Hetero).organic(),
            ElementSpec::new(Element::SE, &[2, 4, 6], Hetero)
                .aromatic()
                .with_charged(1, &[3, 5])
                .with_charged(-1, &[1, 3, 5]),
            ElementSpec::new(Element::BR, &[1], Hetero).organic(),
            ElementSpec::new(Element::I, &[1], Hetero).organic(),
        ];
        ElementTable { specs }
    }

    /// Adds (or replaces) an element entry.
    pub fn with_element(mut self, spec: ElementSpec) -> Self {
        self.specs.retain(|s| s.element != spec.element);
        self.specs.push(spec);
        self
    }

    pub fn get(&self, element: Element) -> Option<&ElementSpec> {
        self.specs.iter().find(|s| s.element == element)
    }

    pub fn contains(&self, element: Element) -> bool {
        self.get(element).is_some()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.specs.iter().map(|s| s.element)
    }

    /// Allowed valences, or `None` for an element outside the table.
    pub fn valences(&self, element: Element, charge: i8) -> Option<Vec<u8>> {
        self.get(element).map(|s| s.valences_for(charge))
    }

    /// Largest allowed valence (the SELFIES bonding capacity before hydrogens).
    pub fn max_valence(&self, element: Element, charge: i8) -> Option<u8> {
        self.valences(element, charge)
            .map(|v| v.last().copied().unwrap_or(0))
    }

    pub fn is_organic(&self, element: Element) -> bool {
        self.get(element).is_some_and(|s| s.organic)
    }
}

impl Default for ElementTable {
    fn default() -> Self {
        ElementTable::standard()
    }
}
