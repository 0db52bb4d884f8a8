use serde::{Deserialize, Serialize};

use super::element::{Element, ElementTable};
use super::MolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: Element,
    pub formal_charge: i8,
    /// Attached hydrogens. Implicit hydrogens are resolved into this count
    /// when a graph is parsed or decoded.
    pub explicit_h: u8,
    pub aromatic: bool,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            formal_charge: 0,
            explicit_h: 0,
            aromatic: false,
        }
    }

    pub fn with_charge(mut self, charge: i8) -> Self {
        self.formal_charge = charge;
        self
    }

    pub fn with_h(mut self, h: u8) -> Self {
        self.explicit_h = h;
        self
    }

    pub fn aromatic(mut self) -> Self {
        self.aromatic = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn from_order(order: u8) -> Option<BondOrder> {
        match order {
            1 => Some(BondOrder::Single),
            2 => Some(BondOrder::Double),
            3 => Some(BondOrder::Triple),
            _ => None,
        }
    }

    /// Integer order for localized bonds; aromatic bonds report 1 (their
    /// sigma part) and get the pi part from kekulization.
    pub fn sigma_order(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    /// Small stable code used by canonical ranking and fingerprint hashing.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// A simple molecular graph with optional 3D coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    coordinates: Option<Vec<[f64; 3]>>,
}

impl MolecularGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn coordinates(&self) -> Option<&[[f64; 3]]> {
        self.coordinates.as_deref()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub(crate) fn atom_mut(&mut self, i: usize) -> &mut Atom {
        &mut self.atoms[i]
    }

    pub fn add_atom(&mut self, atom: Atom) -> Result<usize, MolError> {
        if !(-4..=4).contains(&atom.formal_charge) {
            return Err(MolError::ChargeOutOfRange(atom.formal_charge));
        }
        if self.coordinates.is_some() {
            return Err(MolError::CoordinateCount {
                atoms: self.atoms.len() + 1,
                coordinates: self.atoms.len(),
            });
        }
        self.atoms.push(atom);
        Ok(self.atoms.len() - 1)
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<(), MolError> {
        let n = self.atoms.len();
        if a >= n || b >= n {
            return Err(MolError::InvalidAtomIndex(a.max(b)));
        }
        if a == b {
            return Err(MolError::SelfBond(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(MolError::DuplicateBond(a, b));
        }
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }

    pub(crate) fn set_bond_order(&mut self, bond: usize, order: BondOrder) {
        self.bonds[bond].order = order;
    }

    pub fn set_coordinates(&mut self, coords: Vec<[f64; 3]>) -> Result<(), MolError> {
        if coords.len() != self.atoms.len() {
            return Err(MolError::CoordinateCount {
                atoms: self.atoms.len(),
                coordinates: coords.len(),
            });
        }
        self.coordinates = Some(coords);
        Ok(())
    }

    pub fn clear_coordinates(&mut self) {
        self.coordinates = None;
    }

    /// Index into `bonds()` of the bond joining `a` and `b`.
    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.bonds
            .iter()
            .position(|bd| (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
    }

    /// Per-atom list of (neighbor, bond order), in bond insertion order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, BondOrder)>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for bd in &self.bonds {
            adj[bd.a].push((bd.b, bd.order));
            adj[bd.b].push((bd.a, bd.order));
        }
        adj
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.bonds
            .iter()
            .filter(|bd| bd.a == atom || bd.b == atom)
            .count()
    }

    /// Heavy-atom counts by element symbol plus total hydrogens, in Hill order
    /// (C, H, then alphabetical).
    pub fn formula(&self) -> String {
        use std::collections::BTreeMap;
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut h = 0usize;
        for a in &self.atoms {
            *counts.entry(a.element.symbol()).or_default() += 1;
            h += a.explicit_h as usize;
        }
        let mut out = String::new();
        let mut push = |sym: &str, n: usize| {
            if n > 0 {
                out.push_str(sym);
                if n > 1 {
                    out.push_str(&n.to_string());
                }
            }
        };
        let c = counts.remove("C").unwrap_or(0);
        push("C", c);
        push("H", h);
        for (sym, n) in counts {
            push(sym, n);
        }
        out
    }

    /// Connected components as sorted atom-index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                for &(nb, _) in &adj[comp[i]] {
                    if !seen[nb] {
                        seen[nb] = true;
                        comp.push(nb);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Returns a copy with atoms reordered so that new atom `i` is old atom
    /// `order[i]`. Bonds and coordinates follow their atoms.
    pub fn permuted(&self, order: &[usize]) -> MolecularGraph {
        assert_eq!(order.len(), self.atoms.len(), "permutation length");
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        MolecularGraph {
            atoms: order.iter().map(|&i| self.atoms[i]).collect(),
            bonds: self
                .bonds
                .iter()
                .map(|bd| Bond {
                    a: inverse[bd.a],
                    b: inverse[bd.b],
                    order: bd.order,
                })
                .collect(),
            coordinates: self
                .coordinates
                .as_ref()
                .map(|c| order.iter().map(|&i| c[i]).collect()),
        }
    }

    /// Checks that every atom's element is present in `table`.
    pub fn check_elements(&self, table: &ElementTable) -> Result<(), MolError> {
        match self.atoms.iter().find(|a| !table.contains(a.element)) {
            Some(a) => Err(MolError::UnsupportedElement(a.element.symbol().to_string())),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ethanol() -> MolecularGraph {
        let mut g = MolecularGraph::new();
        let c1 = g.add_atom(Atom::new(Element::C).with_h(3)).unwrap();
        let c2 = g.add_atom(Atom::new(Element::C).with_h(2)).unwrap();
        let o = g.add_atom(Atom::new(Element::O).with_h(1)).unwrap();
        g.add_bond(c1, c2, BondOrder::Single).unwrap();
        g.add_bond(c2, o, BondOrder::Single).unwrap();
        g
    }

    #[test]
    fn rejects_bad_bonds() {
        let mut g = ethanol();
        assert_eq!(
            g.add_bond(0, 0, BondOrder::Single),
            Err(MolError::SelfBond(0))
        );
        assert_eq!(
            g.add_bond(1, 0, BondOrder::Double),
            Err(MolError::DuplicateBond(1, 0))
        );
        assert_eq!(
            g.add_bond(0, 7, BondOrder::Single),
            Err(MolError::InvalidAtomIndex(7))
        );
    }

    #[test]
    fn rejects_out_of_range_charge() {
        let mut g = MolecularGraph::new();
        assert!(g.add_atom(Atom::new(Element::C).with_charge(5)).is_err());
    }

    #[test]
    fn coordinates_must_match_atom_count() {
        let mut g = ethanol();
        assert!(g.set_coordinates(vec![[0.0; 3]; 2]).is_err());
        g.set_coordinates(vec![[0.0; 3]; 3]).unwrap();
        assert!(g.add_atom(Atom::new(Element::C)).is_err());
    }

    #[test]
    fn formula_is_hill_ordered() {
        assert_eq!(ethanol().formula(), "C2H6O");
    }

    #[test]
    fn permutation_moves_bonds() {
        let g = ethanol().permuted(&[2, 1, 0]);
        assert_eq!(g.atom(0).element, Element::O);
        assert!(g.bond_between(0, 1).is_some());
        assert!(g.bond_between(0, 2).is_none());
    }
}
