//! SELFIES tokenization, decoding and encoding (v2 derivation rules).
//!
//! Decoding is total over the supported alphabet: bond orders are clipped by
//! the derivation state, so every token sequence yields a valence-valid graph.

use std::fmt;
use std::str::FromStr;

use super::element::{Element, ElementTable};
use super::graph::{Atom, BondOrder, MolecularGraph};
use super::valence::{implicit_hydrogens, kekulize_with, sigma_sum};
use super::MolError;

/// Tokens used as base-16 digits after Branch and Ring symbols.
pub const INDEX_ALPHABET: [&str; 16] = [
    "[C]",
    "[Ring1]",
    "[Ring2]",
    "[Branch1]",
    "[=Branch1]",
    "[#Branch1]",
    "[Branch2]",
    "[=Branch2]",
    "[#Branch2]",
    "[O]",
    "[N]",
    "[=N]",
    "[=C]",
    "[#C]",
    "[S]",
    "[P]",
];

const ORGANIC: [&str; 10] = ["B", "C", "N", "O", "S", "P", "F", "Cl", "Br", "I"];

/// A tokenized SELFIES string: a non-empty list of bracket groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelfiesString {
    tokens: Vec<String>,
}

impl SelfiesString {
    /// Builds from already split tokens; each must be a single bracket group.
    pub fn from_tokens<S: Into<String>>(
        tokens: impl IntoIterator<Item = S>,
    ) -> Result<Self, MolError> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let joined: String = tokens.concat();
        let parsed = parse_selfies(&joined)?;
        if parsed.tokens != tokens {
            return Err(MolError::UnbalancedBracket { position: 0 });
        }
        Ok(parsed)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for SelfiesString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            f.write_str(t)?;
        }
        Ok(())
    }
}

impl FromStr for SelfiesString {
    type Err = MolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_selfies(s)
    }
}

/// Splits text into bracket groups. Positions in errors are byte offsets.
pub fn parse_selfies(text: &str) -> Result<SelfiesString, MolError> {
    if text.is_empty() {
        return Err(MolError::EmptyInput);
    }
    let mut tokens = Vec::new();
    let mut open: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        match (ch, open) {
            ('[', None) => open = Some(i),
            ('[', Some(_)) => return Err(MolError::UnbalancedBracket { position: i }),
            (']', Some(start)) => {
                tokens.push(text[start..=i].to_string());
                open = None;
            }
            (']', None) => return Err(MolError::UnbalancedBracket { position: i }),
            (_, Some(_)) => {}
            (ch, None) => return Err(MolError::CharacterOutsideBracket { position: i, ch }),
        }
    }
    if let Some(start) = open {
        return Err(MolError::UnbalancedBracket { position: start });
    }
    Ok(SelfiesString { tokens })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symbol {
    Atom {
        bond: u8,
        element: Element,
        charge: i8,
        /// `None` for organic-subset symbols that receive implicit hydrogens.
        h: Option<u8>,
        capacity: u8,
    },
    Branch {
        bond: u8,
        digits: u8,
    },
    Ring {
        bond: u8,
        digits: u8,
    },
}

/// Bonding capacity before hydrogens: the SELFIES default constraint,
/// bounded by the largest valence the table allows.
pub fn bonding_capacity(table: &ElementTable, element: Element, charge: i8) -> Option<u8> {
    let ours = table.max_valence(element, charge)?;
    let default = match (element.symbol(), charge) {
        ("F" | "Cl" | "Br" | "I", 0) => Some(1),
        ("B", 0) => Some(3),
        ("B", 1) => Some(2),
        ("B", -1) => Some(4),
        ("O", 0) => Some(2),
        ("O", 1) => Some(3),
        ("O", -1) => Some(1),
        ("N", 0) => Some(3),
        ("N", 1) => Some(4),
        ("N", -1) => Some(2),
        ("C", 0) => Some(4),
        ("C", 1 | -1) => Some(3),
        ("P", 0) => Some(5),
        ("P", 1) => Some(4),
        ("P", -1) => Some(6),
        ("S", 0) => Some(6),
        ("S", 1 | -1) => Some(5),
        _ => None,
    };
    Some(default.map_or(ours, |d| d.min(ours)))
}

fn split_bond(body: &str) -> (u8, &str) {
    match body.as_bytes().first() {
        Some(b'=') => (2, &body[1..]),
        Some(b'#') => (3, &body[1..]),
        _ => (1, body),
    }
}

fn classify(table: &ElementTable, token: &str) -> Option<Symbol> {
    let body = token.strip_prefix('[')?.strip_suffix(']')?;
    let (bond, rest) = split_bond(body);
    for (name, branch) in [("Branch", true), ("Ring", false)] {
        if let Some(d) = rest.strip_prefix(name) {
            let digits = match d {
                "1" => 1,
                "2" => 2,
                "3" => 3,
                _ => return None,
            };
            return Some(if branch {
                Symbol::Branch { bond, digits }
            } else {
                Symbol::Ring { bond, digits }
            });
        }
    }
    classify_atom(table, bond, rest)
}

fn classify_atom(table: &ElementTable, bond: u8, rest: &str) -> Option<Symbol> {
    let b = rest.as_bytes();
    if b.is_empty() || !b[0].is_ascii_uppercase() {
        return None;
    }
    let mut end = 1;
    if b.len() > 1 && b[1].is_ascii_lowercase() {
        end = 2;
    }
    let element = Element::from_symbol(&rest[..end])?;
    let mut tail = &rest[end..];
    let plain = tail.is_empty() && ORGANIC.contains(&&rest[..end]);

    let mut h = None;
    if let Some(t) = tail.strip_prefix('H') {
        let d = *t.as_bytes().first()?;
        if !d.is_ascii_digit() {
            return None;
        }
        h = Some(d - b'0');
        tail = &t[1..];
    }
    let mut charge = 0i8;
    if let Some(sign) = tail.chars().next() {
        let digits = &tail[1..];
        if !matches!(sign, '+' | '-')
            || digits.is_empty()
            || digits.bytes().any(|c| !(b'1'..=b'9').contains(&c))
        {
            return None;
        }
        let q: i8 = digits.parse().ok()?;
        if q > 4 {
            return None;
        }
        charge = if sign == '+' { q } else { -q };
    }
    let cap = bonding_capacity(table, element, charge)?;
    let h = if plain { None } else { Some(h.unwrap_or(0)) };
    let capacity = cap.checked_sub(h.unwrap_or(0))?;
    Some(Symbol::Atom {
        bond,
        element,
        charge,
        h,
        capacity,
    })
}

fn index_digit(token: &str) -> usize {
    INDEX_ALPHABET.iter().position(|t| *t == token).unwrap_or(0)
}

struct DecodedAtom {
    element: Element,
    charge: i8,
    h: Option<u8>,
    capacity: u8,
}

struct Decoder<'a> {
    tokens: &'a [String],
    symbols: Vec<Symbol>,
    next: usize,
    atoms: Vec<DecodedAtom>,
    bonds: Vec<(usize, usize, u8)>,
    rings: Vec<(usize, usize, u8)>,
}

impl Decoder<'_> {
    fn advance(&mut self) -> Option<usize> {
        (self.next < self.symbols.len()).then(|| {
            self.next += 1;
            self.next - 1
        })
    }

    /// Reads `n` index tokens; missing tokens count as digit 0.
    fn read_index(&mut self, n: u8) -> usize {
        (0..n).fold(0, |q, _| {
            let d = self.advance().map_or(0, |k| index_digit(&self.tokens[k]));
            q * INDEX_ALPHABET.len() + d
        })
    }

    fn add_atom(&mut self, sym: Symbol) -> usize {
        let Symbol::Atom {
            element,
            charge,
            h,
            capacity,
            ..
        } = sym
        else {
            unreachable!("add_atom on a non-atom symbol")
        };
        self.atoms.push(DecodedAtom {
            element,
            charge,
            h,
            capacity,
        });
        self.atoms.len() - 1
    }

    /// One derivation over at most `max` tokens, starting from `state`
    /// (0 means no atom placed yet). Returns the number of tokens consumed.
    fn derive(&mut self, max: usize, init: u8, root: Option<usize>) -> usize {
        let mut n = 0;
        let mut state = init;
        let mut prev = root;
        while n < max {
            let Some(k) = self.advance() else { break };
            n += 1;
            let next_state = match self.symbols[k] {
                Symbol::Branch { bond, digits } => {
                    if state <= 1 {
                        Some(state)
                    } else {
                        let binit = (state - 1).min(bond);
                        let q = self.read_index(digits);
                        n += usize::from(digits) + self.derive(q + 1, binit, prev);
                        Some(state - binit)
                    }
                }
                Symbol::Ring { bond, digits } => {
                    if state == 0 {
                        Some(state)
                    } else {
                        let order = bond.min(state);
                        let q = self.read_index(digits);
                        n += usize::from(digits);
                        let right = prev.expect("ring after an atom");
                        self.rings.push((right.saturating_sub(q + 1), right, order));
                        (state > order).then_some(state - order)
                    }
                }
                sym @ Symbol::Atom { bond, capacity, .. } => {
                    let order = if state == 0 {
                        0
                    } else {
                        bond.min(state).min(capacity)
                    };
                    if order == 0 {
                        if state == 0 {
                            prev = Some(self.add_atom(sym));
                        }
                    } else {
                        let idx = self.add_atom(sym);
                        self.bonds.push((prev.expect("bond source"), idx, order));
                        prev = Some(idx);
                    }
                    (capacity > order).then_some(capacity - order)
                }
            };
            match next_state {
                Some(s) => state = s,
                None => break,
            }
        }
        while n < max && self.advance().is_some() {
            n += 1;
        }
        n
    }

    fn bond_count(&self, atom: usize) -> u8 {
        self.bonds
            .iter()
            .filter(|&&(a, b, _)| a == atom || b == atom)
            .map(|&(_, _, o)| o)
            .sum()
    }

    fn form_rings(&mut self) {
        for (l, r, order) in std::mem::take(&mut self.rings) {
            if l == r {
                continue;
            }
            let lfree = i16::from(self.atoms[l].capacity) - i16::from(self.bond_count(l));
            let rfree = i16::from(self.atoms[r].capacity) - i16::from(self.bond_count(r));
            if lfree <= 0 || rfree <= 0 {
                continue;
            }
            let order = i16::from(order).min(lfree).min(rfree) as u8;
            let existing = self
                .bonds
                .iter_mut()
                .find(|(a, b, _)| (*a == l && *b == r) || (*a == r && *b == l));
            match existing {
                Some(bond) => bond.2 = (bond.2 + order).min(3),
                None => self.bonds.push((l, r, order)),
            }
        }
    }
}

/// Decodes against `table`. Every token must belong to the supported
/// alphabet, including tokens that end up read as ring or branch indices.
pub fn decode_selfies_with(
    table: &ElementTable,
    s: &SelfiesString,
) -> Result<MolecularGraph, MolError> {
    let mut symbols = Vec::with_capacity(s.len());
    for (position, token) in s.tokens().iter().enumerate() {
        match classify(table, token) {
            Some(sym) => symbols.push(sym),
            None => {
                return Err(MolError::UnknownToken {
                    token: token.clone(),
                    position,
                })
            }
        }
    }
    let mut dec = Decoder {
        tokens: s.tokens(),
        symbols,
        next: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        rings: Vec::new(),
    };
    dec.derive(usize::MAX, 0, None);
    dec.form_rings();

    let mut g = MolecularGraph::new();
    for a in &dec.atoms {
        g.add_atom(
            Atom::new(a.element)
                .with_charge(a.charge)
                .with_h(a.h.unwrap_or(0)),
        )?;
    }
    for &(a, b, o) in &dec.bonds {
        g.add_bond(a, b, BondOrder::from_order(o).expect("order in 1..=3"))?;
    }
    for (i, a) in dec.atoms.iter().enumerate() {
        if a.h.is_none() {
            let h = implicit_hydrogens(table, &g, i);
            g.atom_mut(i).explicit_h = h;
        }
    }
    Ok(g)
}

pub fn decode_selfies(s: &SelfiesString) -> Result<MolecularGraph, MolError> {
    decode_selfies_with(&ElementTable::standard(), s)
}

/// Base-16 digits over the index alphabet, most significant first.
fn index_tokens(mut q: usize) -> Result<Vec<&'static str>, MolError> {
    let original = q;
    if q == 0 {
        return Ok(vec![INDEX_ALPHABET[0]]);
    }
    let mut out = Vec::new();
    while q > 0 {
        out.push(INDEX_ALPHABET[q % INDEX_ALPHABET.len()]);
        q /= INDEX_ALPHABET.len();
    }
    if out.len() > 3 {
        return Err(MolError::IndexOverflow(original));
    }
    out.reverse();
    Ok(out)
}

fn bond_prefix(order: u8) -> &'static str {
    match order {
        2 => "=",
        3 => "#",
        _ => "",
    }
}

fn atom_token(table: &ElementTable, g: &MolecularGraph, i: usize, bond: u8) -> String {
    let a = g.atom(i);
    let sym = a.element.symbol();
    let organic = ORGANIC.contains(&sym);
    let mut s = format!("[{}{sym}", bond_prefix(bond));
    if !(organic && a.formal_charge == 0 && a.explicit_h == implicit_hydrogens(table, g, i)) {
        if a.explicit_h > 0 || (organic && a.formal_charge == 0) {
            s.push_str(&format!("H{}", a.explicit_h));
        }
        if a.formal_charge != 0 {
            s.push_str(&format!("{:+}", a.formal_charge));
        }
    }
    s.push(']');
    s
}

struct Encoder<'a> {
    table: &'a ElementTable,
    graph: &'a MolecularGraph,
    adj: Vec<Vec<(usize, u8)>>,
    children: Vec<Vec<(usize, u8)>>,
    /// Ring bonds closed at each atom: (earlier atom, order).
    closures: Vec<Vec<(usize, u8)>>,
    pos: Vec<usize>,
}

impl Encoder<'_> {
    /// Depth-first tree; `pos` is the preorder that matches token order.
    fn build_tree(&mut self) {
        let n = self.adj.len();
        let mut visited = vec![false; n];
        let mut parent = vec![usize::MAX; n];
        let mut order = 0;
        let mut stack = vec![(0usize, 0usize)];
        visited[0] = true;
        self.pos[0] = 0;
        order += 1;
        while let Some(top) = stack.last_mut() {
            let (v, k) = *top;
            if k == self.adj[v].len() {
                stack.pop();
                continue;
            }
            top.1 += 1;
            let (w, o) = self.adj[v][k];
            if !visited[w] {
                visited[w] = true;
                parent[w] = v;
                self.pos[w] = order;
                order += 1;
                self.children[v].push((w, o));
                stack.push((w, 0));
            }
        }
        for b in self.graph.bonds() {
            if parent[b.a] == b.b || parent[b.b] == b.a {
                continue;
            }
            let (early, late) = if self.pos[b.a] < self.pos[b.b] {
                (b.a, b.b)
            } else {
                (b.b, b.a)
            };
            self.closures[late].push((early, b.order.sigma_order()));
        }
        for c in &mut self.closures {
            c.sort_by_key(|&(e, _)| std::cmp::Reverse(e));
        }
    }

    fn emit(&self, mut v: usize, mut bond: u8, out: &mut Vec<String>) -> Result<(), MolError> {
        loop {
            out.push(atom_token(self.table, self.graph, v, bond));
            for &(early, order) in &self.closures[v] {
                let digits = index_tokens(self.pos[v] - self.pos[early] - 1)?;
                out.push(format!("[{}Ring{}]", bond_prefix(order), digits.len()));
                out.extend(digits.iter().map(|d| d.to_string()));
            }
            let kids = &self.children[v];
            let Some((&(last, last_order), branches)) = kids.split_last() else {
                return Ok(());
            };
            for &(c, o) in branches {
                let mut sub = Vec::new();
                self.emit(c, o, &mut sub)?;
                let digits = index_tokens(sub.len() - 1)?;
                out.push(format!("[{}Branch{}]", bond_prefix(o), digits.len()));
                out.extend(digits.iter().map(|d| d.to_string()));
                out.extend(sub);
            }
            v = last;
            bond = last_order;
        }
    }
}

/// Encodes a connected graph. Aromatic bonds are kekulized first, so the
/// decoded graph is isomorphic to the kekulized input.
pub fn encode_selfies_with(
    table: &ElementTable,
    g: &MolecularGraph,
) -> Result<SelfiesString, MolError> {
    if g.is_empty() {
        return Err(MolError::EmptyInput);
    }
    g.check_elements(table)?;
    if g.components().len() > 1 {
        return Err(MolError::Disconnected);
    }
    let k = kekulize_with(table, g)?;
    for (i, a) in k.atoms().iter().enumerate() {
        let capacity = bonding_capacity(table, a.element, a.formal_charge).unwrap_or(0);
        let used = sigma_sum(&k, i) + u32::from(a.explicit_h);
        if used > u32::from(capacity) {
            return Err(MolError::SelfiesCapacity {
                atom: i,
                used,
                capacity,
            });
        }
    }
    let n = k.atom_count();
    let mut enc = Encoder {
        table,
        graph: &k,
        adj: k
            .adjacency()
            .into_iter()
            .map(|l| l.into_iter().map(|(j, b)| (j, b.sigma_order())).collect())
            .collect(),
        children: vec![Vec::new(); n],
        closures: vec![Vec::new(); n],
        pos: vec![0; n],
    };
    enc.build_tree();
    let mut tokens = Vec::new();
    enc.emit(0, 0, &mut tokens)?;
    Ok(SelfiesString { tokens })
}

pub fn encode_selfies(g: &MolecularGraph) -> Result<SelfiesString, MolError> {
    encode_selfies_with(&ElementTable::standard(), g)
}
