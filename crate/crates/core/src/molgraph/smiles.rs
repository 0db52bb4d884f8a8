//! Reader and writer for a stereo-free SMILES subset.
//!
//! Supported: organic-subset atoms (aromatic lowercase included), bracket
//! atoms with hydrogen count and charge, branches, ring closures (`1`-`9`
//! and `%nn`), bond symbols `- = # :` and `.` fragment separators.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::element::{Element, ElementTable};
use super::graph::{Atom, BondOrder, MolecularGraph};
use super::valence::implicit_hydrogens;
use super::MolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSym {
    Explicit(BondOrder),
    Implicit,
}

struct OpenRing {
    atom: usize,
    bond: BondSym,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    table: &'a ElementTable,
    graph: MolecularGraph,
    /// Atoms written without brackets; they get implicit hydrogens at the end.
    bare: Vec<bool>,
}

impl<'a> Parser<'a> {
    fn syntax(&self, pos: usize, message: impl Into<String>) -> MolError {
        MolError::SmilesSyntax {
            position: pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn resolve_bond(&self, sym: BondSym, a: usize, b: usize) -> BondOrder {
        match sym {
            BondSym::Explicit(order) => order,
            BondSym::Implicit => {
                if self.graph.atom(a).aromatic && self.graph.atom(b).aromatic {
                    BondOrder::Aromatic
                } else {
                    BondOrder::Single
                }
            }
        }
    }

    fn add_atom(&mut self, atom: Atom, bare: bool, pos: usize) -> Result<usize, MolError> {
        if !self.table.contains(atom.element) {
            return Err(MolError::UnsupportedElement(
                atom.element.symbol().to_string(),
            ));
        }
        let aromatic_ok = self.table.get(atom.element).is_some_and(|s| s.aromatic);
        if atom.aromatic && !aromatic_ok {
            return Err(self.syntax(pos, format!("{} cannot be aromatic", atom.element)));
        }
        self.bare.push(bare);
        self.graph.add_atom(atom)
    }

    fn parse(mut self) -> Result<MolecularGraph, MolError> {
        if self.text.is_empty() {
            return Err(MolError::EmptyInput);
        }
        let mut prev: Option<usize> = None;
        let mut pending: Option<(BondSym, usize)> = None;
        let mut branches: Vec<(usize, usize)> = Vec::new();
        let mut rings: BTreeMap<u32, OpenRing> = BTreeMap::new();

        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(p) = prev else {
                        return Err(self.syntax(start, "branch before any atom"));
                    };
                    if pending.is_some() {
                        return Err(self.syntax(start, "bond symbol before branch"));
                    }
                    branches.push((p, start));
                    self.pos += 1;
                }
                b')' => {
                    let Some((p, _)) = branches.pop() else {
                        return Err(self.syntax(start, "unmatched ')'"));
                    };
                    if pending.is_some() {
                        return Err(self.syntax(start, "dangling bond symbol"));
                    }
                    prev = Some(p);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' => {
                    if pending.is_some() {
                        return Err(self.syntax(start, "two consecutive bond symbols"));
                    }
                    let order = match c {
                        b'-' => BondOrder::Single,
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        _ => BondOrder::Aromatic,
                    };
                    pending = Some((BondSym::Explicit(order), start));
                    self.pos += 1;
                }
                b'/' | b'\\' => {
                    return Err(MolError::UnsupportedFeature {
                        position: start,
                        feature: "directional bond".into(),
                    })
                }
                b'$' => {
                    return Err(MolError::UnsupportedFeature {
                        position: start,
                        feature: "quadruple bond".into(),
                    })
                }
                b'.' => {
                    if pending.is_some() {
                        return Err(self.syntax(start, "bond symbol before '.'"));
                    }
                    prev = None;
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let label = self.ring_label()?;
                    let Some(p) = prev else {
                        return Err(self.syntax(start, "ring closure before any atom"));
                    };
                    let sym = pending.take().map_or(BondSym::Implicit, |(s, _)| s);
                    match rings.remove(&label) {
                        None => {
                            rings.insert(label, OpenRing { atom: p, bond: sym });
                        }
                        Some(open) => {
                            let sym = match (open.bond, sym) {
                                (BondSym::Explicit(a), BondSym::Explicit(b)) if a != b => {
                                    return Err(self.syntax(start, "conflicting ring bond orders"))
                                }
                                (BondSym::Explicit(a), _) | (_, BondSym::Explicit(a)) => {
                                    BondSym::Explicit(a)
                                }
                                _ => BondSym::Implicit,
                            };
                            if open.atom == p || self.graph.bond_between(open.atom, p).is_some() {
                                return Err(self.syntax(start, "ring closure duplicates a bond"));
                            }
                            let order = self.resolve_bond(sym, open.atom, p);
                            self.graph.add_bond(open.atom, p, order)?;
                        }
                    }
                }
                _ => {
                    let idx = if c == b'[' {
                        self.bracket_atom()?
                    } else {
                        self.bare_atom()?
                    };
                    if let Some(p) = prev {
                        let sym = pending.take().map_or(BondSym::Implicit, |(s, _)| s);
                        let order = self.resolve_bond(sym, p, idx);
                        self.graph.add_bond(p, idx, order)?;
                    } else if let Some((_, at)) = pending {
                        return Err(self.syntax(at, "bond symbol without a preceding atom"));
                    }
                    prev = Some(idx);
                }
            }
        }
        if let Some((_, at)) = pending {
            return Err(self.syntax(at, "dangling bond symbol"));
        }
        if let Some(&(_, at)) = branches.last() {
            return Err(MolError::UnclosedBranch { position: at });
        }
        if let Some((&label, _)) = rings.iter().next() {
            return Err(MolError::UnclosedRing { label });
        }
        for i in 0..self.graph.atom_count() {
            if self.bare[i] {
                let h = implicit_hydrogens(self.table, &self.graph, i);
                self.graph.atom_mut(i).explicit_h = h;
            }
        }
        Ok(self.graph)
    }

    fn ring_label(&mut self) -> Result<u32, MolError> {
        let start = self.pos;
        if self.peek() == Some(b'%') {
            let digits = self.text.get(self.pos + 1..self.pos + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0'))
                }
                _ => Err(self.syntax(start, "'%' must be followed by two digits")),
            }
        } else {
            let d = self.text[self.pos];
            self.pos += 1;
            Ok(u32::from(d - b'0'))
        }
    }

    fn bare_atom(&mut self) -> Result<usize, MolError> {
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let (sym, len, aromatic): (&str, usize, bool) = if rest.starts_with(b"Cl") {
            ("Cl", 2, false)
        } else if rest.starts_with(b"Br") {
            ("Br", 2, false)
        } else {
            match rest[0] {
                b'B' => ("B", 1, false),
                b'C' => ("C", 1, false),
                b'N' => ("N", 1, false),
                b'O' => ("O", 1, false),
                b'P' => ("P", 1, false),
                b'S' => ("S", 1, false),
                b'F' => ("F", 1, false),
                b'I' => ("I", 1, false),
                b'b' => ("B", 1, true),
                b'c' => ("C", 1, true),
                b'n' => ("N", 1, true),
                b'o' => ("O", 1, true),
                b'p' => ("P", 1, true),
                b's' => ("S", 1, true),
                b'@' => {
                    return Err(MolError::UnsupportedFeature {
                        position: start,
                        feature: "chirality".into(),
                    })
                }
                other => {
                    return Err(
                        self.syntax(start, format!("unexpected character '{}'", other as char))
                    )
                }
            }
        };
        self.pos += len;
        let element = Element::from_symbol(sym).expect("organic subset symbol");
        if !self.table.is_organic(element) {
            return Err(self.syntax(start, format!("{sym} must be written in brackets")));
        }
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        self.add_atom(atom, true, start)
    }

    fn bracket_atom(&mut self) -> Result<usize, MolError> {
        let open = self.pos;
        self.pos += 1;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(MolError::UnsupportedFeature {
                position: self.pos,
                feature: "isotope".into(),
            });
        }
        let sym_start = self.pos;
        let (element, aromatic) = self.bracket_symbol()?;
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        if self.peek() == Some(b'@') {
            return Err(MolError::UnsupportedFeature {
                position: self.pos,
                feature: "chirality".into(),
            });
        }
        if self.peek() == Some(b'H') {
            self.pos += 1;
            atom.explicit_h = match self.read_number() {
                Some(n) if n <= 8 => n as u8,
                Some(_) => return Err(self.syntax(self.pos, "hydrogen count too large")),
                None => 1,
            };
        }
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let unit: i32 = if sign == b'+' { 1 } else { -1 };
            let mut charge = unit;
            if let Some(n) = self.read_number() {
                charge = unit * n as i32;
            } else {
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
            if !(-4..=4).contains(&charge) {
                return Err(MolError::ChargeOutOfRange(charge.clamp(-128, 127) as i8));
            }
            atom.formal_charge = charge as i8;
        }
        match self.peek() {
            Some(b']') => self.pos += 1,
            Some(b':') => {
                return Err(MolError::UnsupportedFeature {
                    position: self.pos,
                    feature: "atom class".into(),
                })
            }
            Some(c) => {
                return Err(self.syntax(
                    self.pos,
                    format!("unexpected '{}' in bracket atom", c as char),
                ))
            }
            None => return Err(self.syntax(open, "unterminated bracket atom")),
        }
        self.add_atom(atom, false, sym_start)
    }

    fn bracket_symbol(&mut self) -> Result<(Element, bool), MolError> {
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let Some(&first) = rest.first() else {
            return Err(self.syntax(start, "unterminated bracket atom"));
        };
        if first.is_ascii_lowercase() {
            let two = rest.get(..2).and_then(|s| std::str::from_utf8(s).ok());
            for (text, sym) in [("se", "Se"), ("as", "As"), ("te", "Te")] {
                if two == Some(text) {
                    self.pos += 2;
                    return Ok((Element::from_symbol(sym).unwrap(), true));
                }
            }
            let sym = match first {
                b'b' => "B",
                b'c' => "C",
                b'n' => "N",
                b'o' => "O",
                b'p' => "P",
                b's' => "S",
                _ => return Err(self.syntax(start, "unknown aromatic symbol")),
            };
            self.pos += 1;
            return Ok((Element::from_symbol(sym).unwrap(), true));
        }
        if !first.is_ascii_uppercase() {
            return Err(self.syntax(start, "expected element symbol"));
        }
        if let Some(&second) = rest.get(1) {
            if second.is_ascii_lowercase() {
                let sym = std::str::from_utf8(&rest[..2]).unwrap();
                if let Some(e) = Element::from_symbol(sym) {
                    self.pos += 2;
                    return Ok((e, false));
                }
            }
        }
        let sym = std::str::from_utf8(&rest[..1]).unwrap();
        match Element::from_symbol(sym) {
            Some(e) => {
                self.pos += 1;
                Ok((e, false))
            }
            None => Err(self.syntax(start, format!("unknown element '{sym}'"))),
        }
    }

    fn read_number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

pub fn parse_smiles_with(table: &ElementTable, text: &str) -> Result<MolecularGraph, MolError> {
    if let Some(pos) = text.bytes().position(|b| !b.is_ascii_graphic()) {
        return Err(MolError::SmilesSyntax {
            position: pos,
            message: "unexpected whitespace or non-ASCII character".into(),
        });
    }
    Parser {
        text: text.as_bytes(),
        pos: 0,
        table,
        graph: MolecularGraph::new(),
        bare: Vec::new(),
    }
    .parse()
}

/// Parses SMILES against the standard element table.
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, MolError> {
    parse_smiles_with(&ElementTable::standard(), text)
}

fn atom_text(table: &ElementTable, g: &MolecularGraph, i: usize) -> String {
    let a = g.atom(i);
    let aromatic_bare = matches!(
        a.element,
        Element::B | Element::C | Element::N | Element::O | Element::P | Element::S
    );
    let bare = table.is_organic(a.element)
        && a.formal_charge == 0
        && (!a.aromatic || aromatic_bare)
        && a.explicit_h == implicit_hydrogens(table, g, i);
    let sym = if a.aromatic {
        a.element.symbol().to_ascii_lowercase()
    } else {
        a.element.symbol().to_string()
    };
    if bare {
        return sym;
    }
    let mut s = format!("[{sym}");
    match a.explicit_h {
        0 => {}
        1 => s.push('H'),
        n => write!(s, "H{n}").unwrap(),
    }
    match a.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        q if q > 0 => write!(s, "+{q}").unwrap(),
        q => write!(s, "-{}", -q).unwrap(),
    }
    s.push(']');
    s
}

fn bond_text(g: &MolecularGraph, a: usize, b: usize, order: BondOrder) -> &'static str {
    let both_aromatic = g.atom(a).aromatic && g.atom(b).aromatic;
    match order {
        BondOrder::Single if both_aromatic => "-",
        BondOrder::Single => "",
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic if both_aromatic => "",
        BondOrder::Aromatic => ":",
    }
}

fn ring_digit(d: u32) -> String {
    if d < 10 {
        d.to_string()
    } else {
        format!("%{d:02}")
    }
}

/// Depth-first SMILES emission where `rank` is a total order over atoms:
/// each fragment starts at its lowest-ranked atom and neighbors are visited
/// in rank order.
pub(crate) fn write_ranked(table: &ElementTable, g: &MolecularGraph, rank: &[usize]) -> String {
    let n = g.atom_count();
    let mut adj = g.adjacency();
    for list in &mut adj {
        list.sort_by_key(|&(nb, _)| rank[nb]);
    }

    // Pass 1: spanning forest and ring-closure bonds.
    let mut visited = vec![false; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut ring_bonds: Vec<(usize, usize)> = Vec::new(); // (opener, closer)
    let mut preorder: Vec<usize> = Vec::with_capacity(n);
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&i| rank[i]);
    let mut component_roots = Vec::new();
    for &root in &roots {
        if visited[root] {
            continue;
        }
        component_roots.push(root);
        // Explicit stack of (atom, next neighbor index) keeps deep chains off
        // the call stack.
        let mut stack = vec![(root, 0usize)];
        visited[root] = true;
        preorder.push(root);
        while let Some(&mut (u, ref mut k)) = stack.last_mut() {
            if *k == adj[u].len() {
                stack.pop();
                continue;
            }
            let (v, _) = adj[u][*k];
            *k += 1;
            if parent[u] == Some(v) {
                continue;
            }
            if !visited[v] {
                visited[v] = true;
                parent[v] = Some(u);
                children[u].push(v);
                preorder.push(v);
                stack.push((v, 0));
            } else if !ring_bonds.contains(&(u, v)) && !ring_bonds.contains(&(v, u)) {
                // v was emitted earlier than u: v opens, u closes.
                ring_bonds.push((v, u));
            }
        }
    }
    let mut order_of = vec![0usize; n];
    for (k, &a) in preorder.iter().enumerate() {
        order_of[a] = k;
    }

    // Pass 2: emission.
    let mut out = String::new();
    let mut digit_of: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut in_use: Vec<bool> = vec![false; 100];
    for (ci, &root) in component_roots.iter().enumerate() {
        if ci > 0 {
            out.push('.');
        }
        // (atom, phase) where phase 0 = emit atom, phase 1.. = child index.
        enum Step {
            Atom(usize),
            Open,
            Close,
        }
        let mut todo = vec![Step::Atom(root)];
        while let Some(step) = todo.pop() {
            match step {
                Step::Open => out.push('('),
                Step::Close => out.push(')'),
                Step::Atom(u) => {
                    if let Some(p) = parent[u] {
                        let order = g.bonds()[g.bond_between(p, u).unwrap()].order;
                        out.push_str(bond_text(g, p, u, order));
                    }
                    out.push_str(&atom_text(table, g, u));
                    let mut closes: Vec<(usize, usize)> = ring_bonds
                        .iter()
                        .copied()
                        .filter(|&(_, c)| c == u)
                        .collect();
                    closes.sort_by_key(|&(o, _)| order_of[o]);
                    let mut opens: Vec<(usize, usize)> = ring_bonds
                        .iter()
                        .copied()
                        .filter(|&(o, _)| o == u)
                        .collect();
                    opens.sort_by_key(|&(_, c)| order_of[c]);
                    let mut freed = Vec::new();
                    for key in closes {
                        let d = digit_of.remove(&key).expect("ring opened before closing");
                        out.push_str(&ring_digit(d));
                        freed.push(d);
                    }
                    for key in opens {
                        let d = (1..100u32)
                            .find(|&d| !in_use[d as usize])
                            .expect("ring digits exhausted");
                        in_use[d as usize] = true;
                        let order = g.bonds()[g.bond_between(key.0, key.1).unwrap()].order;
                        out.push_str(bond_text(g, key.0, key.1, order));
                        out.push_str(&ring_digit(d));
                        digit_of.insert(key, d);
                    }
                    for d in freed {
                        in_use[d as usize] = false;
                    }
                    let kids = &children[u];
                    if let Some((&last, rest)) = kids.split_last() {
                        todo.push(Step::Atom(last));
                        for &c in rest.iter().rev() {
                            todo.push(Step::Close);
                            todo.push(Step::Atom(c));
                            todo.push(Step::Open);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Deterministic SMILES: depth-first from the canonical root, neighbors in
/// canonical-label order. Equal to [`super::canonical_form`].
pub fn write_smiles(g: &MolecularGraph) -> String {
    super::canon::canonical_form(g)
}
