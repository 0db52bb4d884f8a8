//! Hydrogen filling, valence validation and kekulization.
//!
//! Aromatic bonds count one sigma bond each; the extra pi bond of an
//! aromatic atom is assigned by a perfect matching over the atoms that need
//! one. An aromatic system is only valid if that matching exists.

use serde::Serialize;

use super::element::ElementTable;
use super::graph::{BondOrder, MolecularGraph};
use super::MolError;

/// Sum of bond orders with aromatic bonds counted as 1.
pub(crate) fn sigma_sum(g: &MolecularGraph, atom: usize) -> u32 {
    g.bonds()
        .iter()
        .filter(|b| b.a == atom || b.b == atom)
        .map(|b| u32::from(b.order.sigma_order()))
        .sum()
}

/// Hydrogens an organic-subset atom receives when written without brackets:
/// the lowest allowed valence that fits its bonds. Aromatic atoms reserve one
/// unit for the pi bond.
pub fn implicit_hydrogens(table: &ElementTable, g: &MolecularGraph, atom: usize) -> u8 {
    let a = g.atom(atom);
    let Some(valences) = table.valences(a.element, a.formal_charge) else {
        return 0;
    };
    let base = sigma_sum(g, atom);
    if a.aromatic {
        let lowest = u32::from(valences.first().copied().unwrap_or(0));
        return lowest.saturating_sub(base + 1) as u8;
    }
    valences
        .iter()
        .map(|&v| u32::from(v))
        .find(|&v| v >= base)
        .map(|v| (v - base) as u8)
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// Bonds plus hydrogens exceed the largest allowed valence.
    Exceeded {
        total: u32,
        max_allowed: u32,
    },
    /// The aromatic system has no Kekulé structure that satisfies this atom.
    Kekulization,
    UnknownElement {
        symbol: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub atom: usize,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValenceReport {
    pub violations: Vec<Violation>,
}

impl ValenceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pi-bond assignment over aromatic bonds: `Some(partner)` for atoms that
/// take their double bond from the matching.
struct PiAssignment {
    partner: Vec<Option<usize>>,
    unmatched: Vec<usize>,
}

fn assign_pi_bonds(table: &ElementTable, g: &MolecularGraph) -> PiAssignment {
    let n = g.atom_count();
    let mut need = vec![false; n];
    for (i, atom) in g.atoms().iter().enumerate() {
        let has_aromatic = g
            .bonds()
            .iter()
            .any(|b| b.order == BondOrder::Aromatic && (b.a == i || b.b == i));
        if !has_aromatic {
            continue;
        }
        let Some(allowed) = table.valences(atom.element, atom.formal_charge) else {
            continue;
        };
        let base = sigma_sum(g, i) + u32::from(atom.explicit_h);
        let allows = |v: u32| allowed.iter().any(|&a| u32::from(a) == v);
        need[i] = !allows(base) && allows(base + 1);
    }
    let mut nbrs = vec![Vec::new(); n];
    for b in g.bonds() {
        if b.order == BondOrder::Aromatic && need[b.a] && need[b.b] {
            nbrs[b.a].push(b.b);
            nbrs[b.b].push(b.a);
        }
    }
    let mut partner = vec![None; n];
    let targets: Vec<usize> = (0..n).filter(|&i| need[i]).collect();
    if !match_all(&targets, &nbrs, &mut partner) {
        // Keep a greedy partial matching so the report can point at atoms.
        partner = vec![None; n];
        for &i in &targets {
            if partner[i].is_none() {
                if let Some(&j) = nbrs[i].iter().find(|&&j| partner[j].is_none()) {
                    partner[i] = Some(j);
                    partner[j] = Some(i);
                }
            }
        }
    }
    let unmatched = targets
        .iter()
        .copied()
        .filter(|&i| partner[i].is_none())
        .collect();
    PiAssignment { partner, unmatched }
}

/// Backtracking perfect matching; always expands the most constrained atom.
fn match_all(targets: &[usize], nbrs: &[Vec<usize>], partner: &mut [Option<usize>]) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for &i in targets {
        if partner[i].is_some() {
            continue;
        }
        let free = nbrs[i].iter().filter(|&&j| partner[j].is_none()).count();
        if best.is_none_or(|(_, f)| free < f) {
            best = Some((i, free));
        }
    }
    let Some((i, free)) = best else {
        return true;
    };
    if free == 0 {
        return false;
    }
    for k in 0..nbrs[i].len() {
        let j = nbrs[i][k];
        if partner[j].is_some() {
            continue;
        }
        partner[i] = Some(j);
        partner[j] = Some(i);
        if match_all(targets, nbrs, partner) {
            return true;
        }
        partner[i] = None;
        partner[j] = None;
    }
    false
}

/// Per-atom valence check against `table`.
pub fn check_valence_with(table: &ElementTable, g: &MolecularGraph) -> ValenceReport {
    let pi = assign_pi_bonds(table, g);
    let mut violations = Vec::new();
    for (i, atom) in g.atoms().iter().enumerate() {
        let Some(allowed) = table.valences(atom.element, atom.formal_charge) else {
            violations.push(Violation {
                atom: i,
                kind: ViolationKind::UnknownElement {
                    symbol: atom.element.symbol().to_string(),
                },
            });
            continue;
        };
        let total =
            sigma_sum(g, i) + u32::from(atom.explicit_h) + u32::from(pi.partner[i].is_some());
        let max_allowed = u32::from(allowed.last().copied().unwrap_or(0));
        if total > max_allowed {
            violations.push(Violation {
                atom: i,
                kind: ViolationKind::Exceeded { total, max_allowed },
            });
        }
    }
    for &i in &pi.unmatched {
        violations.push(Violation {
            atom: i,
            kind: ViolationKind::Kekulization,
        });
    }
    violations.sort_by_key(|v| v.atom);
    ValenceReport { violations }
}

pub fn check_valence(g: &MolecularGraph) -> ValenceReport {
    check_valence_with(&ElementTable::standard(), g)
}

/// Replaces aromatic bonds with alternating single/double bonds and clears
/// aromatic flags. Hydrogen counts are kept.
pub fn kekulize_with(table: &ElementTable, g: &MolecularGraph) -> Result<MolecularGraph, MolError> {
    let pi = assign_pi_bonds(table, g);
    if let Some(&atom) = pi.unmatched.first() {
        return Err(MolError::Kekulization(atom));
    }
    let mut out = g.clone();
    for (k, b) in g.bonds().iter().enumerate() {
        if b.order == BondOrder::Aromatic {
            let order = if pi.partner[b.a] == Some(b.b) {
                BondOrder::Double
            } else {
                BondOrder::Single
            };
            out.set_bond_order(k, order);
        }
    }
    for i in 0..out.atom_count() {
        out.atom_mut(i).aromatic = false;
    }
    Ok(out)
}

pub fn kekulize(g: &MolecularGraph) -> Result<MolecularGraph, MolError> {
    kekulize_with(&ElementTable::standard(), g)
}
