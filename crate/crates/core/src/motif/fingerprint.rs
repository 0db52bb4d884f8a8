//! Circular fingerprints. Each round hashes an atom's previous identifier
//! together with its sorted (bond, neighbor identifier) list using 64-bit
//! FNV-1a; every identifier from every round is folded into the bit vector
//! by modulus.

use crate::molgraph::{Element, MolecularGraph};

use super::{MotifError, MotifVector};

pub const FCFP_RADIUS: usize = 2;
pub const FCFP_BITS: usize = 1024;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(FNV_OFFSET)
    }

    fn bytes(&mut self, data: &[u8]) {
        for &b in data {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }
}

/// Six pharmacophore flags packed as bits 0..5: donor (N/O with H),
/// acceptor (N/O), positive, negative, aromatic, halogen.
pub fn pharmacophore_invariant(g: &MolecularGraph, atom: usize) -> u64 {
    let a = g.atom(atom);
    let n_or_o = matches!(a.element, Element::N | Element::O);
    let flags = [
        n_or_o && a.explicit_h > 0,
        n_or_o,
        a.formal_charge > 0,
        a.formal_charge < 0,
        a.aromatic,
        a.element.is_halogen(),
    ];
    flags
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &f)| acc | (u64::from(f) << i))
}

/// Atoms lying on at least one cycle.
fn ring_atoms(g: &MolecularGraph) -> Vec<bool> {
    let adj = g.adjacency();
    let mut in_ring = vec![false; g.atom_count()];
    for bond in g.bonds() {
        // The bond is in a ring iff its ends stay connected without it.
        let mut seen = vec![false; g.atom_count()];
        let mut stack = vec![bond.a];
        seen[bond.a] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                let skip = (v == bond.a && w == bond.b) || (v == bond.b && w == bond.a);
                if !skip && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen[bond.b] {
            in_ring[bond.a] = true;
            in_ring[bond.b] = true;
        }
    }
    in_ring
}

fn circular(
    g: &MolecularGraph,
    initial: Vec<u64>,
    radius: usize,
    n_bits: usize,
) -> Result<MotifVector, MotifError> {
    if g.is_empty() {
        return Err(MotifError::EmptyGraph);
    }
    if n_bits == 0 {
        return Err(MotifError::ZeroBits);
    }
    let adj = g.adjacency();
    let mut bits = MotifVector::zeros(n_bits);
    let mut ids: Vec<u64> = initial
        .iter()
        .map(|&inv| {
            let mut h = Fnv::new();
            h.u64(0);
            h.u64(inv);
            h.0
        })
        .collect();
    for &id in &ids {
        bits.set((id % n_bits as u64) as usize);
    }
    for round in 1..=radius {
        ids = (0..ids.len())
            .map(|i| {
                let mut env: Vec<(u8, u64)> =
                    adj[i].iter().map(|&(j, b)| (b.code(), ids[j])).collect();
                env.sort_unstable();
                let mut h = Fnv::new();
                h.u64(round as u64);
                h.u64(ids[i]);
                for (code, id) in env {
                    h.bytes(&[code]);
                    h.u64(id);
                }
                h.0
            })
            .collect();
        for &id in &ids {
            bits.set((id % n_bits as u64) as usize);
        }
    }
    Ok(bits)
}

/// Functional-class fingerprint with pharmacophore atom invariants.
pub fn fcfp(g: &MolecularGraph, radius: usize, n_bits: usize) -> Result<MotifVector, MotifError> {
    let initial = (0..g.atom_count())
        .map(|i| pharmacophore_invariant(g, i))
        .collect();
    circular(g, initial, radius, n_bits)
}

/// Extended-connectivity fingerprint with element-level invariants
/// (atomic number, degree, hydrogens, charge, aromatic, ring membership).
pub fn ecfp(g: &MolecularGraph, radius: usize, n_bits: usize) -> Result<MotifVector, MotifError> {
    let ring = ring_atoms(g);
    let initial = g
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut h = Fnv::new();
            h.bytes(&[
                a.element.atomic_number(),
                g.degree(i) as u8,
                a.explicit_h,
                a.formal_charge as u8,
                u8::from(a.aromatic),
                u8::from(ring[i]),
            ]);
            h.0
        })
        .collect();
    circular(g, initial, radius, n_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    #[test]
    fn fnv_matches_reference_vectors() {
        let mut h = Fnv::new();
        h.bytes(b"");
        assert_eq!(h.0, 0xcbf29ce484222325);
        let mut h = Fnv::new();
        h.bytes(b"a");
        assert_eq!(h.0, 0xaf63dc4c8601ec8c);
        let mut h = Fnv::new();
        h.bytes(b"foobar");
        assert_eq!(h.0, 0x85944171f73967e8);
    }

    #[test]
    fn empty_graph_is_an_error() {
        assert!(matches!(
            fcfp(&MolecularGraph::new(), 2, 1024),
            Err(MotifError::EmptyGraph)
        ));
        let g = parse_smiles("C").unwrap();
        assert!(matches!(fcfp(&g, 2, 0), Err(MotifError::ZeroBits)));
    }

    #[test]
    fn benzene_sets_at_most_one_bit_per_round() {
        let g = parse_smiles("c1ccccc1").unwrap();
        let v = fcfp(&g, 2, 1024).unwrap();
        assert!(v.count_ones() <= 3 && v.count_ones() >= 1);
    }

    #[test]
    fn pharmacophore_flags() {
        let g = parse_smiles("[NH3+]CC(=O)[O-]").unwrap();
        assert_eq!(pharmacophore_invariant(&g, 0), 0b000111);
        assert_eq!(pharmacophore_invariant(&g, 1), 0);
        assert_eq!(pharmacophore_invariant(&g, 3), 0b000010);
        assert_eq!(pharmacophore_invariant(&g, 4), 0b001010);
        let g = parse_smiles("Clc1ccccc1").unwrap();
        assert_eq!(pharmacophore_invariant(&g, 0), 0b100000);
        assert_eq!(pharmacophore_invariant(&g, 1), 0b010000);
    }

    #[test]
    fn fingerprints_ignore_atom_order() {
        let g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        let order: Vec<usize> = (0..g.atom_count()).rev().collect();
        let p = g.permuted(&order);
        assert_eq!(fcfp(&g, 2, 1024).unwrap(), fcfp(&p, 2, 1024).unwrap());
        assert_eq!(ecfp(&g, 2, 2048).unwrap(), ecfp(&p, 2, 2048).unwrap());
    }

    #[test]
    fn ring_membership() {
        let g = parse_smiles("CC1CC1").unwrap();
        assert_eq!(ring_atoms(&g), vec![false, true, true, true]);
    }
}
