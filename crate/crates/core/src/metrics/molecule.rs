//! Molecule-level metrics.

use std::str::FromStr;

use super::MetricError;
use crate::molgraph::{
    canonical_form, check_valence, decode_selfies, parse_selfies, parse_smiles, write_smiles,
    MolError, MolecularGraph,
};
use crate::motif::MotifVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MolFormat {
    #[default]
    Smiles,
    Selfies,
}

impl FromStr for MolFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "smiles" => Ok(MolFormat::Smiles),
            "selfies" => Ok(MolFormat::Selfies),
            other => Err(format!("unknown molecule format {other:?}")),
        }
    }
}

pub fn parse_molecule(text: &str, format: MolFormat) -> Result<MolecularGraph, MolError> {
    match format {
        MolFormat::Smiles => parse_smiles(text.trim()),
        MolFormat::Selfies => decode_selfies(&parse_selfies(text.trim())?),
    }
}

/// Parsed, non-empty and free of valence violations.
pub fn valid_molecule(text: &str, format: MolFormat) -> Option<MolecularGraph> {
    parse_molecule(text, format)
        .ok()
        .filter(|g| !g.is_empty() && check_valence(g).is_valid())
}

/// SMILES text of a molecule string: unchanged for SMILES input, written
/// from the decoded graph for SELFIES input.
pub fn smiles_text(text: &str, format: MolFormat) -> Option<String> {
    match format {
        MolFormat::Smiles => Some(text.trim().to_string()),
        MolFormat::Selfies => parse_molecule(text, format).ok().map(|g| write_smiles(&g)),
    }
}

/// Percentage of strings that parse and pass the valence check.
pub fn molecule_validity<S: AsRef<str>>(texts: &[S], format: MolFormat) -> f64 {
    if texts.is_empty() {
        return 0.0;
    }
    let ok = texts
        .iter()
        .filter(|t| valid_molecule(t.as_ref(), format).is_some())
        .count();
    100.0 * ok as f64 / texts.len() as f64
}

pub fn exact_match(ref_mol: &MolecularGraph, gen_mol: &MolecularGraph) -> bool {
    canonical_form(ref_mol) == canonical_form(gen_mol)
}

/// |a ∧ b| / |a ∨ b|, with two all-zero vectors scoring 1.
pub fn tanimoto(a: &MotifVector, b: &MotifVector) -> Result<f64, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch {
            references: a.len(),
            hypotheses: b.len(),
        });
    }
    let (mut both, mut either) = (0usize, 0usize);
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        both += usize::from(x && y);
        either += usize::from(x || y);
    }
    Ok(if either == 0 {
        1.0
    } else {
        both as f64 / either as f64
    })
}
