//! Protein sequences over the 20 canonical residues, FASTA I/O and a
//! minimal backbone-structure container.

mod fasta;
mod structure;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use fasta::{parse_fasta, read_fasta, write_fasta, FastaRecord};
pub use structure::{ProteinStructure, BACKBONE_ATOMS};

/// Canonical one-letter residue codes in alphabetical order.
pub const AMINO_ACIDS: [u8; 20] = *b"ACDEFGHIKLMNPQRSTVWY";

#[derive(Debug, Error)]
pub enum ProteinError {
    #[error("empty sequence")]
    EmptySequence,
    #[error("invalid residue {ch:?} at position {position}")]
    InvalidCharacter { position: usize, ch: char },
    #[error("invalid residue {ch:?} at line {line}, column {column}")]
    InvalidResidue {
        line: usize,
        column: usize,
        ch: char,
    },
    #[error("record {header:?} at line {line} has no sequence")]
    EmptyRecord { header: String, line: usize },
    #[error("sequence data before the first header at line {line}")]
    MissingHeader { line: usize },
    #[error("backbone has {backbone} residues, sequence has {residues}")]
    BackboneLength { residues: usize, backbone: usize },
    #[error("structure line {line}: {message}")]
    StructureParse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn is_residue(c: u8) -> bool {
    AMINO_ACIDS.contains(&c)
}

/// Index of a residue in [`AMINO_ACIDS`].
pub fn residue_index(c: u8) -> Option<usize> {
    AMINO_ACIDS.iter().position(|&a| a == c)
}

/// True iff `text` is non-empty and every character is a canonical residue.
pub fn validate_protein(text: &str) -> bool {
    !text.is_empty() && text.bytes().all(is_residue)
}

/// A validated, non-empty amino-acid sequence (uppercase).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProteinSequence(String);

impl ProteinSequence {
    pub fn new(text: impl Into<String>) -> Result<Self, ProteinError> {
        let text = text.into();
        if text.is_empty() {
            return Err(ProteinError::EmptySequence);
        }
        if let Some((position, ch)) = text
            .char_indices()
            .find(|&(_, c)| !c.is_ascii() || !is_residue(c as u8))
        {
            return Err(ProteinError::InvalidCharacter { position, ch });
        }
        Ok(ProteinSequence(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for ProteinSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ProteinSequence {
    type Err = ProteinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProteinSequence::new(s)
    }
}

impl AsRef<str> for ProteinSequence {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(validate_protein("ACDEFGHIKLMNPQRSTVWY"));
        assert!(!validate_protein(""));
        assert!(!validate_protein("MKB1"));
        assert!(!validate_protein("mk"));
    }

    #[test]
    fn sequence_rejects_noncanonical_codes() {
        for bad in ["B", "J", "O", "U", "X", "Z"] {
            assert!(ProteinSequence::new(format!("MK{bad}")).is_err());
        }
        assert!(matches!(
            ProteinSequence::new("MKé"),
            Err(ProteinError::InvalidCharacter {
                position: 2,
                ch: 'é'
            })
        ));
        assert!(matches!(
            ProteinSequence::new(""),
            Err(ProteinError::EmptySequence)
        ));
        assert_eq!(ProteinSequence::new("MKV").unwrap().len(), 3);
    }
}
