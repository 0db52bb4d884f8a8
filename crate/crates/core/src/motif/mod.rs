//! Motif indicators: circular fingerprints for molecules, dictionary
//! matching for proteins, and their projection into a motif prompt.

mod dictionary;
mod fingerprint;

use std::fmt;

use ndarray::{Array1, Array2};
use thiserror::Error;

pub use dictionary::{
    build_motif_dictionary, protein_motif_vector, AnnotatedSequence, MotifDictionary,
};
pub use fingerprint::{ecfp, fcfp, pharmacophore_invariant, FCFP_BITS, FCFP_RADIUS};

#[derive(Debug, Error)]
pub enum MotifError {
    #[error("fingerprint of an empty graph")]
    EmptyGraph,
    #[error("fingerprint length must be at least 1")]
    ZeroBits,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("line {line}: invalid motif {motif:?}")]
    InvalidMotif { line: usize, motif: String },
    #[error("line {line}: duplicate motif {motif:?}")]
    DuplicateMotif { line: usize, motif: String },
    #[error("record {record}: span {start}..{end} outside a sequence of length {len}")]
    InvalidSpan {
        record: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("record {record}: {message}")]
    InvalidRecord { record: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Binary presence vector over a fixed motif index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MotifVector {
    bits: Vec<bool>,
}

impl MotifVector {
    pub fn zeros(len: usize) -> Self {
        MotifVector {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        MotifVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    /// Hex digits, bit 0 as the most significant bit of the first digit.
    /// The last digit is zero-padded on the right.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|c| {
                let v = c
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (k, &b)| acc | (u32::from(b) << (3 - k)));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }
}

impl fmt::Display for MotifVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// P = T·M: the sum of the rows of `m` selected by the set bits of `t`,
/// added in ascending row order.
pub fn motif_prompt(t: &MotifVector, m: &Array2<f64>) -> Result<Array1<f64>, MotifError> {
    if t.len() != m.nrows() {
        return Err(MotifError::DimensionMismatch {
            expected: m.nrows(),
            found: t.len(),
        });
    }
    let mut p = Array1::zeros(m.ncols());
    for i in t.ones() {
        p += &m.row(i);
    }
    Ok(p)
}
