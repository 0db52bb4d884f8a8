use super::{ProteinError, ProteinSequence};

/// Order of the four backbone atoms stored per residue.
pub const BACKBONE_ATOMS: [&str; 4] = ["N", "C", "CA", "O"];

const CA: usize = 2;

/// Sequence plus per-residue backbone coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProteinStructure {
    sequence: ProteinSequence,
    backbone: Vec<[[f64; 3]; 4]>,
}

impl ProteinStructure {
    pub fn new(
        sequence: ProteinSequence,
        backbone: Vec<[[f64; 3]; 4]>,
    ) -> Result<Self, ProteinError> {
        if backbone.len() != sequence.len() {
            return Err(ProteinError::BackboneLength {
                residues: sequence.len(),
                backbone: backbone.len(),
            });
        }
        Ok(ProteinStructure { sequence, backbone })
    }

    /// Reads one line per residue with 12 numbers (N, C, CA, O as x y z).
    /// Blank lines and lines starting with '#' are skipped.
    pub fn parse(sequence: ProteinSequence, text: &str) -> Result<Self, ProteinError> {
        let mut backbone = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let values = t
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ProteinError::StructureParse {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            if values.len() != 12 || values.iter().any(|v| !v.is_finite()) {
                return Err(ProteinError::StructureParse {
                    line: idx + 1,
                    message: format!("expected 12 finite numbers, found {}", values.len()),
                });
            }
            let mut res = [[0.0; 3]; 4];
            for (k, v) in values.into_iter().enumerate() {
                res[k / 3][k % 3] = v;
            }
            backbone.push(res);
        }
        ProteinStructure::new(sequence, backbone)
    }

    pub fn sequence(&self) -> &ProteinSequence {
        &self.sequence
    }

    pub fn backbone(&self) -> &[[[f64; 3]; 4]] {
        &self.backbone
    }

    /// Alpha-carbon coordinates, one per residue.
    pub fn ca(&self) -> Vec<[f64; 3]> {
        self.backbone.iter().map(|r| r[CA]).collect()
    }
}
