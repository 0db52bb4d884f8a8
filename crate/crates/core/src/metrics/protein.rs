//! Protein similarity metrics: position-wise identity, Smith-Waterman
//! alignment and substitution-matrix scores.

use std::path::Path;

use super::MetricError;
use crate::protseq::{residue_index, ProteinSequence, AMINO_ACIDS};

const BLOSUM45: &str = include_str!("../../data/blosum45.txt");

/// 20×20 residue substitution scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionMatrix {
    pub name: String,
    scores: [[i32; 20]; 20],
}

impl SubstitutionMatrix {
    /// Parses NCBI matrix text: `#` comments, a header row of residue
    /// letters, then one labelled row per residue. Letters outside the 20
    /// canonical residues are ignored.
    pub fn parse_ncbi(name: &str, text: &str) -> Result<Self, MetricError> {
        let bad = |line: usize, message: String| MetricError::Matrix { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| bad(0, "no header row".into()))?;
        let cols: Vec<u8> = header
            .split_whitespace()
            .map(|c| {
                if c.len() == 1 {
                    Ok(c.as_bytes()[0])
                } else {
                    Err(bad(hline + 1, format!("bad column label {c:?}")))
                }
            })
            .collect::<Result<_, _>>()?;
        let mut seen = [[false; 20]; 20];
        let mut scores = [[0i32; 20]; 20];
        for (idx, line) in lines {
            let mut fields = line.split_whitespace();
            let label = fields.next().unwrap_or_default();
            let Some(row) = label
                .bytes()
                .next()
                .and_then(residue_index)
                .filter(|_| label.len() == 1)
            else {
                continue;
            };
            let values: Vec<i32> = fields
                .map(|v| {
                    v.parse()
                        .map_err(|_| bad(idx + 1, format!("bad score {v:?}")))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != cols.len() {
                return Err(bad(
                    idx + 1,
                    format!("{} scores for {} columns", values.len(), cols.len()),
                ));
            }
            for (&c, &v) in cols.iter().zip(&values) {
                if let Some(col) = residue_index(c) {
                    scores[row][col] = v;
                    seen[row][col] = true;
                }
            }
        }
        for i in 0..20 {
            for j in 0..20 {
                if !seen[i][j] {
                    return Err(bad(
                        0,
                        format!(
                            "missing pair {}{}",
                            AMINO_ACIDS[i] as char, AMINO_ACIDS[j] as char
                        ),
                    ));
                }
                if scores[i][j] != scores[j][i] {
                    return Err(bad(
                        0,
                        format!(
                            "asymmetric pair {}{}",
                            AMINO_ACIDS[i] as char, AMINO_ACIDS[j] as char
                        ),
                    ));
                }
            }
        }
        Ok(SubstitutionMatrix {
            name: name.to_string(),
            scores,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MetricError> {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("matrix");
        Self::parse_ncbi(name, &std::fs::read_to_string(path)?)
    }

    /// The bundled NCBI BLOSUM45 matrix.
    pub fn blosum45() -> Self {
        Self::parse_ncbi("BLOSUM45", BLOSUM45).expect("bundled matrix parses")
    }

    /// Score for two canonical residue letters.
    pub fn score(&self, a: u8, b: u8) -> i32 {
        let i = residue_index(a).expect("canonical residue");
        let j = residue_index(b).expect("canonical residue");
        self.scores[i][j]
    }
}

/// 2·(identical positions over the shorter length)/(sum of lengths)·100.
pub fn identity(p_ref: &ProteinSequence, p_gen: &ProteinSequence) -> f64 {
    sequence_identity(p_ref.as_bytes(), p_gen.as_bytes())
}

/// The [`identity`] formula on raw residue strings, without alphabet
/// validation. Two empty strings give 0.
pub fn sequence_identity(a: &[u8], b: &[u8]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    200.0 * same as f64 / (a.len() + b.len()) as f64
}

/// Linear-gap local alignment scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwScoring {
    pub matched: i64,
    pub mismatch: i64,
    pub gap: i64,
}

impl Default for SwScoring {
    fn default() -> Self {
        SwScoring {
            matched: 1,
            mismatch: -1,
            gap: -1,
        }
    }
}

/// Best local alignment score (never negative).
pub fn sw_score(a: &[u8], b: &[u8], scoring: &SwScoring) -> i64 {
    let mut prev = vec![0i64; b.len() + 1];
    let mut best = 0;
    for &x in a {
        let mut cur = vec![0i64; b.len() + 1];
        for (j, &y) in b.iter().enumerate() {
            let diag = prev[j]
                + if x == y {
                    scoring.matched
                } else {
                    scoring.mismatch
                };
            let v = diag
                .max(prev[j + 1] + scoring.gap)
                .max(cur[j] + scoring.gap)
                .max(0);
            cur[j + 1] = v;
            best = best.max(v);
        }
        prev = cur;
    }
    best
}

pub fn sw_alignment_with(
    p_ref: &ProteinSequence,
    p_gen: &ProteinSequence,
    scoring: &SwScoring,
) -> f64 {
    let s = sw_score(p_ref.as_bytes(), p_gen.as_bytes(), scoring);
    (200.0 * s as f64 / (p_ref.len() + p_gen.len()) as f64).max(0.0)
}

/// Alignment metric with match +1, mismatch -1, gap -1.
pub fn sw_alignment(p_ref: &ProteinSequence, p_gen: &ProteinSequence) -> f64 {
    sw_alignment_with(p_ref, p_gen, &SwScoring::default())
}

/// 2·(sum of position-wise substitution scores)/(sum of lengths).
pub fn blosum_substitution(
    p_ref: &ProteinSequence,
    p_gen: &ProteinSequence,
    m: &SubstitutionMatrix,
) -> f64 {
    let sum: i64 = p_ref
        .as_bytes()
        .iter()
        .zip(p_gen.as_bytes())
        .map(|(&a, &b)| i64::from(m.score(a, b)))
        .sum();
    2.0 * sum as f64 / (p_ref.len() + p_gen.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ProteinSequence {
        ProteinSequence::new(s).unwrap()
    }

    #[test]
    fn identity_formula() {
        assert_eq!(identity(&p("MKV"), &p("MKV")), 100.0);
        assert_eq!(identity(&p("AAAA"), &p("CCCC")), 0.0);
        assert!((identity(&p("AAE"), &p("AAC")) - 66.6667).abs() < 1e-3);
    }

    #[test]
    fn alignment_extremes() {
        assert_eq!(sw_alignment(&p("MKVLA"), &p("MKVLA")), 100.0);
        assert_eq!(sw_alignment(&p("AAAA"), &p("CCCC")), 0.0);
        // ACGT vs AGT: best local alignment is GT (score 2) or A-GT with a gap.
        assert_eq!(sw_score(b"ACGT", b"AGT", &SwScoring::default()), 2);
    }

    // Values checked against Biopython's copy of the NCBI matrix.
    #[test]
    fn blosum45_entries() {
        let m = SubstitutionMatrix::blosum45();
        assert_eq!(m.score(b'A', b'A'), 5);
        assert_eq!(m.score(b'W', b'W'), 15);
        assert_eq!(m.score(b'C', b'C'), 12);
        assert_eq!(m.score(b'A', b'R'), -2);
        assert_eq!(m.score(b'N', b'D'), 2);
        assert_eq!(blosum_substitution(&p("AAAA"), &p("AAAA"), &m), 5.0);
        assert_eq!(
            blosum_substitution(&p("A"), &p("AWWW"), &m),
            2.0 * 5.0 / 5.0
        );
    }

    #[test]
    fn malformed_matrix_is_rejected() {
        assert!(SubstitutionMatrix::parse_ncbi("x", "# only a comment\n").is_err());
        let text = "   A  R\nA  5 -2\nR -2  7\n";
        assert!(matches!(
            SubstitutionMatrix::parse_ncbi("x", text),
            Err(MetricError::Matrix { .. })
        ));
    }
}
