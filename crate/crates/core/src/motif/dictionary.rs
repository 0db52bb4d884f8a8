use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Deserialize;

use super::{MotifError, MotifVector};
use crate::protseq::{validate_protein, ProteinSequence};

/// Ordered protein motifs; position in the list is the bit index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MotifDictionary {
    motifs: Vec<String>,
}

impl MotifDictionary {
    pub fn new(motifs: Vec<String>) -> Result<Self, MotifError> {
        let mut seen = HashSet::new();
        for (i, m) in motifs.iter().enumerate() {
            if !validate_protein(m) {
                return Err(MotifError::InvalidMotif {
                    line: i + 1,
                    motif: m.clone(),
                });
            }
            if !seen.insert(m.as_str()) {
                return Err(MotifError::DuplicateMotif {
                    line: i + 1,
                    motif: m.clone(),
                });
            }
        }
        Ok(MotifDictionary { motifs })
    }

    pub fn motifs(&self) -> &[String] {
        &self.motifs
    }

    pub fn len(&self) -> usize {
        self.motifs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motifs.is_empty()
    }

    /// One motif per line; blank lines are not allowed.
    pub fn from_text(text: &str) -> Result<Self, MotifError> {
        MotifDictionary::new(
            text.lines()
                .map(|l| l.trim_end_matches('\r').to_string())
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        self.motifs.iter().map(|m| format!("{m}\n")).collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MotifError> {
        MotifDictionary::from_text(&std::fs::read_to_string(path)?)
    }

    /// Small dictionary shipped with the crate, built from the sample
    /// annotations in `data/motif_annotations.jsonl` with a minimum count of 2.
    pub fn bundled() -> Self {
        MotifDictionary::from_text(BUNDLED_MOTIFS).expect("bundled motif list is valid")
    }
}

const BUNDLED_MOTIFS: &str = include_str!("../../data/motifs.txt");

/// Bit `i` is set iff motif `i` occurs as a contiguous substring of `p`.
pub fn protein_motif_vector(p: &ProteinSequence, dict: &MotifDictionary) -> MotifVector {
    let seq = p.as_str();
    MotifVector::from_bits(
        dict.motifs()
            .iter()
            .map(|m| seq.contains(m.as_str()))
            .collect(),
    )
}

/// A sequence with annotated motif spans (0-based, end exclusive).
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct AnnotatedSequence {
    pub sequence: String,
    pub spans: Vec<(usize, usize)>,
}

impl AnnotatedSequence {
    /// Reads JSON Lines records `{"sequence": ..., "spans": [[start, end], ...]}`.
    pub fn parse_jsonl(text: &str) -> Result<Vec<AnnotatedSequence>, MotifError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| MotifError::InvalidRecord {
                    record: i,
                    message: e.to_string(),
                })
            })
            .collect()
    }
}

/// Counts every annotated motif occurrence across records and keeps those
/// seen at least `min_count` times, most frequent first, ties in
/// lexicographic order.
pub fn build_motif_dictionary(
    annotated: &[AnnotatedSequence],
    min_count: usize,
) -> Result<MotifDictionary, MotifError> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for (record, a) in annotated.iter().enumerate() {
        if !validate_protein(&a.sequence) {
            return Err(MotifError::InvalidRecord {
                record,
                message: "sequence is not a canonical protein".into(),
            });
        }
        for &(start, end) in &a.spans {
            if start >= end || end > a.sequence.len() {
                return Err(MotifError::InvalidSpan {
                    record,
                    start,
                    end,
                    len: a.sequence.len(),
                });
            }
            *counts.entry(&a.sequence[start..end]).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    MotifDictionary::new(kept.into_iter().map(|(m, _)| m.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ann(seq: &str, spans: &[(usize, usize)]) -> AnnotatedSequence {
        AnnotatedSequence {
            sequence: seq.into(),
            spans: spans.to_vec(),
        }
    }

    #[test]
    fn substring_bits() {
        let dict = MotifDictionary::new(vec!["KV".into(), "AA".into(), "MKVL".into()]).unwrap();
        let v = protein_motif_vector(&ProteinSequence::new("MKVL").unwrap(), &dict);
        assert_eq!(v.bits(), [true, false, true]);
    }

    #[test]
    fn dictionary_keeps_repeated_motifs() {
        let records = [
            ann("MRGDK", &[(1, 4)]),
            ann("ARGDA", &[(1, 4)]),
            ann("KDELM", &[(0, 4)]),
        ];
        let d = build_motif_dictionary(&records, 2).unwrap();
        assert_eq!(d.motifs(), ["RGD"]);
        let d = build_motif_dictionary(&records, 1).unwrap();
        assert_eq!(d.motifs(), ["RGD", "KDEL"]);
        assert!(build_motif_dictionary(&[], 2).unwrap().is_empty());
    }

    #[test]
    fn bad_spans_and_entries_are_rejected() {
        assert!(matches!(
            build_motif_dictionary(&[ann("MK", &[(1, 5)])], 1),
            Err(MotifError::InvalidSpan { record: 0, .. })
        ));
        assert!(matches!(
            MotifDictionary::from_text("KV\nKV\n"),
            Err(MotifError::DuplicateMotif { line: 2, .. })
        ));
        assert!(matches!(
            MotifDictionary::from_text("KV\n\n"),
            Err(MotifError::InvalidMotif { line: 2, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let d = MotifDictionary::new(vec!["KV".into(), "RGD".into()]).unwrap();
        assert_eq!(MotifDictionary::from_text(&d.to_text()).unwrap(), d);
    }
}
