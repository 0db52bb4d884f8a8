use std::path::Path;

use super::{is_residue, ProteinError, ProteinSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    pub sequence: ProteinSequence,
}

/// Parses protein FASTA. Sequence lines are concatenated with whitespace
/// removed and letters uppercased. Line and column numbers are 1-based.
pub fn parse_fasta(text: &str) -> Result<Vec<FastaRecord>, ProteinError> {
    let mut records = Vec::new();
    let mut current: Option<(String, usize, String)> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(header) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                records.push(finish(rec)?);
            }
            current = Some((header.trim().to_string(), lineno, String::new()));
            continue;
        }
        let Some((_, _, seq)) = current.as_mut() else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(ProteinError::MissingHeader { line: lineno });
        };
        for (col, ch) in line.chars().enumerate() {
            if ch.is_whitespace() {
                continue;
            }
            let up = ch.to_ascii_uppercase();
            if !up.is_ascii() || !is_residue(up as u8) {
                return Err(ProteinError::InvalidResidue {
                    line: lineno,
                    column: col + 1,
                    ch,
                });
            }
            seq.push(up);
        }
    }
    if let Some(rec) = current {
        records.push(finish(rec)?);
    }
    Ok(records)
}

fn finish((header, line, seq): (String, usize, String)) -> Result<FastaRecord, ProteinError> {
    if seq.is_empty() {
        return Err(ProteinError::EmptyRecord { header, line });
    }
    Ok(FastaRecord {
        header,
        sequence: ProteinSequence::new(seq)?,
    })
}

pub fn read_fasta(path: impl AsRef<Path>) -> Result<Vec<FastaRecord>, ProteinError> {
    parse_fasta(&std::fs::read_to_string(path)?)
}

/// Writes records with sequence lines wrapped at `width` characters
/// (0 disables wrapping).
pub fn write_fasta(records: &[FastaRecord], width: usize) -> String {
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.header);
        out.push('\n');
        let seq = r.sequence.as_str();
        if width == 0 {
            out.push_str(seq);
            out.push('\n');
            continue;
        }
        for chunk in seq.as_bytes().chunks(width) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii"));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_multi_line_records() {
        let r = parse_fasta(">x\nMKV").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].header, "x");
        assert_eq!(r[0].sequence.as_str(), "MKV");

        let r = parse_fasta(">a\nMK\nVL\n>b\nACD").unwrap();
        let seqs: Vec<_> = r.iter().map(|r| r.sequence.as_str()).collect();
        assert_eq!(seqs, ["MKVL", "ACD"]);
    }

    #[test]
    fn lowercase_and_whitespace_are_normalized() {
        let r = parse_fasta(">x desc\n mk v \r\n").unwrap();
        assert_eq!(r[0].sequence.as_str(), "MKV");
        assert_eq!(r[0].header, "x desc");
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_fasta(">x\nMKZ"),
            Err(ProteinError::InvalidResidue {
                line: 2,
                column: 3,
                ch: 'Z'
            })
        ));
        assert!(matches!(
            parse_fasta(">x\n>y\nMK"),
            Err(ProteinError::EmptyRecord { line: 1, .. })
        ));
        assert!(matches!(
            parse_fasta("MK\n>x\nM"),
            Err(ProteinError::MissingHeader { line: 1 })
        ));
        assert!(parse_fasta("").unwrap().is_empty());
    }

    #[test]
    fn write_then_parse_is_identity() {
        let r = parse_fasta(">a\nMKVLACDEFGHIKLMNPQRSTVWY\n>b\nAC").unwrap();
        for width in [0, 1, 5, 60] {
            assert_eq!(parse_fasta(&write_fasta(&r, width)).unwrap(), r);
        }
    }
}
