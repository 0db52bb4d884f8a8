use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::molgraph::{decode_selfies, parse_selfies};
use crate::protseq::validate_protein;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Selfies,
    Protein,
    Text,
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PayloadKind::Selfies => "selfies",
            PayloadKind::Protein => "protein",
            PayloadKind::Text => "text",
        })
    }
}

/// Input and output kinds of a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    pub input: PayloadKind,
    pub output: PayloadKind,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.input, self.output)
    }
}

const fn dir(input: PayloadKind, output: PayloadKind) -> Direction {
    Direction { input, output }
}

use PayloadKind::{Protein as P, Selfies as M, Text as T};

/// Known sub-datasets and their directions.
pub const TASK_DIRECTIONS: [(&str, Direction); 16] = [
    ("PubChem-caption", dir(M, T)),
    ("PubChem-generation", dir(T, M)),
    ("ChEBI-caption", dir(M, T)),
    ("ChEBI-generation", dir(T, M)),
    ("TrEMBL_Name", dir(P, T)),
    ("TrEMBL_Family", dir(P, T)),
    ("TrEMBL_Location", dir(P, T)),
    ("TrEMBL_Function", dir(P, T)),
    ("TrEMBL_Description", dir(T, P)),
    ("SwissProt_Name", dir(P, T)),
    ("SwissProt_Family", dir(P, T)),
    ("SwissProt_Location", dir(P, T)),
    ("SwissProt_Function", dir(P, T)),
    ("SwissProt_Description", dir(T, P)),
    ("BindingDB", dir(P, M)),
    ("Rhea", dir(M, P)),
];

pub fn direction_of(task_id: &str) -> Option<Direction> {
    TASK_DIRECTIONS
        .iter()
        .find(|(t, _)| *t == task_id)
        .map(|(_, d)| *d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    #[serde(default)]
    pub task_id: String,
    pub instruction: String,
    pub input_kind: PayloadKind,
    pub input: String,
    pub output_kind: PayloadKind,
    pub output: String,
}

impl InstructionRecord {
    pub fn direction(&self) -> Direction {
        dir(self.input_kind, self.output_kind)
    }
}

/// Checks one payload against its declared kind.
pub fn validate_payload(kind: PayloadKind, payload: &str) -> Result<(), String> {
    match kind {
        PayloadKind::Selfies => {
            let s = parse_selfies(payload).map_err(|e| e.to_string())?;
            decode_selfies(&s).map(|_| ()).map_err(|e| e.to_string())
        }
        PayloadKind::Protein if validate_protein(payload) => Ok(()),
        PayloadKind::Protein => Err(format!("invalid protein sequence {payload:?}")),
        PayloadKind::Text if payload.trim().is_empty() => Err("empty text payload".into()),
        PayloadKind::Text => Ok(()),
    }
}

fn validate(record: &InstructionRecord, index: usize) -> Result<(), PipelineError> {
    let bad = |message: String| PipelineError::Validation {
        record: index,
        message,
    };
    if record.task_id.is_empty() {
        return Err(bad("missing task_id".into()));
    }
    if let Some(expected) = direction_of(&record.task_id) {
        if expected != record.direction() {
            return Err(bad(format!(
                "{} expects {expected}, record is {}",
                record.task_id,
                record.direction()
            )));
        }
    }
    if record.instruction.trim().is_empty() {
        return Err(bad("empty instruction".into()));
    }
    validate_payload(record.input_kind, &record.input).map_err(|m| bad(format!("input: {m}")))?;
    validate_payload(record.output_kind, &record.output)
        .map_err(|m| bad(format!("output: {m}")))?;
    Ok(())
}

/// Parses JSON Lines records, one per non-blank line. When `task_id` is
/// given, records without one inherit it and records naming another task
/// are rejected. Record indices in errors count from 0 over non-blank lines.
pub fn parse_records(
    text: &str,
    task_id: Option<&str>,
) -> Result<Vec<InstructionRecord>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut r: InstructionRecord =
            serde_json::from_str(line).map_err(|e| PipelineError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        let index = out.len();
        if let Some(t) = task_id {
            if r.task_id.is_empty() {
                r.task_id = t.to_string();
            } else if r.task_id != t {
                return Err(PipelineError::Validation {
                    record: index,
                    message: format!("task_id {} where {t} was expected", r.task_id),
                });
            }
        }
        validate(&r, index)?;
        out.push(r);
    }
    Ok(out)
}

pub fn load_records(
    path: impl AsRef<Path>,
    task_id: Option<&str>,
) -> Result<Vec<InstructionRecord>, PipelineError> {
    parse_records(&std::fs::read_to_string(path)?, task_id)
}

pub fn write_records(records: &[InstructionRecord]) -> Result<String, PipelineError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW: &str = r#"{"task_id":"ChEBI-generation","instruction":"Generate a molecule in SELFIES that fits the provided description.","input_kind":"text","input":"A molecule.","output_kind":"selfies","output":"[C][C][O]"}"#;

    #[test]
    fn parses_and_round_trips() {
        let recs = parse_records(&format!("{ROW}\n\n"), None).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].direction().to_string(), "text->selfies");
        assert_eq!(
            parse_records(&write_records(&recs).unwrap(), None).unwrap(),
            recs
        );
        assert!(parse_records("", None).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_payloads() {
        let prot = r#"{"task_id":"SwissProt_Name","instruction":"Name?","input_kind":"protein","input":"MKZ","output_kind":"text","output":"x"}"#;
        assert!(matches!(
            parse_records(prot, None),
            Err(PipelineError::Validation { record: 0, .. })
        ));
        let flipped = ROW.replace("\"input_kind\":\"text\"", "\"input_kind\":\"protein\"");
        assert!(matches!(
            parse_records(&flipped, None),
            Err(PipelineError::Validation { .. })
        ));
        let mol = ROW.replace("[C][C][O]", "[C][Xx]");
        assert!(parse_records(&mol, None).is_err());
        assert!(matches!(
            parse_records("{", None),
            Err(PipelineError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn task_id_argument() {
        let anon = ROW.replace("\"task_id\":\"ChEBI-generation\",", "");
        let recs = parse_records(&anon, Some("ChEBI-generation")).unwrap();
        assert_eq!(recs[0].task_id, "ChEBI-generation");
        assert!(parse_records(&anon, None).is_err());
        assert!(parse_records(ROW, Some("Rhea")).is_err());
    }
}
