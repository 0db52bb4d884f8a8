//! Model input layout: marker tokens around the multimodal feature slot and
//! the tokenized sequence.

use serde::{Deserialize, Serialize};

use super::{VocabError, PROTEIN_PREFIX};
use crate::molgraph::SelfiesString;
use crate::protseq::ProteinSequence;

#[derive(Debug, Clone, Copy)]
pub enum Entity<'a> {
    Molecule(&'a SelfiesString),
    Protein(&'a ProteinSequence),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum Segment {
    Special(String),
    MoleculeToken(String),
    ProteinToken(String),
    /// Number of fused feature vectors (1 + N_q) placed here.
    FeatureSlot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormedInput {
    segments: Vec<Segment>,
}

/// Layout for one entity:
/// `<MOL> slot(1+n_q) </MOL> <SELFIES> tokens </SELFIES>` for molecules and
/// the `<PROT>`/`<FASTA>` analogue for proteins. The feature block is left
/// out when `include_features` is false.
pub fn form_input(
    entity: Entity<'_>,
    include_features: bool,
    n_q: usize,
) -> Result<FormedInput, VocabError> {
    if include_features && n_q == 0 {
        return Err(VocabError::NoQueries);
    }
    let (feat, seq) = match entity {
        Entity::Molecule(_) => (("<MOL>", "</MOL>"), ("<SELFIES>", "</SELFIES>")),
        Entity::Protein(_) => (("<PROT>", "</PROT>"), ("<FASTA>", "</FASTA>")),
    };
    let special = |s: &str| Segment::Special(s.to_string());
    let mut segments = Vec::new();
    if include_features {
        segments.push(special(feat.0));
        segments.push(Segment::FeatureSlot(1 + n_q));
        segments.push(special(feat.1));
    }
    segments.push(special(seq.0));
    match entity {
        Entity::Molecule(s) => {
            segments.extend(s.tokens().iter().cloned().map(Segment::MoleculeToken))
        }
        Entity::Protein(p) => segments.extend(
            p.as_bytes()
                .iter()
                .map(|&c| Segment::ProteinToken(format!("{PROTEIN_PREFIX}{}", c as char))),
        ),
    }
    segments.push(special(seq.1));
    Ok(FormedInput { segments })
}

impl FormedInput {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Checks marker nesting and that feature slots sit directly inside a
    /// `<MOL>` or `<PROT>` block.
    pub fn validate(&self) -> Result<(), VocabError> {
        let mut open: Vec<&str> = Vec::new();
        for seg in &self.segments {
            match seg {
                Segment::Special(s) => {
                    if let Some(name) = s.strip_prefix("</") {
                        match open.pop() {
                            Some(o) if o.strip_prefix('<') == Some(name) => {}
                            _ => return Err(VocabError::Layout(format!("unmatched {s}"))),
                        }
                    } else {
                        open.push(s);
                    }
                }
                Segment::FeatureSlot(_) => {
                    if !matches!(open.last(), Some(&"<MOL>" | &"<PROT>")) {
                        return Err(VocabError::Layout(
                            "feature slot outside <MOL>/<PROT>".into(),
                        ));
                    }
                }
                Segment::MoleculeToken(_) | Segment::ProteinToken(_) => {}
            }
        }
        match open.last() {
            Some(o) => Err(VocabError::Layout(format!("unclosed {o}"))),
            None => Ok(()),
        }
    }

    /// JSON Lines, one `{kind, payload}` object per segment.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            out.push_str(&serde_json::to_string(seg).expect("segment serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, VocabError> {
        let segments = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<Segment>, _>>()?;
        let input = FormedInput { segments };
        input.validate()?;
        Ok(input)
    }
}
