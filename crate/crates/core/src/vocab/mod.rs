//! Expanded biomolecular vocabulary, modality tokenizers and model input
//! layout.

mod input;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::molgraph::{bonding_capacity, Element, ElementTable, SelfiesString};
use crate::protseq::{ProteinSequence, AMINO_ACIDS};

pub use input::{form_input, Entity, FormedInput, Segment};

pub const SPECIAL_TOKENS: [&str; 8] = [
    "<SELFIES>",
    "</SELFIES>",
    "<FASTA>",
    "</FASTA>",
    "<MOL>",
    "</MOL>",
    "<PROT>",
    "</PROT>",
];

pub const PROTEIN_PREFIX: &str = "<p>";

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("token {token} at position {position} is not in the vocabulary")]
    OutOfVocabulary { token: String, position: usize },
    #[error("unknown token id {0}")]
    UnknownId(u32),
    #[error(
        "line {line}: token {token:?} is neither special, protein nor a bracketed molecule token"
    )]
    InvalidToken { token: String, line: usize },
    #[error("line {line}: duplicate token {token:?}")]
    DuplicateToken { token: String, line: usize },
    #[error("feature slots need at least one query (n_q = 0)")]
    NoQueries,
    #[error("malformed input layout: {0}")]
    Layout(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Special,
    Molecule,
    Protein,
}

/// Class of a token string, decided by its shape alone, so the three
/// classes can never overlap.
pub fn classify_token(token: &str) -> Option<TokenClass> {
    if SPECIAL_TOKENS.contains(&token) {
        return Some(TokenClass::Special);
    }
    if let Some(rest) = token.strip_prefix(PROTEIN_PREFIX) {
        let b = rest.as_bytes();
        return (b.len() == 1 && AMINO_ACIDS.contains(&b[0])).then_some(TokenClass::Protein);
    }
    let inner = token.strip_prefix('[')?.strip_suffix(']')?;
    let well_formed = !inner.is_empty()
        && !inner.contains(['[', ']'])
        && inner.bytes().all(|c| c.is_ascii_graphic());
    well_formed.then_some(TokenClass::Molecule)
}

/// Bijective token/id table. Ids are line numbers in the vocabulary file.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    classes: Vec<TokenClass>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn empty() -> Self {
        Vocabulary {
            tokens: Vec::new(),
            classes: Vec::new(),
            ids: HashMap::new(),
        }
    }

    /// Special tokens, the 20 residue tokens, then the SELFIES alphabet.
    pub fn standard() -> Self {
        let mut v = Vocabulary::empty();
        for t in SPECIAL_TOKENS {
            v.insert(t, 0).expect("special token");
        }
        for &aa in &AMINO_ACIDS {
            v.insert(&format!("{PROTEIN_PREFIX}{}", aa as char), 0)
                .expect("residue token");
        }
        for t in selfies_alphabet() {
            v.insert(&t, 0).expect("molecule token");
        }
        v
    }

    fn insert(&mut self, token: &str, line: usize) -> Result<u32, VocabError> {
        let class = classify_token(token).ok_or_else(|| VocabError::InvalidToken {
            token: token.to_string(),
            line,
        })?;
        if self.ids.contains_key(token) {
            return Err(VocabError::DuplicateToken {
                token: token.to_string(),
                line,
            });
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_string());
        self.classes.push(class);
        self.ids.insert(token.to_string(), id);
        Ok(id)
    }

    /// Id of `token`, adding it first if it is a well-formed token not yet
    /// present.
    pub fn get_or_insert(&mut self, token: &str) -> Result<u32, VocabError> {
        match self.ids.get(token) {
            Some(&id) => Ok(id),
            None => self.insert(token, 0),
        }
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn class(&self, id: u32) -> Option<TokenClass> {
        self.classes.get(id as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// One token per line; line `i` (0-based) gets id `i`.
    pub fn from_text(text: &str) -> Result<Self, VocabError> {
        let mut v = Vocabulary::empty();
        for (idx, line) in text.lines().enumerate() {
            v.insert(line.trim_end_matches('\r'), idx + 1)?;
        }
        Ok(v)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, VocabError> {
        Vocabulary::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), VocabError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::standard()
    }
}

impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenClass::Special => "special",
            TokenClass::Molecule => "molecule",
            TokenClass::Protein => "protein",
        })
    }
}

/// Atom tokens for every supported element (neutral, common charges and
/// explicit-hydrogen forms) with each bond prefix the atom can accept,
/// followed by the branch and ring tokens.
pub fn selfies_alphabet() -> Vec<String> {
    let table = ElementTable::standard();
    let mut forms: Vec<(Element, i8, Option<u8>)> = Vec::new();
    for e in table.elements() {
        forms.push((e, 0, None));
    }
    for e in [
        Element::C,
        Element::N,
        Element::O,
        Element::S,
        Element::P,
        Element::B,
    ] {
        forms.push((e, 1, None));
        forms.push((e, -1, None));
    }
    for (e, h, q) in [
        (Element::C, 1, 0),
        (Element::C, 2, 0),
        (Element::N, 1, 0),
        (Element::N, 1, 1),
        (Element::N, 2, 1),
        (Element::N, 3, 1),
        (Element::O, 1, 0),
        (Element::S, 1, 0),
        (Element::P, 1, 0),
        (Element::SE, 1, 0),
        (Element::SI, 1, 0),
    ] {
        forms.push((e, q, Some(h)));
    }
    let mut out = Vec::new();
    for (e, q, h) in forms {
        let Some(cap) = bonding_capacity(&table, e, q) else {
            continue;
        };
        let cap = cap.saturating_sub(h.unwrap_or(0));
        let mut body = e.symbol().to_string();
        if let Some(h) = h {
            body.push_str(&format!("H{h}"));
        }
        if q != 0 {
            body.push_str(&format!("{q:+}"));
        }
        for (order, prefix) in [(1, ""), (2, "="), (3, "#")] {
            if order <= cap {
                out.push(format!("[{prefix}{body}]"));
            }
        }
    }
    for kind in ["Branch", "Ring"] {
        for n in 1..=3 {
            for prefix in ["", "=", "#"] {
                out.push(format!("[{prefix}{kind}{n}]"));
            }
        }
    }
    out
}

fn lookup(vocab: &Vocabulary, token: &str, position: usize) -> Result<u32, VocabError> {
    vocab.id(token).ok_or_else(|| VocabError::OutOfVocabulary {
        token: token.to_string(),
        position,
    })
}

/// One id per SELFIES bracket group.
pub fn tokenize_molecule(vocab: &Vocabulary, s: &SelfiesString) -> Result<Vec<u32>, VocabError> {
    s.tokens()
        .iter()
        .enumerate()
        .map(|(i, t)| lookup(vocab, t, i))
        .collect()
}

/// Like [`tokenize_molecule`] but adds unseen bracket groups to `vocab`.
pub fn tokenize_molecule_extending(
    vocab: &mut Vocabulary,
    s: &SelfiesString,
) -> Result<Vec<u32>, VocabError> {
    s.tokens().iter().map(|t| vocab.get_or_insert(t)).collect()
}

/// One `<p>` token id per residue.
pub fn tokenize_protein(vocab: &Vocabulary, p: &ProteinSequence) -> Result<Vec<u32>, VocabError> {
    p.as_bytes()
        .iter()
        .enumerate()
        .map(|(i, &c)| lookup(vocab, &format!("{PROTEIN_PREFIX}{}", c as char), i))
        .collect()
}

/// Concatenates tokens; protein tokens lose their `<p>` prefix.
pub fn detokenize(vocab: &Vocabulary, ids: &[u32]) -> Result<String, VocabError> {
    let mut out = String::new();
    for &id in ids {
        let token = vocab.token(id).ok_or(VocabError::UnknownId(id))?;
        match vocab.class(id) {
            Some(TokenClass::Protein) => out.push_str(&token[PROTEIN_PREFIX.len()..]),
            _ => out.push_str(token),
        }
    }
    Ok(out)
}
