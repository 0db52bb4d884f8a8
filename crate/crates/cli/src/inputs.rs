//! File readers shared by the subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{Map, Value};

use biomol_core::metrics::SubstitutionMatrix;
use biomol_core::motif::MotifDictionary;

pub const DATA_DIR_VAR: &str = "IBM_DATA_DIR";

/// `explicit` if given, else `$IBM_DATA_DIR/<name>` when that file exists.
fn data_file(explicit: Option<&Path>, name: &str) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let p = PathBuf::from(std::env::var_os(DATA_DIR_VAR)?).join(name);
    p.is_file().then_some(p)
}

pub fn motif_dictionary(explicit: Option<&Path>) -> Result<MotifDictionary> {
    match data_file(explicit, "motifs.txt") {
        Some(p) => MotifDictionary::load(&p).with_context(|| format!("reading {}", p.display())),
        None => Ok(MotifDictionary::bundled()),
    }
}

pub fn substitution_matrix(explicit: Option<&Path>) -> Result<SubstitutionMatrix> {
    match data_file(explicit, "blosum45.txt") {
        Some(p) => SubstitutionMatrix::load(&p).with_context(|| format!("reading {}", p.display())),
        None => Ok(SubstitutionMatrix::blosum45()),
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Non-blank lines, trimmed.
pub fn lines(path: &Path) -> Result<Vec<String>> {
    Ok(read(path)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

/// Sequences from FASTA (when the first non-blank line is a header) or one
/// per line. Residues are not checked here so invalid hypotheses can be
/// counted rather than rejected.
pub fn sequences(path: &Path) -> Result<Vec<String>> {
    let text = read(path)?;
    let is_fasta = text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.starts_with('>'));
    if !is_fasta {
        return Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect());
    }
    let mut out: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.starts_with('>') {
            out.push(String::new());
        } else if let Some(last) = out.last_mut() {
            last.extend(line.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_ascii_uppercase()));
        }
    }
    Ok(out)
}

/// Score rows from JSON Lines, or CSV when the path ends in `.csv`. CSV
/// cells that parse as numbers become numbers.
pub fn score_rows(path: &Path) -> Result<Vec<Value>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
        let headers = reader.headers()?.clone();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let mut row = Map::new();
            for (h, cell) in headers.iter().zip(record.iter()) {
                let v = match cell.trim().parse::<f64>() {
                    Ok(x) => Value::from(x),
                    Err(_) => Value::from(cell),
                };
                row.insert(h.to_string(), v);
            }
            rows.push(Value::Object(row));
        }
        return Ok(rows);
    }
    let mut rows = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(rows)
}

/// Three numbers per line; blank lines and `#` comments skipped.
pub fn coordinates(path: &Path) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: Vec<f64> = t
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        if v.len() != 3 {
            bail!("{}:{}: expected 3 numbers, found {}", path.display(), i + 1, v.len());
        }
        out.push([v[0], v[1], v[2]]);
    }
    Ok(out)
}
