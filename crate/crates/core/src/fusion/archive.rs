//! "IBMT v1" tensor archives: a magic line, then for each tensor a header
//! line `tensor <name> <rank> <dim...>` followed by one line of row-major
//! values.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayD, IxDyn};

use super::FusionError;

pub const ARCHIVE_MAGIC: &str = "IBMT v1";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorArchive {
    tensors: Vec<(String, ArrayD<f64>)>,
}

impl TensorArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a tensor, replacing any earlier one of the same name.
    pub fn insert(&mut self, name: &str, tensor: ArrayD<f64>) {
        match self.tensors.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = tensor,
            None => self.tensors.push((name.to_string(), tensor)),
        }
    }

    pub fn insert_scalar(&mut self, name: &str, value: f64) {
        self.insert(name, ArrayD::from_elem(IxDyn(&[]), value));
    }

    pub fn insert_vector(&mut self, name: &str, v: &Array1<f64>) {
        self.insert(name, v.clone().into_dyn());
    }

    pub fn insert_matrix(&mut self, name: &str, m: &Array2<f64>) {
        self.insert(name, m.clone().into_dyn());
    }

    pub fn get(&self, name: &str) -> Option<&ArrayD<f64>> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    fn require(&self, name: &str) -> Result<&ArrayD<f64>, FusionError> {
        self.get(name)
            .ok_or_else(|| FusionError::MissingTensor(name.to_string()))
    }

    pub fn scalar(&self, name: &str) -> Result<f64, FusionError> {
        let t = self.require(name)?;
        if t.ndim() != 0 {
            return Err(FusionError::TensorRank {
                name: name.to_string(),
                expected: 0,
                found: t.ndim(),
            });
        }
        Ok(t.iter().copied().next().unwrap_or_default())
    }

    pub fn vector(&self, name: &str) -> Result<Array1<f64>, FusionError> {
        let t = self.require(name)?;
        t.clone()
            .into_dimensionality()
            .map_err(|_| FusionError::TensorRank {
                name: name.to_string(),
                expected: 1,
                found: t.ndim(),
            })
    }

    pub fn matrix(&self, name: &str) -> Result<Array2<f64>, FusionError> {
        let t = self.require(name)?;
        t.clone()
            .into_dimensionality()
            .map_err(|_| FusionError::TensorRank {
                name: name.to_string(),
                expected: 2,
                found: t.ndim(),
            })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(ARCHIVE_MAGIC);
        out.push('\n');
        for (name, t) in &self.tensors {
            write!(out, "tensor {name} {}", t.ndim()).unwrap();
            for d in t.shape() {
                write!(out, " {d}").unwrap();
            }
            out.push('\n');
            let mut first = true;
            for v in t.iter() {
                if !first {
                    out.push(' ');
                }
                first = false;
                // Shortest representation that parses back to the same f64.
                write!(out, "{v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FusionError> {
        let bad = |line: usize, message: &str| FusionError::Archive {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim() == ARCHIVE_MAGIC => {}
            _ => return Err(bad(1, "missing IBMT v1 header")),
        }
        let mut archive = TensorArchive::new();
        while let Some((n, header)) = lines.next() {
            if header.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = header.split_whitespace().collect();
            if fields.len() < 3 || fields[0] != "tensor" {
                return Err(bad(n, "expected `tensor <name> <rank> <dims>`"));
            }
            let name = fields[1];
            let rank: usize = fields[2]
                .parse()
                .map_err(|_| bad(n, "rank is not an integer"))?;
            if fields.len() != 3 + rank {
                return Err(bad(n, "dimension count does not match rank"));
            }
            let dims = fields[3..]
                .iter()
                .map(|d| d.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad(n, "dimension is not an integer"))?;
            let (m, data) = lines.next().ok_or_else(|| bad(n, "missing data line"))?;
            let values = data
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad(m, "value is not a number"))?;
            let t = ArrayD::from_shape_vec(IxDyn(&dims), values)
                .map_err(|_| bad(m, "value count does not match shape"))?;
            if archive.get(name).is_some() {
                return Err(bad(n, "duplicate tensor name"));
            }
            archive.insert(name, t);
        }
        Ok(archive)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FusionError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FusionError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
