//! Motif-guided multimodal fusion: per-modality featurizers, projection and
//! concatenation of token features, and an encoder-decoder that turns them
//! plus a motif prompt into a fixed number of feature rows.

mod archive;
mod featurize;
mod model;
mod weights;

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use thiserror::Error;

use crate::motif::MotifError;

pub use archive::{TensorArchive, ARCHIVE_MAGIC};
pub use featurize::{
    featurize, EncoderRegistry, FusionEntity, ModalityEncoder, Mol2dEncoder, Mol3dEncoder,
    Prot1dEncoder, Prot3dEncoder, MOL2D_DIM, MOL3D_DIM, ONE_HOT_ELEMENTS, PROT1D_DIM, PROT3D_DIM,
};
pub use model::{
    fuse, fuse_molecule, fuse_protein, fuse_with_trace, gelu, layer_norm, project_concat,
    FusionTrace, MultimodalFeatures, LAYER_NORM_EPS,
};
pub use weights::{
    Attention, DecoderLayer, EncoderLayer, FeedForward, FusionConfig, FusionWeights, LayerNorm,
    Linear, Projection,
};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("{0} features need coordinates")]
    MissingCoordinates(ModalityKind),
    #[error("{kind} features cannot be computed from a {entity}")]
    EntityMismatch {
        kind: ModalityKind,
        entity: &'static str,
    },
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {0}")]
    NonFiniteWeights(String),
    #[error("non-finite feature value")]
    NonFiniteFeatures,
    #[error("no tokens to fuse")]
    EmptyTokens,
    #[error("unknown modality {0}")]
    UnknownModality(String),
    #[error("tensor {0} missing from archive")]
    MissingTensor(String),
    #[error("tensor {name} has rank {found}, expected {expected}")]
    TensorRank {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("archive line {line}: {message}")]
    Archive { line: usize, message: String },
    #[error(transparent)]
    Motif(#[from] MotifError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModalityKind {
    Mol2d,
    Mol3d,
    Prot1d,
    Prot3d,
}

impl ModalityKind {
    pub const ALL: [ModalityKind; 4] = [
        ModalityKind::Mol2d,
        ModalityKind::Mol3d,
        ModalityKind::Prot1d,
        ModalityKind::Prot3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModalityKind::Mol2d => "mol2d",
            ModalityKind::Mol3d => "mol3d",
            ModalityKind::Prot1d => "prot1d",
            ModalityKind::Prot3d => "prot3d",
        }
    }
}

impl fmt::Display for ModalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModalityKind {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModalityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| FusionError::UnknownModality(s.to_string()))
    }
}

/// Per-token features of one modality.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalityEmbedding {
    kind: ModalityKind,
    matrix: Array2<f64>,
}

impl ModalityEmbedding {
    pub fn new(kind: ModalityKind, matrix: Array2<f64>) -> Result<Self, FusionError> {
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(FusionError::NonFiniteFeatures);
        }
        Ok(ModalityEmbedding { kind, matrix })
    }

    pub fn kind(&self) -> ModalityKind {
        self.kind
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// Same features with tokens reordered: row `i` of the result is row
    /// `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        ModalityEmbedding {
            kind: self.kind,
            matrix: self.matrix.select(ndarray::Axis(0), order),
        }
    }
}
