//! Reference per-token featurizers for each modality, selectable by name.

use std::collections::BTreeMap;

use ndarray::Array2;

use super::{FusionError, ModalityEmbedding, ModalityKind};
use crate::molgraph::{Element, MolecularGraph};
use crate::protseq::{residue_index, ProteinSequence, ProteinStructure, AMINO_ACIDS};

/// Elements with their own one-hot column; anything else lands in the slot
/// after them.
pub const ONE_HOT_ELEMENTS: [Element; 12] = [
    Element::B,
    Element::C,
    Element::N,
    Element::O,
    Element::F,
    Element::SI,
    Element::P,
    Element::S,
    Element::CL,
    Element::SE,
    Element::BR,
    Element::I,
];

pub const MOL2D_DIM: usize = ONE_HOT_ELEMENTS.len() + 1 + 3;
pub const MOL3D_DIM: usize = MOL2D_DIM + 3;
pub const PROT1D_DIM: usize = AMINO_ACIDS.len() + 1;
pub const PROT3D_DIM: usize = PROT1D_DIM + 3;

/// What a featurizer is applied to.
#[derive(Debug, Clone, Copy)]
pub enum FusionEntity<'a> {
    Molecule(&'a MolecularGraph),
    Protein(&'a ProteinSequence),
    Structure(&'a ProteinStructure),
}

impl<'a> FusionEntity<'a> {
    fn describe(&self) -> &'static str {
        match self {
            FusionEntity::Molecule(_) => "molecule",
            FusionEntity::Protein(_) => "protein sequence",
            FusionEntity::Structure(_) => "protein structure",
        }
    }

    fn sequence(&self) -> Option<&'a ProteinSequence> {
        match *self {
            FusionEntity::Protein(p) => Some(p),
            FusionEntity::Structure(s) => Some(s.sequence()),
            FusionEntity::Molecule(_) => None,
        }
    }
}

pub trait ModalityEncoder: Send + Sync {
    fn kind(&self) -> ModalityKind;
    /// Feature columns per token.
    fn dim(&self) -> usize;
    fn featurize(&self, entity: FusionEntity<'_>) -> Result<ModalityEmbedding, FusionError>;
}

fn wrong_entity(kind: ModalityKind, entity: FusionEntity<'_>) -> FusionError {
    FusionError::EntityMismatch {
        kind,
        entity: entity.describe(),
    }
}

/// Mean, min and max distance from each point to every other point; zeros
/// for a single point.
fn distance_summary(points: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let n = points.len();
    (0..n)
        .map(|i| {
            if n == 1 {
                return [0.0; 3];
            }
            let (mut sum, mut lo, mut hi) = (0.0, f64::INFINITY, 0.0f64);
            for j in (0..n).filter(|&j| j != i) {
                let d = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                sum += d;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            [sum / (n - 1) as f64, lo, hi]
        })
        .collect()
}

fn mol2d_rows(g: &MolecularGraph) -> Array2<f64> {
    let mut m = Array2::zeros((g.atom_count(), MOL2D_DIM));
    for (i, atom) in g.atoms().iter().enumerate() {
        let col = ONE_HOT_ELEMENTS
            .iter()
            .position(|&e| e == atom.element)
            .unwrap_or(ONE_HOT_ELEMENTS.len());
        m[[i, col]] = 1.0;
        let base = ONE_HOT_ELEMENTS.len() + 1;
        m[[i, base]] = g.degree(i) as f64;
        m[[i, base + 1]] = f64::from(atom.formal_charge);
        m[[i, base + 2]] = f64::from(u8::from(atom.aromatic));
    }
    m
}

fn prot1d_rows(p: &ProteinSequence) -> Array2<f64> {
    let n = p.len();
    let mut m = Array2::zeros((n, PROT1D_DIM));
    for (i, &c) in p.as_bytes().iter().enumerate() {
        if let Some(col) = residue_index(c) {
            m[[i, col]] = 1.0;
        }
        m[[i, AMINO_ACIDS.len()]] = if n > 1 {
            i as f64 / (n - 1) as f64
        } else {
            0.0
        };
    }
    m
}

fn append_columns(base: Array2<f64>, extra: &[[f64; 3]]) -> Array2<f64> {
    let (n, d) = base.dim();
    let mut m = Array2::zeros((n, d + 3));
    m.slice_mut(ndarray::s![.., ..d]).assign(&base);
    for (i, e) in extra.iter().enumerate() {
        for k in 0..3 {
            m[[i, d + k]] = e[k];
        }
    }
    m
}

/// Element one-hot with an "other" slot, then degree, formal charge and
/// aromatic flag.
pub struct Mol2dEncoder;

impl ModalityEncoder for Mol2dEncoder {
    fn kind(&self) -> ModalityKind {
        ModalityKind::Mol2d
    }

    fn dim(&self) -> usize {
        MOL2D_DIM
    }

    fn featurize(&self, entity: FusionEntity<'_>) -> Result<ModalityEmbedding, FusionError> {
        match entity {
            FusionEntity::Molecule(g) => ModalityEmbedding::new(self.kind(), mol2d_rows(g)),
            other => Err(wrong_entity(self.kind(), other)),
        }
    }
}

/// mol2d features plus per-atom mean, min and max interatomic distance.
pub struct Mol3dEncoder;

impl ModalityEncoder for Mol3dEncoder {
    fn kind(&self) -> ModalityKind {
        ModalityKind::Mol3d
    }

    fn dim(&self) -> usize {
        MOL3D_DIM
    }

    fn featurize(&self, entity: FusionEntity<'_>) -> Result<ModalityEmbedding, FusionError> {
        let FusionEntity::Molecule(g) = entity else {
            return Err(wrong_entity(self.kind(), entity));
        };
        let coords = g
            .coordinates()
            .ok_or(FusionError::MissingCoordinates(self.kind()))?;
        ModalityEmbedding::new(
            self.kind(),
            append_columns(mol2d_rows(g), &distance_summary(coords)),
        )
    }
}

/// Residue one-hot plus position scaled to [0, 1].
pub struct Prot1dEncoder;

impl ModalityEncoder for Prot1dEncoder {
    fn kind(&self) -> ModalityKind {
        ModalityKind::Prot1d
    }

    fn dim(&self) -> usize {
        PROT1D_DIM
    }

    fn featurize(&self, entity: FusionEntity<'_>) -> Result<ModalityEmbedding, FusionError> {
        let p = entity
            .sequence()
            .ok_or_else(|| wrong_entity(self.kind(), entity))?;
        ModalityEmbedding::new(self.kind(), prot1d_rows(p))
    }
}

/// prot1d features plus per-residue mean, min and max CA-CA distance.
pub struct Prot3dEncoder;

impl ModalityEncoder for Prot3dEncoder {
    fn kind(&self) -> ModalityKind {
        ModalityKind::Prot3d
    }

    fn dim(&self) -> usize {
        PROT3D_DIM
    }

    fn featurize(&self, entity: FusionEntity<'_>) -> Result<ModalityEmbedding, FusionError> {
        match entity {
            FusionEntity::Structure(s) => ModalityEmbedding::new(
                self.kind(),
                append_columns(prot1d_rows(s.sequence()), &distance_summary(&s.ca())),
            ),
            FusionEntity::Protein(_) => Err(FusionError::MissingCoordinates(self.kind())),
            FusionEntity::Molecule(_) => Err(wrong_entity(self.kind(), entity)),
        }
    }
}

/// Featurizers keyed by modality.
pub struct EncoderRegistry {
    encoders: BTreeMap<ModalityKind, Box<dyn ModalityEncoder>>,
}

impl EncoderRegistry {
    pub fn empty() -> Self {
        EncoderRegistry {
            encoders: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Mol2dEncoder));
        r.register(Box::new(Mol3dEncoder));
        r.register(Box::new(Prot1dEncoder));
        r.register(Box::new(Prot3dEncoder));
        r
    }

    pub fn register(&mut self, encoder: Box<dyn ModalityEncoder>) {
        self.encoders.insert(encoder.kind(), encoder);
    }

    pub fn get(&self, kind: ModalityKind) -> Result<&dyn ModalityEncoder, FusionError> {
        self.encoders
            .get(&kind)
            .map(|b| b.as_ref())
            .ok_or_else(|| FusionError::UnknownModality(kind.to_string()))
    }

    pub fn kinds(&self) -> Vec<ModalityKind> {
        self.encoders.keys().copied().collect()
    }

    pub fn featurize(
        &self,
        entity: FusionEntity<'_>,
        kind: ModalityKind,
    ) -> Result<ModalityEmbedding, FusionError> {
        self.get(kind)?.featurize(entity)
    }
}

/// Featurizes with the standard encoders.
pub fn featurize(
    entity: FusionEntity<'_>,
    kind: ModalityKind,
) -> Result<ModalityEmbedding, FusionError> {
    EncoderRegistry::standard().featurize(entity, kind)
}
