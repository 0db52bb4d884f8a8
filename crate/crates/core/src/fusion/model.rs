//! Forward pass: modality projection and concatenation, then a pre-LN
//! Transformer encoder over the tokens and a decoder over the motif prompt
//! and learnable queries.

use ndarray::{concatenate, s, Array1, Array2, Axis};

use super::featurize::{EncoderRegistry, FusionEntity};
use super::weights::{Attention, FeedForward, FusionWeights, LayerNorm, Linear, Projection};
use super::{FusionError, ModalityEmbedding, ModalityKind};
use crate::molgraph::MolecularGraph;
use crate::motif::{fcfp, motif_prompt, protein_motif_vector, MotifDictionary, FCFP_RADIUS};
use crate::protseq::ProteinStructure;

pub const LAYER_NORM_EPS: f64 = 1e-5;

/// Z, one row for the prompt position followed by one per query.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodalFeatures {
    pub z: Array2<f64>,
}

impl MultimodalFeatures {
    pub fn rows(&self) -> usize {
        self.z.nrows()
    }
}

/// Attention probabilities per layer, then per head.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FusionTrace {
    pub encoder_self: Vec<Vec<Array2<f64>>>,
    pub decoder_self: Vec<Vec<Array2<f64>>>,
    pub decoder_cross: Vec<Vec<Array2<f64>>>,
}

pub fn layer_norm(x: &Array2<f64>, ln: &LayerNorm) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let n = row.len() as f64;
        let mean = row.sum() / n;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let inv = 1.0 / (var + LAYER_NORM_EPS).sqrt();
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - mean) * inv * ln.gain[j] + ln.bias[j];
        }
    }
    out
}

/// tanh approximation of GELU.
pub fn gelu(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
    0.5 * x * (1.0 + (C * (x + 0.044715 * x * x * x)).tanh())
}

fn linear(x: &Array2<f64>, l: &Linear) -> Array2<f64> {
    x.dot(&l.weight) + &l.bias
}

fn feed_forward(x: &Array2<f64>, ff: &FeedForward) -> Array2<f64> {
    linear(&linear(x, &ff.fc1).mapv(gelu), &ff.fc2)
}

fn softmax_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
}

/// Multi-head scaled dot-product attention of `x` over `memory`, without
/// masking. Heads are computed in order and written into their column
/// block before the output projection.
fn attention(
    x: &Array2<f64>,
    memory: &Array2<f64>,
    at: &Attention,
    n_heads: usize,
    trace: Option<&mut Vec<Array2<f64>>>,
) -> Array2<f64> {
    let q = linear(x, &at.wq);
    let k = linear(memory, &at.wk);
    let v = linear(memory, &at.wv);
    let d = q.ncols();
    let dh = d / n_heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut heads = Array2::zeros((x.nrows(), d));
    let mut maps = Vec::with_capacity(n_heads);
    for h in 0..n_heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let mut p = q.slice(cols).dot(&k.slice(cols).t()) * scale;
        softmax_rows(&mut p);
        heads.slice_mut(cols).assign(&p.dot(&v.slice(cols)));
        maps.push(p);
    }
    if let Some(t) = trace {
        t.extend(maps);
    }
    linear(&heads, &at.wo)
}

fn project(e: &ModalityEmbedding, p: &Projection) -> Array2<f64> {
    let x = layer_norm(e.matrix(), &p.norm);
    linear(&linear(&x, &p.fc1).mapv(gelu), &p.fc2)
}

/// Projects both embeddings into d and stacks them: rows of `a` first,
/// then rows of `b`.
pub fn project_concat(
    a: &ModalityEmbedding,
    b: &ModalityEmbedding,
    w: &FusionWeights,
) -> Result<Array2<f64>, FusionError> {
    if a.rows() != b.rows() {
        return Err(FusionError::DimensionMismatch {
            what: format!("{} tokens vs {} tokens", a.kind(), b.kind()),
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let mut parts = Vec::with_capacity(2);
    for e in [a, b] {
        let p = w.projection(e.kind())?;
        if e.dim() != p.norm.gain.len() {
            return Err(FusionError::DimensionMismatch {
                what: format!("{} feature width", e.kind()),
                expected: p.norm.gain.len(),
                found: e.dim(),
            });
        }
        parts.push(project(e, p));
    }
    Ok(concatenate(Axis(0), &[parts[0].view(), parts[1].view()]).expect("projections share d"))
}

pub fn fuse(
    h: &Array2<f64>,
    prompt: &Array1<f64>,
    w: &FusionWeights,
) -> Result<MultimodalFeatures, FusionError> {
    fuse_inner(h, prompt, w, None)
}

/// Like [`fuse`], also returning every attention map.
pub fn fuse_with_trace(
    h: &Array2<f64>,
    prompt: &Array1<f64>,
    w: &FusionWeights,
) -> Result<(MultimodalFeatures, FusionTrace), FusionError> {
    let mut trace = FusionTrace::default();
    let z = fuse_inner(h, prompt, w, Some(&mut trace))?;
    Ok((z, trace))
}

fn fuse_inner(
    h: &Array2<f64>,
    prompt: &Array1<f64>,
    w: &FusionWeights,
    mut trace: Option<&mut FusionTrace>,
) -> Result<MultimodalFeatures, FusionError> {
    w.validate()?;
    let d = w.d();
    if h.nrows() == 0 {
        return Err(FusionError::EmptyTokens);
    }
    if h.ncols() != d {
        return Err(FusionError::DimensionMismatch {
            what: "token width".into(),
            expected: d,
            found: h.ncols(),
        });
    }
    if prompt.len() != d {
        return Err(FusionError::DimensionMismatch {
            what: "prompt width".into(),
            expected: d,
            found: prompt.len(),
        });
    }
    let heads = w.n_heads;

    let mut x = h.clone();
    for layer in &w.encoder {
        let mut maps = Vec::new();
        let n = layer_norm(&x, &layer.norm1);
        x = x + attention(
            &n,
            &n,
            &layer.attn,
            heads,
            trace.is_some().then_some(&mut maps),
        );
        x = &x + &feed_forward(&layer_norm(&x, &layer.norm2), &layer.ff);
        if let Some(t) = trace.as_deref_mut() {
            t.encoder_self.push(maps);
        }
    }
    let memory = layer_norm(&x, &w.encoder_norm);

    let mut y = concatenate(
        Axis(0),
        &[prompt.view().insert_axis(Axis(0)), w.queries.view()],
    )
    .expect("queries have width d");
    for layer in &w.decoder {
        let (mut self_maps, mut cross_maps) = (Vec::new(), Vec::new());
        let n = layer_norm(&y, &layer.norm1);
        y = y + attention(
            &n,
            &n,
            &layer.self_attn,
            heads,
            trace.is_some().then_some(&mut self_maps),
        );
        let n = layer_norm(&y, &layer.norm2);
        y = y + attention(
            &n,
            &memory,
            &layer.cross_attn,
            heads,
            trace.is_some().then_some(&mut cross_maps),
        );
        y = &y + &feed_forward(&layer_norm(&y, &layer.norm3), &layer.ff);
        if let Some(t) = trace.as_deref_mut() {
            t.decoder_self.push(self_maps);
            t.decoder_cross.push(cross_maps);
        }
    }
    Ok(MultimodalFeatures {
        z: layer_norm(&y, &w.decoder_norm),
    })
}

/// Molecule path: mol2d and mol3d tokens, FCFP motif prompt through M_m.
/// The graph needs coordinates.
pub fn fuse_molecule(
    g: &MolecularGraph,
    w: &FusionWeights,
) -> Result<MultimodalFeatures, FusionError> {
    let registry = EncoderRegistry::standard();
    let a = registry.featurize(FusionEntity::Molecule(g), ModalityKind::Mol2d)?;
    let b = registry.featurize(FusionEntity::Molecule(g), ModalityKind::Mol3d)?;
    let h = project_concat(&a, &b, w)?;
    let t = fcfp(g, FCFP_RADIUS, w.motif_mol.nrows())?;
    fuse(&h, &motif_prompt(&t, &w.motif_mol)?, w)
}

/// Protein path: prot1d and prot3d tokens, dictionary motif prompt through M_p.
pub fn fuse_protein(
    s: &ProteinStructure,
    dict: &MotifDictionary,
    w: &FusionWeights,
) -> Result<MultimodalFeatures, FusionError> {
    let registry = EncoderRegistry::standard();
    let a = registry.featurize(FusionEntity::Structure(s), ModalityKind::Prot1d)?;
    let b = registry.featurize(FusionEntity::Structure(s), ModalityKind::Prot3d)?;
    let h = project_concat(&a, &b, w)?;
    let t = protein_motif_vector(s.sequence(), dict);
    fuse(&h, &motif_prompt(&t, &w.motif_prot)?, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::FusionConfig;
    use crate::molgraph::parse_smiles;
    use ndarray::array;

    fn config(d: usize, n_queries: usize) -> FusionConfig {
        FusionConfig {
            d,
            n_heads: 4,
            n_layers: 2,
            ff_dim: 2 * d,
            n_queries,
            n_mol_motifs: 64,
            n_prot_motifs: 11,
        }
    }

    fn molecule() -> MolecularGraph {
        let mut g = parse_smiles("CC(=O)NC").unwrap();
        g.set_coordinates(vec![
            [0.0, 0.0, 0.0],
            [1.5, 0.0, 0.0],
            [2.2, 1.2, 0.0],
            [2.2, -1.2, 0.1],
            [3.6, -1.3, 0.2],
        ])
        .unwrap();
        g
    }

    #[test]
    fn shapes() {
        let w = FusionWeights::seeded(&config(16, 8), 42).unwrap();
        let g = molecule();
        let reg = EncoderRegistry::standard();
        let a = reg
            .featurize(FusionEntity::Molecule(&g), ModalityKind::Mol2d)
            .unwrap();
        let b = reg
            .featurize(FusionEntity::Molecule(&g), ModalityKind::Mol3d)
            .unwrap();
        assert_eq!(project_concat(&a, &b, &w).unwrap().dim(), (10, 16));
        let z = fuse_molecule(&g, &w).unwrap();
        assert_eq!(z.z.dim(), (9, 16));
        assert!(z.z.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn degenerate_layer_norm_gives_mlp_bias() {
        let mut w = FusionWeights::seeded(&config(8, 2), 3).unwrap();
        let p = w.projections.get_mut(&ModalityKind::Prot1d).unwrap();
        let n = p.norm.gain.len();
        p.fc1.weight = Array2::eye(n).slice(s![.., ..8]).to_owned();
        p.fc1.bias = Array1::zeros(8);
        p.fc2.weight = Array2::eye(8);
        p.fc2.bias = Array1::from_iter((0..8).map(|i| i as f64 - 3.5));
        let e =
            ModalityEmbedding::new(ModalityKind::Prot1d, Array2::from_elem((3, n), 0.5)).unwrap();
        let out = project(&e, w.projection(ModalityKind::Prot1d).unwrap());
        for row in out.rows() {
            assert_eq!(row, p_bias(&w));
        }
    }

    fn p_bias(w: &FusionWeights) -> Array1<f64> {
        w.projections[&ModalityKind::Prot1d].fc2.bias.clone()
    }

    #[test]
    fn attention_rows_are_distributions() {
        let w = FusionWeights::seeded(&config(8, 3), 5).unwrap();
        let h = array![
            [1.0, 0.5, -0.2, 0.3, 0.0, 2.0, -1.0, 0.1],
            [0.0, 0.0, 1.0, 0.0, 0.3, 0.2, 0.1, -0.4]
        ];
        let prompt = Array1::from_elem(8, 0.25);
        let (z, trace) = fuse_with_trace(&h, &prompt, &w).unwrap();
        assert_eq!(z, fuse(&h, &prompt, &w).unwrap());
        assert_eq!(trace.encoder_self.len(), 2);
        assert_eq!(trace.decoder_cross[1].len(), 4);
        assert_eq!(trace.decoder_cross[0][0].dim(), (4, 2));
        for maps in [
            &trace.encoder_self,
            &trace.decoder_self,
            &trace.decoder_cross,
        ] {
            for m in maps.iter().flatten() {
                for row in m.rows() {
                    assert!(row.iter().all(|&p| p >= 0.0));
                    assert!((row.sum() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fuse_errors() {
        let w = FusionWeights::seeded(&config(8, 2), 5).unwrap();
        let prompt = Array1::zeros(8);
        assert!(matches!(
            fuse(&Array2::zeros((0, 8)), &prompt, &w),
            Err(FusionError::EmptyTokens)
        ));
        assert!(matches!(
            fuse(&Array2::zeros((2, 7)), &prompt, &w),
            Err(FusionError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            fuse(&Array2::zeros((2, 8)), &Array1::zeros(3), &w),
            Err(FusionError::DimensionMismatch { .. })
        ));
        let mut bad = w.clone();
        bad.queries[[0, 0]] = f64::INFINITY;
        assert!(matches!(
            fuse(&Array2::zeros((2, 8)), &prompt, &bad),
            Err(FusionError::NonFiniteWeights(_))
        ));
    }
}
