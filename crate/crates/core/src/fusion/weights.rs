//! Fusion parameters: per-modality projections, the encoder-decoder stack,
//! learnable queries and motif embedding matrices.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::archive::TensorArchive;
use super::featurize::EncoderRegistry;
use super::{FusionError, ModalityKind};
use crate::motif::{MotifDictionary, FCFP_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusionConfig {
    pub d: usize,
    pub n_heads: usize,
    pub n_layers: usize,
    pub ff_dim: usize,
    pub n_queries: usize,
    /// Rows of M_m, one per molecular fingerprint bit.
    pub n_mol_motifs: usize,
    /// Rows of M_p, one per dictionary motif.
    pub n_prot_motifs: usize,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            d: 32,
            n_heads: 4,
            n_layers: 2,
            ff_dim: 64,
            n_queries: 8,
            n_mol_motifs: FCFP_BITS,
            n_prot_motifs: MotifDictionary::bundled().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm {
    pub gain: Array1<f64>,
    pub bias: Array1<f64>,
}

/// `x · weight + bias` with `weight` stored as [in, out].
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

/// LayerNorm then a two-layer GELU MLP into the model width.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub norm: LayerNorm,
    pub fc1: Linear,
    pub fc2: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attention {
    pub wq: Linear,
    pub wk: Linear,
    pub wv: Linear,
    pub wo: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedForward {
    pub fc1: Linear,
    pub fc2: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderLayer {
    pub norm1: LayerNorm,
    pub attn: Attention,
    pub norm2: LayerNorm,
    pub ff: FeedForward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderLayer {
    pub norm1: LayerNorm,
    pub self_attn: Attention,
    pub norm2: LayerNorm,
    pub cross_attn: Attention,
    pub norm3: LayerNorm,
    pub ff: FeedForward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionWeights {
    pub n_heads: usize,
    pub projections: BTreeMap<ModalityKind, Projection>,
    pub encoder: Vec<EncoderLayer>,
    pub encoder_norm: LayerNorm,
    pub decoder: Vec<DecoderLayer>,
    pub decoder_norm: LayerNorm,
    /// Learnable queries, N_q × d.
    pub queries: Array2<f64>,
    /// M_m, fingerprint bits × d.
    pub motif_mol: Array2<f64>,
    /// M_p, dictionary motifs × d.
    pub motif_prot: Array2<f64>,
}

struct Init {
    rng: ChaCha20Rng,
}

impl Init {
    fn uniform(&mut self, shape: (usize, usize), bound: f64) -> Array2<f64> {
        Array2::from_shape_simple_fn(shape, || self.rng.gen_range(-bound..=bound))
    }

    fn linear(&mut self, inputs: usize, outputs: usize) -> Linear {
        let bound = 1.0 / (inputs as f64).sqrt();
        let weight = self.uniform((inputs, outputs), bound);
        let bias = self
            .uniform((1, outputs), bound)
            .into_shape_with_order(outputs)
            .unwrap();
        Linear { weight, bias }
    }

    fn attention(&mut self, d: usize) -> Attention {
        Attention {
            wq: self.linear(d, d),
            wk: self.linear(d, d),
            wv: self.linear(d, d),
            wo: self.linear(d, d),
        }
    }

    fn ff(&mut self, d: usize, ff: usize) -> FeedForward {
        FeedForward {
            fc1: self.linear(d, ff),
            fc2: self.linear(ff, d),
        }
    }
}

fn unit_norm(n: usize) -> LayerNorm {
    LayerNorm {
        gain: Array1::ones(n),
        bias: Array1::zeros(n),
    }
}

fn put_norm(a: &mut TensorArchive, prefix: &str, n: &LayerNorm) {
    a.insert_vector(&format!("{prefix}.gain"), &n.gain);
    a.insert_vector(&format!("{prefix}.bias"), &n.bias);
}

fn put_linear(a: &mut TensorArchive, prefix: &str, l: &Linear) {
    a.insert_matrix(&format!("{prefix}.weight"), &l.weight);
    a.insert_vector(&format!("{prefix}.bias"), &l.bias);
}

fn put_attention(a: &mut TensorArchive, prefix: &str, at: &Attention) {
    for (name, l) in [
        ("wq", &at.wq),
        ("wk", &at.wk),
        ("wv", &at.wv),
        ("wo", &at.wo),
    ] {
        put_linear(a, &format!("{prefix}.{name}"), l);
    }
}

fn put_ff(a: &mut TensorArchive, prefix: &str, ff: &FeedForward) {
    put_linear(a, &format!("{prefix}.fc1"), &ff.fc1);
    put_linear(a, &format!("{prefix}.fc2"), &ff.fc2);
}

fn get_norm(a: &TensorArchive, prefix: &str) -> Result<LayerNorm, FusionError> {
    Ok(LayerNorm {
        gain: a.vector(&format!("{prefix}.gain"))?,
        bias: a.vector(&format!("{prefix}.bias"))?,
    })
}

fn get_linear(a: &TensorArchive, prefix: &str) -> Result<Linear, FusionError> {
    Ok(Linear {
        weight: a.matrix(&format!("{prefix}.weight"))?,
        bias: a.vector(&format!("{prefix}.bias"))?,
    })
}

fn get_attention(a: &TensorArchive, prefix: &str) -> Result<Attention, FusionError> {
    Ok(Attention {
        wq: get_linear(a, &format!("{prefix}.wq"))?,
        wk: get_linear(a, &format!("{prefix}.wk"))?,
        wv: get_linear(a, &format!("{prefix}.wv"))?,
        wo: get_linear(a, &format!("{prefix}.wo"))?,
    })
}

fn get_ff(a: &TensorArchive, prefix: &str) -> Result<FeedForward, FusionError> {
    Ok(FeedForward {
        fc1: get_linear(a, &format!("{prefix}.fc1"))?,
        fc2: get_linear(a, &format!("{prefix}.fc2"))?,
    })
}

fn mismatch(what: String, expected: usize, found: usize) -> FusionError {
    FusionError::DimensionMismatch {
        what,
        expected,
        found,
    }
}

fn check_len(what: &str, v: &Array1<f64>, expected: usize) -> Result<(), FusionError> {
    if v.len() != expected {
        return Err(mismatch(what.to_string(), expected, v.len()));
    }
    Ok(())
}

fn check_shape(
    what: &str,
    m: &Array2<f64>,
    rows: usize,
    cols: Option<usize>,
) -> Result<(), FusionError> {
    if m.nrows() != rows {
        return Err(mismatch(format!("{what} rows"), rows, m.nrows()));
    }
    if let Some(c) = cols {
        if m.ncols() != c {
            return Err(mismatch(format!("{what} columns"), c, m.ncols()));
        }
    }
    Ok(())
}

impl LayerNorm {
    fn check(&self, what: &str, n: usize) -> Result<(), FusionError> {
        check_len(&format!("{what}.gain"), &self.gain, n)?;
        check_len(&format!("{what}.bias"), &self.bias, n)
    }
}

impl Linear {
    fn check(
        &self,
        what: &str,
        inputs: usize,
        outputs: Option<usize>,
    ) -> Result<usize, FusionError> {
        check_shape(&format!("{what}.weight"), &self.weight, inputs, outputs)?;
        check_len(&format!("{what}.bias"), &self.bias, self.weight.ncols())?;
        Ok(self.weight.ncols())
    }
}

impl Attention {
    fn check(&self, what: &str, d: usize) -> Result<(), FusionError> {
        for (name, l) in [
            ("wq", &self.wq),
            ("wk", &self.wk),
            ("wv", &self.wv),
            ("wo", &self.wo),
        ] {
            l.check(&format!("{what}.{name}"), d, Some(d))?;
        }
        Ok(())
    }
}

impl FeedForward {
    fn check(&self, what: &str, d: usize) -> Result<(), FusionError> {
        let hidden = self.fc1.check(&format!("{what}.fc1"), d, None)?;
        self.fc2.check(&format!("{what}.fc2"), hidden, Some(d))?;
        Ok(())
    }
}

impl FusionWeights {
    /// Deterministic initialization from a ChaCha20 stream seeded with
    /// `seed`. Linear weights and biases are uniform in ±1/√fan_in, queries
    /// and motif matrices uniform in ±1, LayerNorms unit gain and zero bias.
    /// Draw order: projections in modality order, encoder layers, decoder
    /// layers, queries, M_m, M_p.
    pub fn seeded(config: &FusionConfig, seed: u64) -> Result<Self, FusionError> {
        let FusionConfig {
            d,
            n_heads,
            n_layers,
            ff_dim,
            n_queries,
            n_mol_motifs,
            n_prot_motifs,
        } = *config;
        if n_heads == 0 || d % n_heads != 0 {
            return Err(mismatch("model width per head".into(), n_heads, d));
        }
        let mut init = Init {
            rng: ChaCha20Rng::seed_from_u64(seed),
        };
        let registry = EncoderRegistry::standard();
        let mut projections = BTreeMap::new();
        for kind in ModalityKind::ALL {
            let n = registry.get(kind)?.dim();
            let fc1 = init.linear(n, d);
            let fc2 = init.linear(d, d);
            projections.insert(
                kind,
                Projection {
                    norm: unit_norm(n),
                    fc1,
                    fc2,
                },
            );
        }
        let encoder = (0..n_layers)
            .map(|_| EncoderLayer {
                norm1: unit_norm(d),
                attn: init.attention(d),
                norm2: unit_norm(d),
                ff: init.ff(d, ff_dim),
            })
            .collect();
        let decoder = (0..n_layers)
            .map(|_| DecoderLayer {
                norm1: unit_norm(d),
                self_attn: init.attention(d),
                norm2: unit_norm(d),
                cross_attn: init.attention(d),
                norm3: unit_norm(d),
                ff: init.ff(d, ff_dim),
            })
            .collect();
        let queries = init.uniform((n_queries, d), 1.0);
        let motif_mol = init.uniform((n_mol_motifs, d), 1.0);
        let motif_prot = init.uniform((n_prot_motifs, d), 1.0);
        Ok(FusionWeights {
            n_heads,
            projections,
            encoder,
            encoder_norm: unit_norm(d),
            decoder,
            decoder_norm: unit_norm(d),
            queries,
            motif_mol,
            motif_prot,
        })
    }

    pub fn d(&self) -> usize {
        self.queries.ncols()
    }

    pub fn n_queries(&self) -> usize {
        self.queries.nrows()
    }

    pub fn projection(&self, kind: ModalityKind) -> Result<&Projection, FusionError> {
        self.projections
            .get(&kind)
            .ok_or_else(|| FusionError::MissingTensor(format!("fusion.proj.{kind}")))
    }

    /// Checks that every projection lands in d and every tensor is finite.
    pub fn validate(&self) -> Result<(), FusionError> {
        let d = self.d();
        if self.n_heads == 0 || !d.is_multiple_of(self.n_heads) {
            return Err(mismatch("model width per head".into(), self.n_heads, d));
        }
        for (kind, p) in &self.projections {
            let what = format!("fusion.proj.{kind}");
            let n = p.norm.gain.len();
            p.norm.check(&format!("{what}.ln"), n)?;
            let hidden = p.fc1.check(&format!("{what}.fc1"), n, None)?;
            p.fc2.check(&format!("{what}.fc2"), hidden, Some(d))?;
        }
        for (i, l) in self.encoder.iter().enumerate() {
            let what = format!("fusion.enc.layer{i}");
            l.norm1.check(&format!("{what}.ln1"), d)?;
            l.attn.check(&format!("{what}.attn"), d)?;
            l.norm2.check(&format!("{what}.ln2"), d)?;
            l.ff.check(&format!("{what}.ff"), d)?;
        }
        self.encoder_norm.check("fusion.enc.norm", d)?;
        for (i, l) in self.decoder.iter().enumerate() {
            let what = format!("fusion.dec.layer{i}");
            l.norm1.check(&format!("{what}.ln1"), d)?;
            l.self_attn.check(&format!("{what}.self_attn"), d)?;
            l.norm2.check(&format!("{what}.ln2"), d)?;
            l.cross_attn.check(&format!("{what}.cross_attn"), d)?;
            l.norm3.check(&format!("{what}.ln3"), d)?;
            l.ff.check(&format!("{what}.ff"), d)?;
        }
        self.decoder_norm.check("fusion.dec.norm", d)?;
        check_shape(
            "motif.M_m",
            &self.motif_mol,
            self.motif_mol.nrows(),
            Some(d),
        )?;
        check_shape(
            "motif.M_p",
            &self.motif_prot,
            self.motif_prot.nrows(),
            Some(d),
        )?;
        let archive = self.to_archive();
        for name in archive.names() {
            if archive
                .get(name)
                .is_some_and(|t| t.iter().any(|v| !v.is_finite()))
            {
                return Err(FusionError::NonFiniteWeights(name.to_string()));
            }
        }
        Ok(())
    }

    pub fn to_archive(&self) -> TensorArchive {
        let mut a = TensorArchive::new();
        a.insert_scalar("fusion.n_heads", self.n_heads as f64);
        a.insert_scalar("fusion.n_layers", self.encoder.len() as f64);
        for (kind, p) in &self.projections {
            let prefix = format!("fusion.proj.{kind}");
            put_norm(&mut a, &format!("{prefix}.ln"), &p.norm);
            put_linear(&mut a, &format!("{prefix}.fc1"), &p.fc1);
            put_linear(&mut a, &format!("{prefix}.fc2"), &p.fc2);
        }
        for (i, l) in self.encoder.iter().enumerate() {
            let prefix = format!("fusion.enc.layer{i}");
            put_norm(&mut a, &format!("{prefix}.ln1"), &l.norm1);
            put_attention(&mut a, &format!("{prefix}.attn"), &l.attn);
            put_norm(&mut a, &format!("{prefix}.ln2"), &l.norm2);
            put_ff(&mut a, &format!("{prefix}.ff"), &l.ff);
        }
        put_norm(&mut a, "fusion.enc.norm", &self.encoder_norm);
        for (i, l) in self.decoder.iter().enumerate() {
            let prefix = format!("fusion.dec.layer{i}");
            put_norm(&mut a, &format!("{prefix}.ln1"), &l.norm1);
            put_attention(&mut a, &format!("{prefix}.self_attn"), &l.self_attn);
            put_norm(&mut a, &format!("{prefix}.ln2"), &l.norm2);
            put_attention(&mut a, &format!("{prefix}.cross_attn"), &l.cross_attn);
            put_norm(&mut a, &format!("{prefix}.ln3"), &l.norm3);
            put_ff(&mut a, &format!("{prefix}.ff"), &l.ff);
        }
        put_norm(&mut a, "fusion.dec.norm", &self.decoder_norm);
        a.insert_matrix("fusion.queries", &self.queries);
        a.insert_matrix("motif.M_m", &self.motif_mol);
        a.insert_matrix("motif.M_p", &self.motif_prot);
        a
    }

    pub fn from_archive(a: &TensorArchive) -> Result<Self, FusionError> {
        let count = |name: &str| -> Result<usize, FusionError> {
            let v = a.scalar(name)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(FusionError::Archive {
                    line: 0,
                    message: format!("{name} must be a non-negative integer"),
                });
            }
            Ok(v as usize)
        };
        let n_heads = count("fusion.n_heads")?;
        let n_layers = count("fusion.n_layers")?;
        let mut projections = BTreeMap::new();
        for kind in ModalityKind::ALL {
            let prefix = format!("fusion.proj.{kind}");
            if a.get(&format!("{prefix}.ln.gain")).is_none() {
                continue;
            }
            projections.insert(
                kind,
                Projection {
                    norm: get_norm(a, &format!("{prefix}.ln"))?,
                    fc1: get_linear(a, &format!("{prefix}.fc1"))?,
                    fc2: get_linear(a, &format!("{prefix}.fc2"))?,
                },
            );
        }
        let encoder = (0..n_layers)
            .map(|i| {
                let prefix = format!("fusion.enc.layer{i}");
                Ok(EncoderLayer {
                    norm1: get_norm(a, &format!("{prefix}.ln1"))?,
                    attn: get_attention(a, &format!("{prefix}.attn"))?,
                    norm2: get_norm(a, &format!("{prefix}.ln2"))?,
                    ff: get_ff(a, &format!("{prefix}.ff"))?,
                })
            })
            .collect::<Result<Vec<_>, FusionError>>()?;
        let decoder = (0..n_layers)
            .map(|i| {
                let prefix = format!("fusion.dec.layer{i}");
                Ok(DecoderLayer {
                    norm1: get_norm(a, &format!("{prefix}.ln1"))?,
                    self_attn: get_attention(a, &format!("{prefix}.self_attn"))?,
                    norm2: get_norm(a, &format!("{prefix}.ln2"))?,
                    cross_attn: get_attention(a, &format!("{prefix}.cross_attn"))?,
                    norm3: get_norm(a, &format!("{prefix}.ln3"))?,
                    ff: get_ff(a, &format!("{prefix}.ff"))?,
                })
            })
            .collect::<Result<Vec<_>, FusionError>>()?;
        let w = FusionWeights {
            n_heads,
            projections,
            encoder,
            encoder_norm: get_norm(a, "fusion.enc.norm")?,
            decoder,
            decoder_norm: get_norm(a, "fusion.dec.norm")?,
            queries: a.matrix("fusion.queries")?,
            motif_mol: a.matrix("motif.M_m")?,
            motif_prot: a.matrix("motif.M_p")?,
        };
        w.validate()?;
        Ok(w)
    }
}
