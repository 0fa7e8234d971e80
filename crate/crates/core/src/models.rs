//! Encoders and the inner-product decoder.
//!
//! Four encoder families share one code path: {linear, GCN} x {plain,
//! variational}. The linear encoder is `Z = A_hat W` (or `A_hat X W` with
//! features); the GCN stacks `H = ReLU(A_hat H W)` layers with a final
//! layer that has no activation. Variational models replace the final
//! layer by two parallel heads producing mu and log sigma from the shared
//! trunk, and sample `z = mu + exp(log sigma) .* eps`.
//!
//! The featureless input H^(0) = I_n is handled symbolically: the first
//! layer multiplies A_hat by the weight matrix directly, the identity is
//! never materialized.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{gemm, spmm, DenseMatrix, FeatureMatrix, SparseMatrix};

/// Hidden width used by the GCN encoders unless overridden.
pub const DEFAULT_HIDDEN_DIM: usize = 32;

/// Node cap for the dense n x n decoder; the decoder is quadratic in n.
pub const DEFAULT_DECODER_NODE_CAP: usize = 32_768;

/// log sigma is clamped to [-LOG_SIGMA_CLAMP, LOG_SIGMA_CLAMP] before
/// exponentiation; gradients outside the clamp are zero.
pub const LOG_SIGMA_CLAMP: f64 = 10.0;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
pub(crate) fn clamp_log_sigma(x: f64) -> f64 {
    x.clamp(-LOG_SIGMA_CLAMP, LOG_SIGMA_CLAMP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderKind {
    Linear,
    Gcn,
}

impl EncoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncoderKind::Linear => "linear",
            EncoderKind::Gcn => "gcn",
        }
    }
}

/// Declarative model description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub encoder: EncoderKind,
    pub depth: usize,
    pub variational: bool,
    pub embedding_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub use_features: bool,
}

impl ModelSpec {
    pub fn linear(embedding_dim: usize, variational: bool, use_features: bool) -> Self {
        Self {
            encoder: EncoderKind::Linear,
            depth: 1,
            variational,
            embedding_dim,
            hidden_dims: Vec::new(),
            use_features,
        }
    }

    /// GCN encoder of the given depth with 32-dim hidden layers.
    pub fn gcn(depth: usize, embedding_dim: usize, variational: bool, use_features: bool) -> Self {
        Self {
            encoder: EncoderKind::Gcn,
            depth,
            variational,
            embedding_dim,
            hidden_dims: vec![DEFAULT_HIDDEN_DIM; depth.saturating_sub(1)],
            use_features,
        }
    }

    pub fn with_hidden_dims(mut self, hidden_dims: Vec<usize>) -> Self {
        self.hidden_dims = hidden_dims;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.encoder {
            EncoderKind::Linear => {
                if self.depth != 1 || !self.hidden_dims.is_empty() {
                    return Err(Error::InvalidModelSpec(
                        "linear encoder requires depth 1 and no hidden layers".into(),
                    ));
                }
            }
            EncoderKind::Gcn => {
                if self.depth < 2 {
                    return Err(Error::InvalidModelSpec(
                        "gcn encoder requires depth >= 2".into(),
                    ));
                }
                if self.hidden_dims.len() != self.depth - 1 {
                    return Err(Error::InvalidModelSpec(format!(
                        "gcn of depth {} needs {} hidden dims, got {}",
                        self.depth,
                        self.depth - 1,
                        self.hidden_dims.len()
                    )));
                }
            }
        }
        if self.embedding_dim == 0 || self.hidden_dims.contains(&0) {
            return Err(Error::InvalidModelSpec(
                "all layer widths must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Short label used in reports and reference files, e.g. `linear_vae`,
    /// `gcn2_ae`.
    pub fn label(&self) -> String {
        let head = match self.encoder {
            EncoderKind::Linear => "linear".to_string(),
            EncoderKind::Gcn => format!("gcn{}", self.depth),
        };
        let tail = if self.variational { "vae" } else { "ae" };
        format!("{head}_{tail}")
    }

    /// Output width of each layer, input side excluded.
    fn layer_out_dims(&self) -> Vec<usize> {
        let mut dims = self.hidden_dims.clone();
        dims.push(self.embedding_dim);
        dims
    }

    /// Expected weight shapes given the input width (n for featureless, f
    /// with features). VAE layouts are trunk weights followed by the mu and
    /// log-sigma heads.
    pub fn weight_shapes(&self, input_dim: usize) -> Vec<(usize, usize)> {
        let outs = self.layer_out_dims();
        let mut shapes = Vec::new();
        let mut prev = input_dim;
        for (idx, &out) in outs.iter().enumerate() {
            let last = idx + 1 == outs.len();
            if last && self.variational {
                shapes.push((prev, out)); // mu head
                shapes.push((prev, out)); // log-sigma head
            } else {
                shapes.push((prev, out));
                prev = out;
            }
        }
        shapes
    }
}

/// Weight matrices, ordered per [`ModelSpec::weight_shapes`].
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    weights: Vec<DenseMatrix>,
}

impl Parameters {
    /// Glorot/Xavier uniform initialization, limit sqrt(6 / (fan_in + fan_out)).
    pub fn init<R: Rng>(spec: &ModelSpec, input_dim: usize, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let weights = spec
            .weight_shapes(input_dim)
            .into_iter()
            .map(|(rows, cols)| glorot_uniform(rows, cols, rng))
            .collect();
        Ok(Self { weights })
    }

    pub fn from_weights(weights: Vec<DenseMatrix>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[DenseMatrix] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [DenseMatrix] {
        &mut self.weights
    }

    pub fn check_shapes(&self, spec: &ModelSpec, input_dim: usize) -> Result<()> {
        let expected = spec.weight_shapes(input_dim);
        if expected.len() != self.weights.len() {
            return Err(Error::ShapeMismatch {
                op: "Parameters::check_shapes",
                details: format!(
                    "{} weight matrices, spec wants {}",
                    self.weights.len(),
                    expected.len()
                ),
            });
        }
        for (w, (r, c)) in self.weights.iter().zip(&expected) {
            if w.n_rows() != *r || w.n_cols() != *c {
                return Err(Error::ShapeMismatch {
                    op: "Parameters::check_shapes",
                    details: format!("{}x{} vs expected {}x{}", w.n_rows(), w.n_cols(), r, c),
                });
            }
        }
        Ok(())
    }
}

pub fn glorot_uniform<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let values = (0..rows * cols)
        .map(|_| rng.random_range(-limit..limit))
        .collect();
    DenseMatrix::from_vec(rows, cols, values).expect("sized by construction")
}

/// Output of an encoder before any sampling.
#[derive(Debug, Clone)]
pub enum EncoderHead {
    /// Plain autoencoder: the embedding itself.
    Point(DenseMatrix),
    /// Variational: Gaussian parameters per node.
    Gaussian {
        mu: DenseMatrix,
        log_sigma: DenseMatrix,
    },
}

#[derive(Debug, Clone)]
pub struct EncoderOutput {
    /// Post-ReLU hidden activations H^(1)..H^(L-1); empty for linear models.
    pub hidden: Vec<DenseMatrix>,
    pub head: EncoderHead,
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub hidden: Vec<DenseMatrix>,
    pub mu: Option<DenseMatrix>,
    pub log_sigma: Option<DenseMatrix>,
    pub epsilon: Option<DenseMatrix>,
    pub z: DenseMatrix,
}

/// A_hat * (input * w); with no features the input is the (virtual)
/// identity and the product collapses to A_hat * w.
fn propagate(
    a_norm: &SparseMatrix,
    input: Option<&FeatureMatrix>,
    w: &DenseMatrix,
) -> Result<DenseMatrix> {
    match input {
        None => spmm(a_norm, w),
        Some(FeatureMatrix::Sparse(x)) => spmm(a_norm, &spmm(x, w)?),
        Some(FeatureMatrix::Dense(x)) => spmm(a_norm, &gemm(x, w, false, false)?),
    }
}

fn relu_inplace(m: &mut DenseMatrix) {
    for v in m.values_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Linear encoder: Z = A_hat W, or A_hat X W with features.
pub fn encode_linear(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    w: &DenseMatrix,
) -> Result<DenseMatrix> {
    propagate(a_norm, features, w)
}

/// Runs the full encoder stack described by `spec`. For variational specs
/// the head carries mu and log sigma; sampling is a separate step.
pub fn encode(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    params: &Parameters,
    spec: &ModelSpec,
) -> Result<EncoderOutput> {
    spec.validate()?;
    let input_dim = features.map_or(a_norm.n_cols(), |f| f.n_cols());
    params.check_shapes(spec, input_dim)?;
    if let Some(f) = features {
        if f.n_rows() != a_norm.n_rows() {
            return Err(Error::ShapeMismatch {
                op: "encode",
                details: format!(
                    "features have {} rows, adjacency is {}x{}",
                    f.n_rows(),
                    a_norm.n_rows(),
                    a_norm.n_cols()
                ),
            });
        }
    }

    let trunk_layers = spec.depth - 1;
    let mut hidden: Vec<DenseMatrix> = Vec::with_capacity(trunk_layers);
    for l in 0..trunk_layers {
        let mut h = if l == 0 {
            propagate(a_norm, features, &params.weights()[0])?
        } else {
            spmm(
                a_norm,
                &gemm(&hidden[l - 1], &params.weights()[l], false, false)?,
            )?
        };
        relu_inplace(&mut h);
        hidden.push(h);
    }

    let final_input: Option<&DenseMatrix> = hidden.last();
    let apply_head = |w: &DenseMatrix| -> Result<DenseMatrix> {
        match final_input {
            Some(h) => spmm(a_norm, &gemm(h, w, false, false)?),
            None => propagate(a_norm, features, w),
        }
    };

    let head = if spec.variational {
        let mu = apply_head(&params.weights()[trunk_layers])?;
        let log_sigma = apply_head(&params.weights()[trunk_layers + 1])?;
        EncoderHead::Gaussian { mu, log_sigma }
    } else {
        EncoderHead::Point(apply_head(&params.weights()[trunk_layers])?)
    };

    Ok(EncoderOutput { hidden, head })
}

/// GCN encoder (depth >= 2). Thin wrapper over [`encode`] that rejects
/// linear specs.
pub fn encode_gcn(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    params: &Parameters,
    spec: &ModelSpec,
) -> Result<EncoderOutput> {
    if spec.encoder != EncoderKind::Gcn {
        return Err(Error::InvalidModelSpec(
            "encode_gcn called with a non-gcn spec".into(),
        ));
    }
    encode(a_norm, features, params, spec)
}

/// Draws eps ~ N(0, I) and returns (z, eps) with
/// z = mu + exp(clamp(log sigma)) .* eps.
pub fn reparameterize<R: Rng>(
    mu: &DenseMatrix,
    log_sigma: &DenseMatrix,
    rng: &mut R,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_same_shape("reparameterize", mu, log_sigma)?;
    let values = (0..mu.values().len())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let epsilon = DenseMatrix::from_vec(mu.n_rows(), mu.n_cols(), values)?;
    let z = reparameterize_with_epsilon(mu, log_sigma, &epsilon)?;
    Ok((z, epsilon))
}

/// Deterministic reparameterization with a caller-provided eps.
pub fn reparameterize_with_epsilon(
    mu: &DenseMatrix,
    log_sigma: &DenseMatrix,
    epsilon: &DenseMatrix,
) -> Result<DenseMatrix> {
    check_same_shape("reparameterize", mu, log_sigma)?;
    check_same_shape("reparameterize", mu, epsilon)?;
    let values = mu
        .values()
        .iter()
        .zip(log_sigma.values())
        .zip(epsilon.values())
        .map(|((&m, &ls), &e)| m + clamp_log_sigma(ls).exp() * e)
        .collect();
    DenseMatrix::from_vec(mu.n_rows(), mu.n_cols(), values)
}

fn check_same_shape(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols() {
        return Err(Error::ShapeMismatch {
            op,
            details: format!(
                "{}x{} vs {}x{}",
                a.n_rows(),
                a.n_cols(),
                b.n_rows(),
                b.n_cols()
            ),
        });
    }
    Ok(())
}

/// Full forward pass: encode, then sample when variational.
pub fn forward<R: Rng>(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    params: &Parameters,
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<ForwardCache> {
    let out = encode(a_norm, features, params, spec)?;
    match out.head {
        EncoderHead::Point(z) => Ok(ForwardCache {
            hidden: out.hidden,
            mu: None,
            log_sigma: None,
            epsilon: None,
            z,
        }),
        EncoderHead::Gaussian { mu, log_sigma } => {
            let (z, epsilon) = reparameterize(&mu, &log_sigma, rng)?;
            Ok(ForwardCache {
                hidden: out.hidden,
                mu: Some(mu),
                log_sigma: Some(log_sigma),
                epsilon: Some(epsilon),
                z,
            })
        }
    }
}

/// Forward pass with a frozen eps; used by gradient checks.
pub fn forward_with_epsilon(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    params: &Parameters,
    spec: &ModelSpec,
    epsilon: Option<&DenseMatrix>,
) -> Result<ForwardCache> {
    let out = encode(a_norm, features, params, spec)?;
    match out.head {
        EncoderHead::Point(z) => Ok(ForwardCache {
            hidden: out.hidden,
            mu: None,
            log_sigma: None,
            epsilon: None,
            z,
        }),
        EncoderHead::Gaussian { mu, log_sigma } => {
            let epsilon = epsilon
                .ok_or_else(|| Error::InvalidArgument("variational forward needs epsilon".into()))?
                .clone();
            let z = reparameterize_with_epsilon(&mu, &log_sigma, &epsilon)?;
            Ok(ForwardCache {
                hidden: out.hidden,
                mu: Some(mu),
                log_sigma: Some(log_sigma),
                epsilon: Some(epsilon),
                z,
            })
        }
    }
}

/// Evaluation-time embedding: Z for plain models, the posterior mean mu for
/// variational ones (no sampling).
pub fn embed(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    params: &Parameters,
    spec: &ModelSpec,
) -> Result<DenseMatrix> {
    let out = encode(a_norm, features, params, spec)?;
    Ok(match out.head {
        EncoderHead::Point(z) => z,
        EncoderHead::Gaussian { mu, .. } => mu,
    })
}

/// Full n x n logit matrix Z Z^T. Probabilities are sigmoid(logits); logits
/// are kept for numerically stable losses. Refuses n above the node cap.
pub fn decode_inner_product_logits(z: &DenseMatrix) -> Result<DenseMatrix> {
    decode_inner_product_logits_with_cap(z, DEFAULT_DECODER_NODE_CAP)
}

pub fn decode_inner_product_logits_with_cap(z: &DenseMatrix, cap: usize) -> Result<DenseMatrix> {
    if z.n_rows() > cap {
        return Err(Error::DecoderTooLarge { n: z.n_rows(), cap });
    }
    gemm(z, z, false, true)
}

/// Edge probabilities sigmoid(z_i . z_j) for the given pairs; never builds
/// the n x n matrix.
pub fn score_edges(z: &DenseMatrix, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    let n = z.n_rows();
    let mut scores = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, bound: n });
        }
        let dot: f64 = z.row(i).iter().zip(z.row(j)).map(|(&a, &b)| a * b).sum();
        scores.push(sigmoid(dot));
    }
    Ok(scores)
}
