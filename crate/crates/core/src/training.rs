//! Losses, exact backward passes, and full-batch Adam training.
//!
//! The objective is `norm * weighted_bce(logits, A_train + I) +
//! kl_scale * KL(q || N(0, I))`, with `kl_scale = 1/n` for variational
//! models and 0 otherwise. The cross entropy runs over all n^2 ordered
//! pairs with positives (train edges both ways plus the diagonal) weighted
//! by `pos_weight`; it is evaluated in the numerically stable logit form,
//! never through sigmoid followed by log.
//!
//! Training is one forward, one backward and one Adam step per epoch.
//! Divergence aborts the run: at these scales a non-finite loss is a bug,
//! not instability.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::ranking::{average_precision, roc_auc};
use crate::linalg::{gemm, normalize_adjacency, spmm, DenseMatrix, FeatureMatrix, SparseMatrix};
use crate::models::{
    self, clamp_log_sigma, forward, ForwardCache, ModelSpec, Parameters, LOG_SIGMA_CLAMP,
};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Scaling constants of the reconstruction objective.
///
/// With S positive target entries (train edges doubled for symmetry plus n
/// diagonal entries): `pos_weight = (n^2 - S) / S` and
/// `norm = n^2 / (2 (n^2 - S))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub pos_weight: f64,
    pub norm: f64,
    pub kl_scale: f64,
}

impl LossConfig {
    pub fn from_train_adjacency(train_adj: &SparseMatrix, variational: bool) -> Result<Self> {
        if train_adj.n_rows() != train_adj.n_cols() {
            return Err(Error::NotSquare {
                rows: train_adj.n_rows(),
                cols: train_adj.n_cols(),
            });
        }
        let n = train_adj.n_rows();
        let total = (n as f64) * (n as f64);
        let positives = (train_adj.nnz() + n) as f64;
        if positives >= total {
            return Err(Error::InvalidArgument(
                "loss weights undefined: no negative targets".into(),
            ));
        }
        Ok(Self {
            pos_weight: (total - positives) / positives,
            norm: total / (2.0 * (total - positives)),
            kl_scale: if variational { 1.0 / n as f64 } else { 0.0 },
        })
    }

    pub fn with_parts(pos_weight: f64, norm: f64, kl_scale: f64) -> Result<Self> {
        if pos_weight <= 0.0 || norm <= 0.0 {
            return Err(Error::InvalidArgument(
                "pos_weight and norm must be positive".into(),
            ));
        }
        Ok(Self {
            pos_weight,
            norm,
            kl_scale,
        })
    }
}

/// Stable per-entry weighted BCE on a logit:
/// `pos_weight * y * softplus(-x) + (1 - y) * softplus(x)`.
#[inline]
fn bce_term(x: f64, positive: bool, pos_weight: f64) -> f64 {
    // softplus(t) = max(t, 0) + ln(1 + exp(-|t|))
    let soft = (-x.abs()).exp().ln_1p();
    if positive {
        pos_weight * (soft + (-x).max(0.0))
    } else {
        soft + x.max(0.0)
    }
}

/// (bce_term, d(bce_term)/dx) sharing one exp: with e = exp(-|x|),
/// softplus(|x|-free part) = ln(1 + e) and sigmoid(x) = 1/(1+e) or e/(1+e)
/// depending on the sign of x.
#[inline]
fn bce_term_and_residual(x: f64, positive: bool, pos_weight: f64) -> (f64, f64) {
    let e = (-x.abs()).exp();
    let soft = e.ln_1p();
    let s = if x >= 0.0 {
        1.0 / (1.0 + e)
    } else {
        e / (1.0 + e)
    };
    if positive {
        (pos_weight * (soft + (-x).max(0.0)), pos_weight * (s - 1.0))
    } else {
        (soft + x.max(0.0), s)
    }
}

/// Weighted cross entropy over the full logit matrix against the positive
/// set stored in `target` (train adjacency plus self-loops).
pub fn reconstruction_loss(
    logits: &DenseMatrix,
    target: &SparseMatrix,
    cfg: &LossConfig,
) -> Result<f64> {
    let n = logits.n_rows();
    if logits.n_cols() != n || target.n_rows() != n || target.n_cols() != n {
        return Err(Error::ShapeMismatch {
            op: "reconstruction_loss",
            details: format!(
                "logits {}x{}, target {}x{}",
                logits.n_rows(),
                logits.n_cols(),
                target.n_rows(),
                target.n_cols()
            ),
        });
    }
    let row_sums: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (pos_cols, _) = target.row(i);
            let mut next_pos = 0usize;
            let mut acc = 0.0;
            for (j, &x) in logits.row(i).iter().enumerate() {
                let positive = if next_pos < pos_cols.len() && pos_cols[next_pos] == j {
                    next_pos += 1;
                    true
                } else {
                    false
                };
                acc += bce_term(x, positive, cfg.pos_weight);
            }
            acc
        })
        .collect();
    let total: f64 = row_sums.iter().sum();
    Ok(cfg.norm * total / (n as f64 * n as f64))
}

/// Fused decoder + loss + embedding gradient.
///
/// Computes the reconstruction loss and `dL/dZ = 2 E Z` (E is the symmetric
/// residual matrix) without materializing the n x n logit matrix: each row
/// of logits is formed, consumed and discarded. Memory stays O(n d).
pub fn reconstruction_loss_and_grad(
    z: &DenseMatrix,
    target: &SparseMatrix,
    cfg: &LossConfig,
) -> Result<(f64, DenseMatrix)> {
    let n = z.n_rows();
    let d = z.n_cols();
    if target.n_rows() != n || target.n_cols() != n {
        return Err(Error::ShapeMismatch {
            op: "reconstruction_loss_and_grad",
            details: format!(
                "z {}x{}, target {}x{}",
                n,
                d,
                target.n_rows(),
                target.n_cols()
            ),
        });
    }
    let scale = cfg.norm / (n as f64 * n as f64);
    let mut grad = DenseMatrix::zeros(n, d);
    let mut row_losses = vec![0.0f64; n];
    grad.values_mut()
        .par_chunks_mut(d)
        .zip(row_losses.par_iter_mut())
        .enumerate()
        .for_each(|(i, (g_row, loss_i))| {
            let z_i = z.row(i);
            let (pos_cols, _) = target.row(i);
            let mut next_pos = 0usize;
            let mut acc = 0.0;
            for j in 0..n {
                let z_j = z.row(j);
                let mut x = 0.0;
                for (&a, &b) in z_i.iter().zip(z_j) {
                    x += a * b;
                }
                let positive = if next_pos < pos_cols.len() && pos_cols[next_pos] == j {
                    next_pos += 1;
                    true
                } else {
                    false
                };
                let (term, residual) = bce_term_and_residual(x, positive, cfg.pos_weight);
                acc += term;
                for (g, &b) in g_row.iter_mut().zip(z_j) {
                    *g += residual * b;
                }
            }
            *loss_i = acc;
            // dL/dZ = (E + E^T) Z = 2 E Z for symmetric E
            for g in g_row.iter_mut() {
                *g *= 2.0 * scale;
            }
        });
    let total: f64 = row_losses.iter().sum();
    Ok((cfg.norm * total / (n as f64 * n as f64), grad))
}

/// KL(q(Z|A) || N(0, I)) averaged over nodes:
/// `(1/n) sum_ik 0.5 (exp(2 s) + mu^2 - 1 - 2 s)` with clamped s.
pub fn kl_divergence(mu: &DenseMatrix, log_sigma: &DenseMatrix) -> Result<f64> {
    if mu.n_rows() != log_sigma.n_rows() || mu.n_cols() != log_sigma.n_cols() {
        return Err(Error::ShapeMismatch {
            op: "kl_divergence",
            details: format!(
                "mu {}x{}, log_sigma {}x{}",
                mu.n_rows(),
                mu.n_cols(),
                log_sigma.n_rows(),
                log_sigma.n_cols()
            ),
        });
    }
    let n = mu.n_rows() as f64;
    let total: f64 = mu
        .values()
        .iter()
        .zip(log_sigma.values())
        .map(|(&m, &ls)| {
            let s = clamp_log_sigma(ls);
            0.5 * ((2.0 * s).exp() + m * m - 1.0 - 2.0 * s)
        })
        .sum();
    Ok(total / n)
}

/// Gradients mirroring [`Parameters`].
#[derive(Debug, Clone)]
pub struct GradientSet {
    pub grads: Vec<DenseMatrix>,
}

fn input_transposed_mul(features: Option<&FeatureMatrix>, m: &DenseMatrix) -> Result<DenseMatrix> {
    match features {
        None => Ok(m.clone()),
        Some(FeatureMatrix::Sparse(x)) => spmm(&x.transpose(), m),
        Some(FeatureMatrix::Dense(x)) => gemm(x, m, true, false),
    }
}

fn relu_mask_inplace(grad: &mut DenseMatrix, activation: &DenseMatrix) {
    for (g, &h) in grad.values_mut().iter_mut().zip(activation.values()) {
        if h <= 0.0 {
            *g = 0.0;
        }
    }
}

fn add_assign(acc: &mut DenseMatrix, other: &DenseMatrix) {
    for (a, &b) in acc.values_mut().iter_mut().zip(other.values()) {
        *a += b;
    }
}

/// Exact gradients of the full objective w.r.t. every weight matrix,
/// starting from `grad_z = dL/dZ` (the reconstruction part; the KL
/// contribution for variational models is added here).
pub fn backward_from_embedding_grad(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    cache: &ForwardCache,
    params: &Parameters,
    spec: &ModelSpec,
    cfg: &LossConfig,
    grad_z: &DenseMatrix,
) -> Result<GradientSet> {
    spec.validate()?;
    let input_dim = features.map_or(a_norm.n_cols(), |f| f.n_cols());
    params.check_shapes(spec, input_dim)?;
    let trunk_layers = spec.depth - 1;
    if cache.hidden.len() != trunk_layers {
        return Err(Error::InvalidArgument(format!(
            "cache/spec mismatch: {} hidden activations for depth {}",
            cache.hidden.len(),
            spec.depth
        )));
    }
    let n = a_norm.n_rows() as f64;

    let mut grads: Vec<Option<DenseMatrix>> = vec![None; params.weights().len()];

    // Gradient flowing into the deepest trunk activation (None when the
    // head reads the input directly).
    let mut trunk_grad: Option<DenseMatrix>;

    // dL/dW_head = input^T (A_hat G); input is hidden.last() or the raw input
    let head_input_grad = |t: &DenseMatrix| -> Result<DenseMatrix> {
        match cache.hidden.last() {
            Some(h) => gemm(h, t, true, false),
            None => input_transposed_mul(features, t),
        }
    };

    if spec.variational {
        let (mu, log_sigma, epsilon) = match (&cache.mu, &cache.log_sigma, &cache.epsilon) {
            (Some(m), Some(ls), Some(e)) => (m, ls, e),
            _ => {
                return Err(Error::InvalidArgument(
                    "cache/spec mismatch: variational backward needs mu, log_sigma, epsilon".into(),
                ))
            }
        };
        // dz/dmu = 1; KL adds kl_scale * mu / n
        let mut grad_mu = grad_z.clone();
        for (g, &m) in grad_mu.values_mut().iter_mut().zip(mu.values()) {
            *g += cfg.kl_scale * m / n;
        }
        // dz/dlog_sigma = exp(s) .* eps inside the clamp, 0 outside;
        // KL adds kl_scale * (exp(2 s) - 1) / n through the same clamp.
        let mut grad_ls = DenseMatrix::zeros(log_sigma.n_rows(), log_sigma.n_cols());
        for (((g, &ls), &gz), &e) in grad_ls
            .values_mut()
            .iter_mut()
            .zip(log_sigma.values())
            .zip(grad_z.values())
            .zip(epsilon.values())
        {
            if ls.abs() <= LOG_SIGMA_CLAMP {
                let s = ls;
                *g = gz * s.exp() * e + cfg.kl_scale * ((2.0 * s).exp() - 1.0) / n;
            }
        }
        let t_mu = spmm(a_norm, &grad_mu)?;
        let t_ls = spmm(a_norm, &grad_ls)?;
        let mu_idx = trunk_layers;
        let ls_idx = trunk_layers + 1;
        grads[mu_idx] = Some(head_input_grad(&t_mu)?);
        grads[ls_idx] = Some(head_input_grad(&t_ls)?);
        trunk_grad = if trunk_layers > 0 {
            let mut g = gemm(&t_mu, &params.weights()[mu_idx], false, true)?;
            add_assign(
                &mut g,
                &gemm(&t_ls, &params.weights()[ls_idx], false, true)?,
            );
            Some(g)
        } else {
            None
        };
    } else {
        let t = spmm(a_norm, grad_z)?;
        let last = trunk_layers;
        grads[last] = Some(head_input_grad(&t)?);
        trunk_grad = if trunk_layers > 0 {
            Some(gemm(&t, &params.weights()[last], false, true)?)
        } else {
            None
        };
    }

    // Walk the ReLU trunk top-down.
    for l in (1..=trunk_layers).rev() {
        let mut g = trunk_grad.take().expect("trunk gradient present");
        relu_mask_inplace(&mut g, &cache.hidden[l - 1]);
        let t = spmm(a_norm, &g)?;
        grads[l - 1] = Some(if l == 1 {
            input_transposed_mul(features, &t)?
        } else {
            gemm(&cache.hidden[l - 2], &t, true, false)?
        });
        if l > 1 {
            trunk_grad = Some(gemm(&t, &params.weights()[l - 1], false, true)?);
        }
    }

    let grads: Vec<DenseMatrix> = grads
        .into_iter()
        .map(|g| g.expect("all gradients assigned"))
        .collect();
    Ok(GradientSet { grads })
}

/// Full backward pass: reconstruction gradient from the cache's embedding,
/// then the weight chain.
pub fn backward(
    a_norm: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    cache: &ForwardCache,
    target: &SparseMatrix,
    params: &Parameters,
    spec: &ModelSpec,
    cfg: &LossConfig,
) -> Result<GradientSet> {
    let (_, grad_z) = reconstruction_loss_and_grad(&cache.z, target, cfg)?;
    backward_from_embedding_grad(a_norm, features, cache, params, spec, cfg, &grad_z)
}

/// Adam state; moment shapes mirror the parameters.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub step: usize,
    pub first_moment: Vec<DenseMatrix>,
    pub second_moment: Vec<DenseMatrix>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon_hat: f64,
}

impl OptimizerState {
    pub fn new(params: &Parameters, learning_rate: f64) -> Self {
        let zeros: Vec<DenseMatrix> = params
            .weights()
            .iter()
            .map(|w| DenseMatrix::zeros(w.n_rows(), w.n_cols()))
            .collect();
        Self {
            step: 0,
            first_moment: zeros.clone(),
            second_moment: zeros,
            learning_rate,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            epsilon_hat: ADAM_EPSILON,
        }
    }
}

/// One Adam update with bias correction. Aborts on non-finite gradients.
pub fn adam_step(
    params: &mut Parameters,
    grads: &GradientSet,
    state: &mut OptimizerState,
) -> Result<()> {
    if grads.grads.len() != params.weights().len() {
        return Err(Error::ShapeMismatch {
            op: "adam_step",
            details: format!(
                "{} gradients for {} parameter blocks",
                grads.grads.len(),
                params.weights().len()
            ),
        });
    }
    for (index, g) in grads.grads.iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::NonFiniteGradient { index });
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for (((w, g), m), v) in params
        .weights_mut()
        .iter_mut()
        .zip(&grads.grads)
        .zip(&mut state.first_moment)
        .zip(&mut state.second_moment)
    {
        for (((wv, &gv), mv), vv) in w
            .values_mut()
            .iter_mut()
            .zip(g.values())
            .zip(m.values_mut())
            .zip(v.values_mut())
        {
            *mv = state.beta1 * *mv + (1.0 - state.beta1) * gv;
            *vv = state.beta2 * *vv + (1.0 - state.beta2) * gv * gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *wv -= state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon_hat);
        }
    }
    Ok(())
}

/// Positive/negative edge pairs scored once per epoch for the trace.
#[derive(Debug, Clone)]
pub struct ValidationEdges {
    pub pos: Vec<(usize, usize)>,
    pub neg: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// When present, per-epoch validation AUC/AP are recorded in the trace.
    /// They are never acted on.
    pub validation: Option<ValidationEdges>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.01,
            validation: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: Parameters,
    /// Total objective per epoch, evaluated at that epoch's parameters.
    pub loss_trace: Vec<f64>,
    /// (AUC, AP) per epoch when validation edges were supplied.
    pub validation_trace: Vec<(f64, f64)>,
}

/// Full-batch training: one forward, one backward, one Adam step per epoch.
pub fn train<R: Rng>(
    train_adj: &SparseMatrix,
    features: Option<&FeatureMatrix>,
    spec: &ModelSpec,
    hp: &TrainConfig,
    rng: &mut R,
) -> Result<TrainOutcome> {
    spec.validate()?;
    let a_norm = normalize_adjacency(train_adj)?;
    let target = train_adj.plus_identity()?;
    let cfg = LossConfig::from_train_adjacency(train_adj, spec.variational)?;
    let input_dim = features.map_or(train_adj.n_rows(), |f| f.n_cols());
    let mut params = Parameters::init(spec, input_dim, rng)?;
    let mut opt = OptimizerState::new(&params, hp.learning_rate);
    let mut loss_trace = Vec::with_capacity(hp.epochs);
    let mut validation_trace = Vec::new();

    for epoch in 0..hp.epochs {
        let cache = forward(&a_norm, features, &params, spec, rng)?;
        let (recon, grad_z) = reconstruction_loss_and_grad(&cache.z, &target, &cfg)?;
        let loss = if spec.variational {
            let (mu, ls) = (
                cache.mu.as_ref().expect("variational cache"),
                cache.log_sigma.as_ref().expect("variational cache"),
            );
            recon + cfg.kl_scale * kl_divergence(mu, ls)?
        } else {
            recon
        };
        if !loss.is_finite() {
            return Err(Error::DivergedLoss { epoch });
        }
        loss_trace.push(loss);

        if let Some(val) = &hp.validation {
            let scored = if spec.variational {
                cache.mu.as_ref().expect("variational cache")
            } else {
                &cache.z
            };
            let pos = models::score_edges(scored, &val.pos)?;
            let neg = models::score_edges(scored, &val.neg)?;
            validation_trace.push((roc_auc(&pos, &neg)?, average_precision(&pos, &neg)?));
        }

        let grads =
            backward_from_embedding_grad(&a_norm, features, &cache, &params, spec, &cfg, &grad_z)?;
        adam_step(&mut params, &grads, &mut opt)?;
    }

    Ok(TrainOutcome {
        params,
        loss_trace,
        validation_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sigmoid;
    use crate::rng::rng_from_seed;

    fn path3_adj() -> SparseMatrix {
        SparseMatrix::from_triplets(3, 3, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)])
            .unwrap()
    }

    #[test]
    fn loss_config_from_train_adjacency() {
        // path on 3 nodes: S = 4 + 3 = 7, n^2 = 9
        let cfg = LossConfig::from_train_adjacency(&path3_adj(), false).unwrap();
        assert!((cfg.pos_weight - 2.0 / 7.0).abs() < 1e-15);
        assert!((cfg.norm - 9.0 / 4.0).abs() < 1e-15);
        assert_eq!(cfg.kl_scale, 0.0);
        let vae = LossConfig::from_train_adjacency(&path3_adj(), true).unwrap();
        assert!((vae.kl_scale - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_logits_unit_weights_give_log_two() {
        let logits = DenseMatrix::zeros(4, 4);
        let target = SparseMatrix::identity(4);
        let cfg = LossConfig::with_parts(1.0, 1.0, 0.0).unwrap();
        let loss = reconstruction_loss(&logits, &target, &cfg).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn saturated_correct_logits_give_zero_loss() {
        let target = path3_adj().plus_identity().unwrap();
        let cfg = LossConfig::from_train_adjacency(&path3_adj(), false).unwrap();
        let mut logits = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                logits.set(i, j, if target.contains(i, j) { 40.0 } else { -40.0 });
            }
        }
        let loss = reconstruction_loss(&logits, &target, &cfg).unwrap();
        assert!(loss < 1e-10, "loss {loss}");
    }

    #[test]
    fn all_positive_two_by_two_matches_hand_sum() {
        // single edge (0,1) plus the diagonal: every cell is a positive
        let adj = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let target = adj.plus_identity().unwrap();
        let cfg = LossConfig::with_parts(3.0, 0.7, 0.0).unwrap();
        let logits = DenseMatrix::zeros(2, 2);
        let loss = reconstruction_loss(&logits, &target, &cfg).unwrap();
        // each of the 4 entries contributes pos_weight * ln 2
        let expected = 0.7 * 3.0 * std::f64::consts::LN_2;
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn fused_grad_matches_materialized_path() {
        let mut rng = rng_from_seed(2);
        let z = models::glorot_uniform(6, 3, &mut rng);
        let adj = SparseMatrix::from_triplets(
            6,
            6,
            &[
                (0, 1, 1.0),
                (1, 0, 1.0),
                (2, 4, 1.0),
                (4, 2, 1.0),
                (3, 5, 1.0),
                (5, 3, 1.0),
            ],
        )
        .unwrap();
        let target = adj.plus_identity().unwrap();
        let cfg = LossConfig::from_train_adjacency(&adj, false).unwrap();
        let (fused_loss, grad) = reconstruction_loss_and_grad(&z, &target, &cfg).unwrap();
        let logits = models::decode_inner_product_logits(&z).unwrap();
        let dense_loss = reconstruction_loss(&logits, &target, &cfg).unwrap();
        assert!((fused_loss - dense_loss).abs() < 1e-12);

        // reference: E via entries, grad = 2 E Z
        let n = 6;
        let scale = cfg.norm / (n as f64 * n as f64);
        let mut e = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = logits.get(i, j);
                let r = if target.contains(i, j) {
                    cfg.pos_weight * (sigmoid(x) - 1.0)
                } else {
                    sigmoid(x)
                };
                e.set(i, j, scale * r);
            }
        }
        let reference = gemm(&e, &z, false, false).unwrap().map(|v| 2.0 * v);
        for (a, b) in grad.values().iter().zip(reference.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_examples() {
        let zero = DenseMatrix::zeros(3, 2);
        assert_eq!(kl_divergence(&zero, &zero).unwrap(), 0.0);

        let mu = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        let ls = DenseMatrix::zeros(1, 1);
        assert!((kl_divergence(&mu, &ls).unwrap() - 0.5).abs() < 1e-15);

        let mu = DenseMatrix::zeros(1, 1);
        let ls = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!((kl_divergence(&mu, &ls).unwrap() - 2.194528049465325).abs() < 1e-12);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_only_at_prior() {
        let mut rng = rng_from_seed(4);
        for _ in 0..50 {
            let mu = models::glorot_uniform(5, 3, &mut rng);
            let ls = models::glorot_uniform(5, 3, &mut rng);
            let kl = kl_divergence(&mu, &ls).unwrap();
            assert!(kl >= 0.0);
            if mu.max_abs() > 1e-9 || ls.max_abs() > 1e-9 {
                assert!(kl > 0.0);
            }
        }
    }

    #[test]
    fn zero_parameters_linear_ae_has_zero_gradient() {
        let adj = path3_adj();
        let a_norm = normalize_adjacency(&adj).unwrap();
        let target = adj.plus_identity().unwrap();
        let cfg = LossConfig::from_train_adjacency(&adj, false).unwrap();
        let spec = ModelSpec::linear(2, false, false);
        let params = Parameters::from_weights(vec![DenseMatrix::zeros(3, 2)]);
        let cache = forward(&a_norm, None, &params, &spec, &mut rng_from_seed(0)).unwrap();
        let grads = backward(&a_norm, None, &cache, &target, &params, &spec, &cfg).unwrap();
        assert_eq!(grads.grads[0], DenseMatrix::zeros(3, 2));
    }

    #[test]
    fn linear_ae_gradient_matches_closed_form() {
        // dL/dW = A_hat^T (E + E^T) Z = 2 A_hat (E Z) on a 3-node instance
        let adj = path3_adj();
        let a_norm = normalize_adjacency(&adj).unwrap();
        let target = adj.plus_identity().unwrap();
        let cfg = LossConfig::from_train_adjacency(&adj, false).unwrap();
        let spec = ModelSpec::linear(2, false, false);
        let w =
            DenseMatrix::from_rows(&[vec![0.4, -0.2], vec![0.1, 0.3], vec![-0.5, 0.2]]).unwrap();
        let params = Parameters::from_weights(vec![w.clone()]);
        let cache = forward(&a_norm, None, &params, &spec, &mut rng_from_seed(0)).unwrap();
        let grads = backward(&a_norm, None, &cache, &target, &params, &spec, &cfg).unwrap();

        let z = spmm(&a_norm, &w).unwrap();
        let logits = models::decode_inner_product_logits(&z).unwrap();
        let n = 3;
        let scale = cfg.norm / (n as f64 * n as f64);
        let mut e = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let r = if target.contains(i, j) {
                    cfg.pos_weight * (sigmoid(logits.get(i, j)) - 1.0)
                } else {
                    sigmoid(logits.get(i, j))
                };
                e.set(i, j, scale * r);
            }
        }
        let ez = gemm(&e, &z, false, false).unwrap();
        let closed = spmm(&a_norm, &ez).unwrap().map(|v| 2.0 * v);
        for (a, b) in grads.grads[0].values().iter().zip(closed.values()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn ae_backward_never_reads_variational_fields() {
        let adj = path3_adj();
        let a_norm = normalize_adjacency(&adj).unwrap();
        let target = adj.plus_identity().unwrap();
        let cfg = LossConfig::from_train_adjacency(&adj, false).unwrap();
        let spec = ModelSpec::gcn(2, 2, false, false).with_hidden_dims(vec![3]);
        let params = Parameters::init(&spec, 3, &mut rng_from_seed(8)).unwrap();
        let cache = forward(&a_norm, None, &params, &spec, &mut rng_from_seed(0)).unwrap();
        assert!(cache.mu.is_none() && cache.log_sigma.is_none() && cache.epsilon.is_none());
        assert!(backward(&a_norm, None, &cache, &target, &params, &spec, &cfg).is_ok());
    }

    #[test]
    fn adam_zero_gradient_leaves_parameters() {
        let spec = ModelSpec::linear(2, false, false);
        let mut params = Parameters::init(&spec, 3, &mut rng_from_seed(1)).unwrap();
        let before = params.weights()[0].clone();
        let mut state = OptimizerState::new(&params, 0.05);
        let grads = GradientSet {
            grads: vec![DenseMatrix::zeros(3, 2)],
        };
        adam_step(&mut params, &grads, &mut state).unwrap();
        assert_eq!(params.weights()[0], before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn adam_first_step_closed_form() {
        let w0 = DenseMatrix::from_rows(&[vec![0.5, -0.25], vec![1.5, 0.0]]).unwrap();
        let g = DenseMatrix::from_rows(&[vec![0.3, -2.0], vec![1e-3, 0.0]]).unwrap();
        let mut params = Parameters::from_weights(vec![w0.clone()]);
        let mut state = OptimizerState::new(&params, 0.01);
        adam_step(
            &mut params,
            &GradientSet {
                grads: vec![g.clone()],
            },
            &mut state,
        )
        .unwrap();
        for ((after, &before), &gv) in params.weights()[0]
            .values()
            .iter()
            .zip(w0.values())
            .zip(g.values())
        {
            let expected = before - 0.01 * gv / (gv.abs() + ADAM_EPSILON);
            assert!((after - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn adam_rejects_non_finite_gradient() {
        let mut params = Parameters::from_weights(vec![DenseMatrix::zeros(1, 1)]);
        let mut state = OptimizerState::new(&params, 0.01);
        let grads = GradientSet {
            grads: vec![DenseMatrix::from_rows(&[vec![f64::NAN]]).unwrap()],
        };
        assert!(matches!(
            adam_step(&mut params, &grads, &mut state),
            Err(Error::NonFiniteGradient { index: 0 })
        ));
    }

    #[test]
    fn adam_steps_replay_bitwise() {
        let run = || {
            let spec = ModelSpec::linear(2, false, false);
            let mut params = Parameters::init(&spec, 3, &mut rng_from_seed(21)).unwrap();
            let mut state = OptimizerState::new(&params, 0.01);
            let g = models::glorot_uniform(3, 2, &mut rng_from_seed(22));
            for _ in 0..2 {
                adam_step(
                    &mut params,
                    &GradientSet {
                        grads: vec![g.clone()],
                    },
                    &mut state,
                )
                .unwrap();
            }
            params.weights()[0].clone()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let adj = path3_adj();
        let spec = ModelSpec::linear(2, false, false);
        let hp = TrainConfig {
            epochs: 0,
            learning_rate: 0.01,
            validation: None,
        };
        let out = train(&adj, None, &spec, &hp, &mut rng_from_seed(3)).unwrap();
        let expected = Parameters::init(&spec, 3, &mut rng_from_seed(3)).unwrap();
        assert_eq!(out.params.weights(), expected.weights());
        assert!(out.loss_trace.is_empty());
    }

    #[test]
    fn linear_ae_learns_the_path_graph() {
        let adj = path3_adj();
        let spec = ModelSpec::linear(2, false, false);
        let hp = TrainConfig {
            epochs: 200,
            learning_rate: 0.01,
            validation: None,
        };
        let out = train(&adj, None, &spec, &hp, &mut rng_from_seed(7)).unwrap();
        assert!(out.loss_trace.iter().all(|l| l.is_finite()));
        assert!(out.loss_trace.last().unwrap() < &out.loss_trace[0]);

        let a_norm = normalize_adjacency(&adj).unwrap();
        let z = models::embed(&a_norm, None, &out.params, &spec).unwrap();
        let probs = models::score_edges(&z, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        // true edges outrank the single non-edge (0, 2)
        assert!(probs[0] > probs[2], "{probs:?}");
        assert!(probs[1] > probs[2], "{probs:?}");
    }

    #[test]
    fn training_is_deterministic_for_fixed_seed() {
        let adj = path3_adj();
        let spec = ModelSpec::linear(2, true, false);
        let hp = TrainConfig {
            epochs: 25,
            learning_rate: 0.01,
            validation: None,
        };
        let a = train(&adj, None, &spec, &hp, &mut rng_from_seed(11)).unwrap();
        let b = train(&adj, None, &spec, &hp, &mut rng_from_seed(11)).unwrap();
        assert_eq!(a.params.weights(), b.params.weights());
        assert_eq!(a.loss_trace, b.loss_trace);
    }
}
