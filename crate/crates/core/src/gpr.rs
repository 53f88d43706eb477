//! Exact and feature-space Gaussian process regression.
//!
//! The exact path solves with the N x N kernel matrix; the feature path
//! factorizes the D x D system A = Phi^T Phi / noise + I instead, which is
//! the same predictive distribution whenever the kernel equals the feature
//! inner product. Hyperparameters are fitted by gradient ascent on the log
//! marginal likelihood in log-parameter space.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::kernel::{check_dims, gaussian_kernel, kernel_matrix, median_heuristic, KernelParams};
use crate::rng::child_rng;

/// A regression training set: one input row per target entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: DMatrix<f64>,
    targets: DVector<f64>,
}

impl Dataset {
    pub fn new(inputs: DMatrix<f64>, targets: DVector<f64>) -> Result<Self> {
        if inputs.nrows() == 0 {
            return Err(Error::EmptyInput("dataset"));
        }
        check_dims(inputs.nrows(), targets.len())?;
        if inputs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset inputs"));
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset targets"));
        }
        Ok(Self { inputs, targets })
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.inputs.ncols()
    }

    /// Column mean of the inputs.
    pub fn input_mean(&self) -> DVector<f64> {
        self.inputs.row_mean().transpose()
    }

    /// Rows of the dataset selected by `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("selection"));
        }
        let inputs = DMatrix::from_fn(indices.len(), self.dim(), |i, j| {
            self.inputs[(indices[i], j)]
        });
        let targets = DVector::from_fn(indices.len(), |i, _| self.targets[indices[i]]);
        Dataset::new(inputs, targets)
    }
}

/// Per-point predictive means and (function-value) variances.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveGaussian {
    mean: DVector<f64>,
    variance: DVector<f64>,
}

impl PredictiveGaussian {
    pub fn new(mean: DVector<f64>, variance: DVector<f64>) -> Result<Self> {
        check_dims(mean.len(), variance.len())?;
        if variance.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::invalid("variance", "entries must be finite and nonnegative"));
        }
        Ok(Self { mean, variance })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn variance(&self) -> &DVector<f64> {
        &self.variance
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.len() == 0
    }
}

/// Cholesky factorization with escalating trace-scaled jitter. The kernel
/// matrix plus noise is positive definite in exact arithmetic; jitter only
/// absorbs roundoff on badly conditioned systems.
pub(crate) fn spd_cholesky(matrix: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    let n = matrix.nrows();
    let scale = {
        let t = matrix.trace() / n as f64;
        if t > 0.0 {
            t
        } else {
            1.0
        }
    };
    let mut jitter = 0.0f64;
    loop {
        let trial = if jitter == 0.0 {
            matrix.clone()
        } else {
            matrix + DMatrix::identity(n, n) * (jitter * scale)
        };
        if let Some(chol) = Cholesky::new(trial) {
            return Ok(chol);
        }
        jitter = if jitter == 0.0 { 1e-10 } else { jitter * 10.0 };
        if jitter > 1e-6 {
            return Err(Error::Factorization(format!(
                "not positive definite at size {n} (trace scale {scale:.3e}, jitter up to 1e-6 tried)"
            )));
        }
    }
}

/// Closed-form GP prediction with the exact Gaussian kernel.
pub fn exact_gpr_predict(
    train: &Dataset,
    test_inputs: &DMatrix<f64>,
    params: &KernelParams,
) -> Result<PredictiveGaussian> {
    check_dims(train.dim(), test_inputs.ncols())?;
    let kernel = |a: &DVector<f64>, b: &DVector<f64>| gaussian_kernel(a, b, params).unwrap();
    let n = train.len();
    let mut k_ff = kernel_matrix(train.inputs(), train.inputs(), kernel)?;
    for i in 0..n {
        k_ff[(i, i)] += params.noise_variance();
    }
    let chol = spd_cholesky(&k_ff)?;
    let alpha = chol.solve(train.targets());
    let k_star = kernel_matrix(train.inputs(), test_inputs, kernel)?;
    let mean = k_star.transpose() * &alpha;
    let solved = chol.solve(&k_star);
    let k_diag = params.kernel_variance();
    let variance = DVector::from_fn(test_inputs.nrows(), |j, _| {
        (k_diag - k_star.column(j).dot(&solved.column(j))).max(0.0)
    });
    PredictiveGaussian::new(mean, variance)
}

/// A fitted feature-space GP: factorized system matrix and projected targets.
#[derive(Debug, Clone)]
pub struct FeatureGPModel {
    factor: Cholesky<f64, Dyn>,
    projected_targets: DVector<f64>,
    /// factor^{-1} projected_targets / noise, cached for prediction.
    weights: DVector<f64>,
    noise_variance: f64,
    feature_dim: usize,
}

/// Builds and factorizes A = Phi^T Phi / noise + I and projects the targets.
pub fn feature_gpr_fit(
    features: &DMatrix<f64>,
    targets: &DVector<f64>,
    noise_variance: f64,
) -> Result<FeatureGPModel> {
    check_dims(features.nrows(), targets.len())?;
    if !(noise_variance.is_finite() && noise_variance > 0.0) {
        return Err(Error::invalid("noise_variance", "must be positive"));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature matrix"));
    }
    let d = features.ncols();
    let mut a = features.transpose() * features / noise_variance;
    for i in 0..d {
        a[(i, i)] += 1.0;
    }
    let factor = spd_cholesky(&a)?;
    let projected_targets = features.transpose() * targets;
    let weights = factor.solve(&projected_targets) / noise_variance;
    Ok(FeatureGPModel {
        factor,
        projected_targets,
        weights,
        noise_variance,
        feature_dim: d,
    })
}

impl FeatureGPModel {
    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn projected_targets(&self) -> &DVector<f64> {
        &self.projected_targets
    }

    /// Lower-triangular Cholesky factor of the system matrix.
    pub fn system_factor_l(&self) -> DMatrix<f64> {
        self.factor.l()
    }

    /// Predictive mean and variance for a single feature vector.
    pub fn predict_one(&self, feature: &DVector<f64>) -> Result<(f64, f64)> {
        check_dims(self.feature_dim, feature.len())?;
        let mean = feature.dot(&self.weights);
        let variance = feature.dot(&self.factor.solve(feature)).max(0.0);
        Ok((mean, variance))
    }
}

/// Predictions for a matrix of test feature rows.
pub fn feature_gpr_predict(
    model: &FeatureGPModel,
    test_features: &DMatrix<f64>,
) -> Result<PredictiveGaussian> {
    check_dims(model.feature_dim, test_features.ncols())?;
    let m = test_features.nrows();
    let mut mean = DVector::zeros(m);
    let mut variance = DVector::zeros(m);
    for j in 0..m {
        let (mu, var) = model.predict_one(&test_features.row(j).transpose())?;
        mean[j] = mu;
        variance[j] = var;
    }
    PredictiveGaussian::new(mean, variance)
}

/// Gradient of the log marginal likelihood with respect to the logs of the
/// three kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmlGradient {
    pub log_lengthscale: f64,
    pub log_kernel_variance: f64,
    pub log_noise_variance: f64,
}

impl LmlGradient {
    pub fn inf_norm(&self) -> f64 {
        self.log_lengthscale
            .abs()
            .max(self.log_kernel_variance.abs())
            .max(self.log_noise_variance.abs())
    }
}

/// Log marginal likelihood of the training data under the exact Gaussian
/// kernel, with its gradient in log-parameter space.
pub fn log_marginal_likelihood(
    train: &Dataset,
    params: &KernelParams,
) -> Result<(f64, LmlGradient)> {
    let n = train.len();
    let l = params.lengthscale();
    let sigma2 = params.kernel_variance();
    let r2 = kernel_matrix(train.inputs(), train.inputs(), |a, b| {
        (a - b).norm_squared()
    })?;
    let e = r2.map(|v| (-v / (2.0 * l * l)).exp());
    let mut k_y = &e * sigma2;
    for i in 0..n {
        k_y[(i, i)] += params.noise_variance();
    }
    let chol = spd_cholesky(&k_y)?;
    let alpha = chol.solve(train.targets());
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let value = -0.5 * train.targets().dot(&alpha)
        - 0.5 * log_det
        - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

    // d LML / d theta = 0.5 * tr((alpha alpha^T - K^-1) dK/dtheta)
    let k_inv = chol.inverse();
    let m = &alpha * alpha.transpose() - &k_inv;
    // dK/d(log l) = sigma^2 E .* R2 / l^2
    let dk_log_l = e.component_mul(&r2) * (sigma2 / (l * l));
    let g_log_l = 0.5 * m.component_mul(&dk_log_l).sum();
    // dK/d(log sigma^2) = sigma^2 E
    let g_log_s2 = 0.5 * m.component_mul(&e).sum() * sigma2;
    // dK/d(log noise) = noise * I
    let g_log_noise = 0.5 * params.noise_variance() * m.trace();
    Ok((
        value,
        LmlGradient {
            log_lengthscale: g_log_l,
            log_kernel_variance: g_log_s2,
            log_noise_variance: g_log_noise,
        },
    ))
}

/// Result of a hyperparameter fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperFit {
    pub params: KernelParams,
    pub lml: f64,
    /// False when the gradient had not leveled off when iterations ran out;
    /// the best iterate is returned regardless.
    pub converged: bool,
}

const FIT_SUBSAMPLE_LIMIT: usize = 10_000;
const RESTART_FACTORS: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
const LOG_PARAM_BOUND: f64 = 20.0;
const GRADIENT_TOL: f64 = 1e-5;

/// Fits the kernel parameters by multi-start gradient ascent on the log
/// marginal likelihood. Restart length scales are the median heuristic times
/// {0.1, 0.3, 1, 3, 10}; the variance parameters start from `init`. Training
/// sets beyond 10^4 points are subsampled (seeded) for the fit.
pub fn fit_hyperparameters(
    train: &Dataset,
    init: &KernelParams,
    iters: usize,
    seed: u64,
) -> Result<HyperFit> {
    let fit_data;
    let data = if train.len() > FIT_SUBSAMPLE_LIMIT {
        let mut rng = child_rng(seed, &[0x46]);
        let mut idx =
            rand::seq::index::sample(&mut rng, train.len(), FIT_SUBSAMPLE_LIMIT).into_vec();
        idx.sort_unstable();
        fit_data = train.select(&idx)?;
        &fit_data
    } else {
        train
    };
    let med = median_heuristic(data.inputs())?;
    let base_l = if med.degenerate {
        init.lengthscale()
    } else {
        med.value
    };
    let mut best: Option<(f64, [f64; 3], bool)> = None;
    for factor in RESTART_FACTORS {
        let start = [
            (base_l * factor).ln(),
            init.kernel_variance().ln(),
            init.noise_variance().ln(),
        ];
        if let Some((lml, theta, converged)) = ascend(data, start, iters) {
            if best.map_or(true, |(b, _, _)| lml > b) {
                best = Some((lml, theta, converged));
            }
        }
    }
    let (lml, theta, converged) =
        best.ok_or_else(|| Error::Factorization("all restarts failed to evaluate".into()))?;
    Ok(HyperFit {
        params: KernelParams::new(theta[0].exp(), theta[1].exp(), theta[2].exp())?,
        lml,
        converged,
    })
}

fn eval_lml(data: &Dataset, theta: &[f64; 3]) -> Option<(f64, [f64; 3])> {
    let params = KernelParams::new(theta[0].exp(), theta[1].exp(), theta[2].exp()).ok()?;
    let (value, grad) = log_marginal_likelihood(data, &params).ok()?;
    if !value.is_finite() {
        return None;
    }
    Some((
        value,
        [
            grad.log_lengthscale,
            grad.log_kernel_variance,
            grad.log_noise_variance,
        ],
    ))
}

fn clamp_theta(theta: &mut [f64; 3]) {
    for t in theta.iter_mut() {
        *t = t.clamp(-LOG_PARAM_BOUND, LOG_PARAM_BOUND);
    }
}

/// Backtracking gradient ascent in log-parameter space. Returns the best
/// iterate, its LML, and whether the gradient leveled off.
fn ascend(data: &Dataset, start: [f64; 3], iters: usize) -> Option<(f64, [f64; 3], bool)> {
    let mut theta = start;
    clamp_theta(&mut theta);
    let (mut value, mut grad) = eval_lml(data, &theta)?;
    let mut step = 0.25;
    let mut converged = false;
    for _ in 0..iters {
        let gnorm = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if gnorm < GRADIENT_TOL {
            converged = true;
            break;
        }
        let mut accepted = false;
        while step >= 1e-12 {
            let mut candidate = [
                theta[0] + step * grad[0],
                theta[1] + step * grad[1],
                theta[2] + step * grad[2],
            ];
            clamp_theta(&mut candidate);
            if let Some((cand_value, cand_grad)) = eval_lml(data, &candidate) {
                if cand_value > value {
                    theta = candidate;
                    value = cand_value;
                    grad = cand_grad;
                    step = (step * 2.0).min(1.0);
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // Line search stalled; the gradient may still be large but no
            // ascent direction remains at this resolution.
            converged = grad.iter().fold(0.0f64, |a, g| a.max(g.abs())) < GRADIENT_TOL;
            break;
        }
    }
    Some((value, theta, converged))
}
