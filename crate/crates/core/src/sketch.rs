//! Randomized sketches of polynomial kernels.
//!
//! A degree-n sketch maps x to (W_1 x ⊙ ... ⊙ W_n x) / sqrt(D) so that the
//! inner product of two sketched vectors is an unbiased estimate of (x.y)^n.
//! Three weight distributions are supported; their estimator variances are
//! available in closed form through [`sketch_variance`].

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::check_dims;
use crate::rng::child_rng;

const TAG_DENSE: u64 = 0x01;
const TAG_SIGN: u64 = 0x02;
const TAG_PERM: u64 = 0x03;

/// Weight distribution of a polynomial sketch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchKind {
    /// Dense weights with i.i.d. standard normal entries.
    Gaussian,
    /// Dense weights with i.i.d. uniform {+1, -1} entries.
    Rademacher,
    /// Structured sketch: signed, permuted Walsh-Hadamard projections per
    /// factor, applied blockwise via the fast transform.
    TensorSrht,
}

/// A sampled degree-n polynomial sketch.
#[derive(Debug, Clone)]
pub struct PolynomialSketch {
    kind: SketchKind,
    degree: usize,
    input_dim: usize,
    feature_dim: usize,
    weights: Weights,
}

#[derive(Debug, Clone)]
enum Weights {
    /// One D x d matrix per degree factor.
    Dense(Vec<DMatrix<f64>>),
    Srht(SrhtState),
}

#[derive(Debug, Clone)]
struct SrhtState {
    padded_dim: usize,
    blocks: usize,
    /// Sign vectors, indexed by block * degree + factor.
    signs: Vec<DVector<f64>>,
    /// Output shuffles, same indexing as `signs`.
    perms: Vec<Vec<usize>>,
}

/// Samples a sketch. Identical seeds give identical sketches; each weight
/// matrix, sign vector and permutation draws from its own child stream, so
/// sketches of different degrees built from the same seed share their
/// low-degree factors' draws with nothing.
pub fn sample_sketch(
    kind: SketchKind,
    degree: usize,
    input_dim: usize,
    feature_dim: usize,
    seed: u64,
) -> Result<PolynomialSketch> {
    if degree == 0 {
        return Err(Error::invalid("degree", "must be at least 1"));
    }
    if input_dim == 0 {
        return Err(Error::invalid("input_dim", "must be at least 1"));
    }
    if feature_dim == 0 {
        return Err(Error::invalid("feature_dim", "must be at least 1"));
    }
    let weights = match kind {
        SketchKind::Gaussian => Weights::Dense(
            (0..degree)
                .map(|i| {
                    let mut rng = child_rng(seed, &[TAG_DENSE, i as u64]);
                    DMatrix::from_row_iterator(
                        feature_dim,
                        input_dim,
                        std::iter::repeat_with(|| rng.sample::<f64, _>(StandardNormal))
                            .take(feature_dim * input_dim),
                    )
                })
                .collect(),
        ),
        SketchKind::Rademacher => Weights::Dense(
            (0..degree)
                .map(|i| {
                    let mut rng = child_rng(seed, &[TAG_DENSE, i as u64]);
                    DMatrix::from_row_iterator(
                        feature_dim,
                        input_dim,
                        std::iter::repeat_with(|| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                            .take(feature_dim * input_dim),
                    )
                })
                .collect(),
        ),
        SketchKind::TensorSrht => {
            let padded_dim = input_dim.next_power_of_two();
            let blocks = feature_dim.div_ceil(padded_dim);
            let mut signs = Vec::with_capacity(blocks * degree);
            let mut perms = Vec::with_capacity(blocks * degree);
            for b in 0..blocks {
                for i in 0..degree {
                    let mut rng = child_rng(seed, &[TAG_SIGN, b as u64, i as u64]);
                    signs.push(DVector::from_iterator(
                        padded_dim,
                        std::iter::repeat_with(|| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                            .take(padded_dim),
                    ));
                    let mut rng = child_rng(seed, &[TAG_PERM, b as u64, i as u64]);
                    let mut perm: Vec<usize> = (0..padded_dim).collect();
                    perm.shuffle(&mut rng);
                    perms.push(perm);
                }
            }
            Weights::Srht(SrhtState {
                padded_dim,
                blocks,
                signs,
                perms,
            })
        }
    };
    Ok(PolynomialSketch {
        kind,
        degree,
        input_dim,
        feature_dim,
        weights,
    })
}

impl PolynomialSketch {
    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Applies the sketch to one input vector.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dims(self.input_dim, x.len())?;
        let scale = 1.0 / (self.feature_dim as f64).sqrt();
        match &self.weights {
            Weights::Dense(mats) => {
                let mut acc = &mats[0] * x;
                for w in &mats[1..] {
                    acc.component_mul_assign(&(w * x));
                }
                Ok(acc * scale)
            }
            Weights::Srht(state) => {
                let mut padded = DVector::zeros(state.padded_dim);
                padded.rows_mut(0, self.input_dim).copy_from(x);
                let mut out = Vec::with_capacity(state.blocks * state.padded_dim);
                let mut scratch = vec![0.0; state.padded_dim];
                for b in 0..state.blocks {
                    let mut block = DVector::from_element(state.padded_dim, 1.0);
                    for i in 0..self.degree {
                        let idx = b * self.degree + i;
                        let signed = state.signs[idx].component_mul(&padded);
                        scratch.copy_from_slice(signed.as_slice());
                        fwht(&mut scratch)?;
                        let perm = &state.perms[idx];
                        for (j, &src) in perm.iter().enumerate() {
                            block[j] *= scratch[src];
                        }
                    }
                    out.extend_from_slice(block.as_slice());
                }
                out.truncate(self.feature_dim);
                Ok(DVector::from_vec(out) * scale)
            }
        }
    }
}

/// In-place fast Walsh-Hadamard transform (unnormalized butterfly).
/// The length must be a power of two.
pub fn fwht(values: &mut [f64]) -> Result<()> {
    let n = values.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for j in start..start + h {
                let a = values[j];
                let b = values[j + h];
                values[j] = a + b;
                values[j + h] = a - b;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// Number of intra-block row pairings of a blockwise-orthogonal sketch with
/// `feature_dim` rows over dimension `d`.
fn coupling_count(feature_dim: usize, d: usize) -> f64 {
    let full = (feature_dim / d) * d * (d - 1);
    let rem = feature_dim % d;
    (full + rem * rem.saturating_sub(1)) as f64
}

/// Closed-form variance of the kernel estimate phi_n(x)^T phi_n(y).
pub fn sketch_variance(
    kind: SketchKind,
    x: &DVector<f64>,
    y: &DVector<f64>,
    degree: usize,
    feature_dim: usize,
) -> Result<f64> {
    check_dims(x.len(), y.len())?;
    if degree == 0 {
        return Err(Error::invalid("degree", "must be at least 1"));
    }
    if feature_dim == 0 {
        return Err(Error::invalid("feature_dim", "must be at least 1"));
    }
    let moments = PairMoments::new(x, y);
    Ok(variance_from_moments(kind, &moments, degree, feature_dim))
}

/// Scalar moments of an input pair, precomputed once when the variance is
/// evaluated for many degrees or feature counts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairMoments {
    pub nx2: f64,
    pub ny2: f64,
    pub dot: f64,
    /// sum_k x_k^2 y_k^2
    pub sq_sum: f64,
    pub dim: usize,
}

impl PairMoments {
    pub(crate) fn new(x: &DVector<f64>, y: &DVector<f64>) -> Self {
        Self {
            nx2: x.norm_squared(),
            ny2: y.norm_squared(),
            dot: x.dot(y),
            sq_sum: x
                .iter()
                .zip(y.iter())
                .map(|(a, b)| a * a * b * b)
                .sum(),
            dim: x.len(),
        }
    }
}

pub(crate) fn variance_from_moments(
    kind: SketchKind,
    m: &PairMoments,
    degree: usize,
    feature_dim: usize,
) -> f64 {
    let n = degree as i32;
    let dd = feature_dim as f64;
    let t2 = m.dot * m.dot;
    let gaussian = ((m.nx2 * m.ny2 + 2.0 * t2).powi(n) - t2.powi(n)) / dd;
    let rademacher =
        ((m.nx2 * m.ny2 + 2.0 * (t2 - m.sq_sum)).powi(n) - t2.powi(n)) / dd;
    let value = match kind {
        SketchKind::Gaussian => gaussian,
        SketchKind::Rademacher => rademacher,
        SketchKind::TensorSrht => {
            let c = coupling_count(feature_dim, m.dim);
            if c == 0.0 {
                // No intra-block couplings (includes d = 1); the correction
                // term is zero and its 1/(d-1) factor must not be evaluated.
                rademacher
            } else {
                let u = (m.nx2 * m.ny2 + t2 - 2.0 * m.sq_sum) / (m.dim as f64 - 1.0);
                rademacher - c / (dd * dd) * (t2.powi(n) - (t2 - u).powi(n))
            }
        }
    };
    value.max(0.0)
}
