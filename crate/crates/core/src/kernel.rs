//! Gaussian kernel, its truncated power-series form, and kernel matrices.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::child_rng;

/// Hyperparameters of the Gaussian kernel plus the observation noise.
///
/// All three values are strictly positive; construction through
/// [`KernelParams::new`] enforces this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelParams")]
pub struct KernelParams {
    lengthscale: f64,
    kernel_variance: f64,
    noise_variance: f64,
}

#[derive(Deserialize)]
struct RawKernelParams {
    lengthscale: f64,
    kernel_variance: f64,
    noise_variance: f64,
}

impl TryFrom<RawKernelParams> for KernelParams {
    type Error = Error;

    fn try_from(raw: RawKernelParams) -> Result<Self> {
        KernelParams::new(raw.lengthscale, raw.kernel_variance, raw.noise_variance)
    }
}

impl KernelParams {
    pub fn new(lengthscale: f64, kernel_variance: f64, noise_variance: f64) -> Result<Self> {
        for (name, value) in [
            ("lengthscale", lengthscale),
            ("kernel_variance", kernel_variance),
            ("noise_variance", noise_variance),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(Self {
            lengthscale,
            kernel_variance,
            noise_variance,
        })
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    pub fn kernel_variance(&self) -> f64 {
        self.kernel_variance
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Same kernel with a different length scale.
    pub fn with_lengthscale(&self, lengthscale: f64) -> Result<Self> {
        Self::new(lengthscale, self.kernel_variance, self.noise_variance)
    }
}

/// An input vector divided by the length scale, optionally after recentering.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledInput(DVector<f64>);

impl ScaledInput {
    pub fn new(x: &DVector<f64>, params: &KernelParams) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("input vector"));
        }
        Ok(Self(x / params.lengthscale()))
    }

    /// Scaled form of `x - center`.
    pub fn shifted(x: &DVector<f64>, center: &DVector<f64>, params: &KernelParams) -> Result<Self> {
        check_dims(center.len(), x.len())?;
        Self::new(&(x - center), params)
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Exact Gaussian kernel sigma^2 exp(-||x-y||^2 / (2 l^2)).
pub fn gaussian_kernel(x: &DVector<f64>, y: &DVector<f64>, params: &KernelParams) -> Result<f64> {
    check_dims(x.len(), y.len())?;
    let l = params.lengthscale();
    let r2 = (x - y).norm_squared();
    Ok(params.kernel_variance() * (-r2 / (2.0 * l * l)).exp())
}

/// Truncation of the power-series form of the Gaussian kernel at degree `p`:
/// sigma^2 exp(-(||x~||^2 + ||y~||^2)/2) * sum_{n=0}^{p} (x~.y~)^n / n!,
/// with x~ = x/l and y~ = y/l.
pub fn truncated_maclaurin_kernel(
    x: &DVector<f64>,
    y: &DVector<f64>,
    params: &KernelParams,
    p: usize,
) -> Result<f64> {
    check_dims(x.len(), y.len())?;
    let l2 = params.lengthscale() * params.lengthscale();
    let nx2 = x.norm_squared() / l2;
    let ny2 = y.norm_squared() / l2;
    let t = x.dot(y) / l2;
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 1..=p {
        term *= t / n as f64;
        sum += term;
    }
    Ok(params.kernel_variance() * (-(nx2 + ny2) / 2.0).exp() * sum)
}

/// Truncated kernel recentered at `center`: equals
/// [`truncated_maclaurin_kernel`] evaluated at (x - center, y - center).
/// When either argument coincides with the center, the value equals the exact
/// Gaussian kernel for every truncation degree.
pub fn localized_truncated_kernel(
    x: &DVector<f64>,
    y: &DVector<f64>,
    center: &DVector<f64>,
    params: &KernelParams,
    p: usize,
) -> Result<f64> {
    check_dims(x.len(), center.len())?;
    check_dims(y.len(), center.len())?;
    truncated_maclaurin_kernel(&(x - center), &(y - center), params, p)
}

/// Dense kernel matrix with entry (i, j) = kernel(x_i, y_j).
pub fn kernel_matrix<F>(x: &DMatrix<f64>, y: &DMatrix<f64>, kernel: F) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    check_dims(x.ncols(), y.ncols())?;
    let rows_x: Vec<DVector<f64>> = (0..x.nrows()).map(|i| x.row(i).transpose()).collect();
    let rows_y: Vec<DVector<f64>> = (0..y.nrows()).map(|j| y.row(j).transpose()).collect();
    Ok(DMatrix::from_fn(x.nrows(), y.nrows(), |i, j| {
        kernel(&rows_x[i], &rows_y[j])
    }))
}

/// Median of the pairwise Euclidean distances of the rows of `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseMedian {
    pub value: f64,
    /// True when all (sampled) points coincide, so the median is zero and
    /// unusable as a length scale.
    pub degenerate: bool,
}

/// Above this row count the median is taken over a fixed-seed uniform
/// subsample of this many rows instead of all pairs.
const MEDIAN_EXACT_LIMIT: usize = 5000;
const MEDIAN_SUBSAMPLE_SEED: u64 = 0x6d65_6468; // "medh"

/// Median pairwise Euclidean distance of the training inputs, the standard
/// plug-in choice for the length scale. Needs at least two rows; an even
/// number of pairs yields the mean of the two middle distances.
pub fn median_heuristic(x: &DMatrix<f64>) -> Result<PairwiseMedian> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid("inputs", "median heuristic needs at least 2 rows"));
    }
    let indices: Vec<usize> = if n <= MEDIAN_EXACT_LIMIT {
        (0..n).collect()
    } else {
        let mut rng = child_rng(MEDIAN_SUBSAMPLE_SEED, &[n as u64]);
        let mut picked = rand::seq::index::sample(&mut rng, n, MEDIAN_EXACT_LIMIT).into_vec();
        picked.sort_unstable();
        picked
    };
    let m = indices.len();
    let mut dists = Vec::with_capacity(m * (m - 1) / 2);
    for a in 0..m {
        let ra = x.row(indices[a]);
        for b in (a + 1)..m {
            dists.push((ra - x.row(indices[b])).norm());
        }
    }
    dists.sort_unstable_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    let k = dists.len();
    let value = if k % 2 == 1 {
        dists[k / 2]
    } else {
        0.5 * (dists[k / 2 - 1] + dists[k / 2])
    };
    Ok(PairwiseMedian {
        value,
        degenerate: value == 0.0,
    })
}
