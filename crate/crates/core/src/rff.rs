//! Random Fourier feature baseline for the Gaussian kernel.
//!
//! Frequencies are sampled from N(0, I / l^2); each frequency contributes a
//! cos/sin coordinate pair, which makes the diagonal of the approximate
//! kernel exact. The structured variant draws blockwise-orthogonal frequency
//! directions with chi-distributed row norms.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::{check_dims, KernelParams};
use crate::rng::child_rng;

const TAG_FREQ: u64 = 0x20;
const TAG_BLOCK: u64 = 0x21;
const TAG_CHI: u64 = 0x22;

#[derive(Debug, Clone)]
pub struct FourierFeatureMap {
    /// (D/2) x d frequency matrix.
    frequencies: DMatrix<f64>,
    kernel_variance: f64,
    structured: bool,
}

impl FourierFeatureMap {
    /// Samples a map with `feature_dim` output coordinates (must be even:
    /// one cos/sin pair per frequency row).
    pub fn sample(
        input_dim: usize,
        feature_dim: usize,
        params: &KernelParams,
        structured: bool,
        seed: u64,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::invalid("input_dim", "must be at least 1"));
        }
        if feature_dim == 0 || feature_dim % 2 != 0 {
            return Err(Error::invalid(
                "feature_dim",
                format!("must be positive and even, got {feature_dim}"),
            ));
        }
        let rows = feature_dim / 2;
        let inv_l = 1.0 / params.lengthscale();
        let frequencies = if structured {
            let blocks = rows.div_ceil(input_dim);
            let mut stacked = DMatrix::zeros(blocks * input_dim, input_dim);
            for b in 0..blocks {
                let mut rng = child_rng(seed, &[TAG_BLOCK, b as u64]);
                let block = orthogonal_block(input_dim, &mut rng);
                let mut chi_rng = child_rng(seed, &[TAG_CHI, b as u64]);
                let chi = ChiSquared::new(input_dim as f64)
                    .map_err(|e| Error::invalid("input_dim", e.to_string()))?;
                for r in 0..input_dim {
                    let norm = chi.sample(&mut chi_rng).sqrt();
                    stacked
                        .row_mut(b * input_dim + r)
                        .copy_from(&(block.row(r) * (norm * inv_l)));
                }
            }
            stacked.rows(0, rows).into_owned()
        } else {
            let mut rng = child_rng(seed, &[TAG_FREQ]);
            DMatrix::from_row_iterator(
                rows,
                input_dim,
                std::iter::repeat_with(|| rng.sample::<f64, _>(StandardNormal) * inv_l)
                    .take(rows * input_dim),
            )
        };
        Ok(Self {
            frequencies,
            kernel_variance: params.kernel_variance(),
            structured,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.frequencies.ncols()
    }

    pub fn feature_dim(&self) -> usize {
        2 * self.frequencies.nrows()
    }

    pub fn is_structured(&self) -> bool {
        self.structured
    }

    /// sigma * sqrt(2/D) * (cos(w_1.x), sin(w_1.x), ..).
    pub fn feature_vector(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dims(self.input_dim(), x.len())?;
        let proj = &self.frequencies * x;
        let d = self.feature_dim();
        let scale = self.kernel_variance.sqrt() * (2.0 / d as f64).sqrt();
        let mut out = DVector::zeros(d);
        for (j, w) in proj.iter().enumerate() {
            out[2 * j] = scale * w.cos();
            out[2 * j + 1] = scale * w.sin();
        }
        Ok(out)
    }

    pub fn featurize(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        check_dims(self.input_dim(), x.ncols())?;
        let mut out = DMatrix::zeros(x.nrows(), self.feature_dim());
        for i in 0..x.nrows() {
            let row = self.feature_vector(&x.row(i).transpose())?;
            out.row_mut(i).copy_from(&row.transpose());
        }
        Ok(out)
    }
}

/// A d x d matrix with orthonormal rows, from the QR factorization of a
/// standard normal matrix.
fn orthogonal_block(d: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    qr.q().transpose()
}
