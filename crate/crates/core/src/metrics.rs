//! Evaluation of approximate predictors against a reference.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpr::PredictiveGaussian;
use crate::kernel::check_dims;

/// Direction of the per-point Gaussian KL divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KlDirection {
    /// KL(reference || approximation) — the default.
    #[default]
    RefToApprox,
    /// KL(approximation || reference).
    ApproxToRef,
}

/// KL divergence between two univariate Gaussians,
/// KL(p || q) = 0.5 [ln(q_var/p_var) + (p_var + (p_mean - q_mean)^2)/q_var - 1]
/// with p the reference. Clamped at zero to absorb roundoff.
pub fn kl_gaussian(ref_mean: f64, ref_var: f64, approx_mean: f64, approx_var: f64) -> Result<f64> {
    if !(ref_var > 0.0) || !ref_var.is_finite() {
        return Err(Error::invalid("ref_var", format!("must be positive, got {ref_var}")));
    }
    if !(approx_var > 0.0) || !approx_var.is_finite() {
        return Err(Error::invalid(
            "approx_var",
            format!("must be positive, got {approx_var}"),
        ));
    }
    let diff = ref_mean - approx_mean;
    let kl = 0.5 * ((approx_var / ref_var).ln() + (ref_var + diff * diff) / approx_var - 1.0);
    Ok(kl.max(0.0))
}

/// Root mean squared error.
pub fn rmse(predictions: &DVector<f64>, targets: &DVector<f64>) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    check_dims(predictions.len(), targets.len())?;
    let mse = (predictions - targets).norm_squared() / predictions.len() as f64;
    Ok(mse.sqrt())
}

/// Summary of one approximate predictor against the reference.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub mean_kl: f64,
    pub sum_kl: f64,
    pub rmse: f64,
    pub per_point_kl: Vec<f64>,
    pub config_echo: serde_json::Value,
}

/// Per-point KL against the reference plus RMSE of the approximate means
/// against the targets. Predictive variances of zero are floored at
/// `var_floor` so prior-collapsed predictions stay comparable.
pub fn evaluate(
    reference: &PredictiveGaussian,
    approx: &PredictiveGaussian,
    targets: &DVector<f64>,
    direction: KlDirection,
    var_floor: f64,
    config_echo: serde_json::Value,
) -> Result<EvalReport> {
    check_dims(reference.len(), approx.len())?;
    check_dims(reference.len(), targets.len())?;
    let mut per_point_kl = Vec::with_capacity(reference.len());
    for i in 0..reference.len() {
        let (p_mean, p_var, q_mean, q_var) = match direction {
            KlDirection::RefToApprox => (
                reference.mean()[i],
                reference.variance()[i],
                approx.mean()[i],
                approx.variance()[i],
            ),
            KlDirection::ApproxToRef => (
                approx.mean()[i],
                approx.variance()[i],
                reference.mean()[i],
                reference.variance()[i],
            ),
        };
        per_point_kl.push(kl_gaussian(
            p_mean,
            p_var.max(var_floor),
            q_mean,
            q_var.max(var_floor),
        )?);
    }
    let sum_kl: f64 = per_point_kl.iter().sum();
    Ok(EvalReport {
        mean_kl: sum_kl / per_point_kl.len() as f64,
        sum_kl,
        rmse: rmse(approx.mean(), targets)?,
        per_point_kl,
        config_echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::child_rng;
    use rand::Rng;

    #[test]
    fn kl_identical_is_zero() {
        assert_eq!(kl_gaussian(0.3, 1.7, 0.3, 1.7).unwrap(), 0.0);
    }

    #[test]
    fn kl_unit_mean_shift() {
        let kl = kl_gaussian(0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((kl - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kl_variance_ratio_e_matches_quadrature() {
        let kl = kl_gaussian(0.0, 1.0, 0.0, std::f64::consts::E).unwrap();
        assert!((kl - 0.18393972058572117).abs() < 1e-15);

        // Numerical integration of p ln(p/q) over a wide interval.
        let p = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let q = |x: f64| {
            (-x * x / (2.0 * std::f64::consts::E)).exp()
                / (2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt()
        };
        let steps = 400_000;
        let (lo, hi) = (-12.0, 12.0);
        let h = (hi - lo) / steps as f64;
        let mut integral = 0.0;
        for i in 0..steps {
            let x = lo + (i as f64 + 0.5) * h;
            integral += p(x) * (p(x) / q(x)).ln() * h;
        }
        assert!((kl - integral).abs() < 1e-8, "closed {kl} vs quadrature {integral}");
    }

    #[test]
    fn kl_rejects_nonpositive_variance() {
        assert!(kl_gaussian(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(kl_gaussian(0.0, 1.0, 0.0, -2.0).is_err());
    }

    #[test]
    fn kl_nonnegative_on_random_inputs() {
        let mut rng = child_rng(41, &[0]);
        for _ in 0..200 {
            let kl = kl_gaussian(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.01..4.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.01..4.0),
            )
            .unwrap();
            assert!(kl >= 0.0);
        }
    }

    #[test]
    fn rmse_cases() {
        let a = DVector::from_row_slice(&[1.0, 2.0]);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let b = DVector::from_row_slice(&[2.0, 3.0]);
        assert!((rmse(&b, &a).unwrap() - 1.0).abs() < 1e-15);
        let p = DVector::from_row_slice(&[0.0, 0.0]);
        let t = DVector::from_row_slice(&[3.0, 4.0]);
        assert!((rmse(&p, &t).unwrap() - 3.5355339059327378).abs() < 1e-15);
        assert!(rmse(&DVector::zeros(0), &DVector::zeros(0)).is_err());
    }

    #[test]
    fn evaluate_consistency() {
        let reference = PredictiveGaussian::new(
            DVector::from_row_slice(&[0.0, 1.0, -1.0]),
            DVector::from_row_slice(&[1.0, 0.5, 2.0]),
        )
        .unwrap();
        let approx = PredictiveGaussian::new(
            DVector::from_row_slice(&[0.1, 0.8, -1.2]),
            DVector::from_row_slice(&[0.9, 0.6, 1.5]),
        )
        .unwrap();
        let targets = DVector::from_row_slice(&[0.0, 1.0, -1.0]);
        let report = evaluate(
            &reference,
            &approx,
            &targets,
            KlDirection::RefToApprox,
            1e-12,
            serde_json::json!({"case": "test"}),
        )
        .unwrap();
        assert_eq!(report.per_point_kl.len(), 3);
        let mean: f64 = report.per_point_kl.iter().sum::<f64>() / 3.0;
        assert!((report.mean_kl - mean).abs() < 1e-15);
        assert!(report.per_point_kl.iter().all(|&k| k >= 0.0));
        let expected_rmse = rmse(approx.mean(), &targets).unwrap();
        assert_eq!(report.rmse, expected_rmse);
    }
}
