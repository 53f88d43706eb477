//! Assembled feature maps for the truncated Gaussian kernel.
//!
//! A map sends x to sigma * exp(-||x~||^2 / 2) * (1, f_1(x~)/sqrt(1!), ...,
//! f_p(x~)/sqrt(p!)) where x~ is the (optionally recentered) input divided by
//! the length scale and f_n is either the exact degree-n tensor power or a
//! randomized polynomial sketch. Inner products of mapped vectors then
//! approximate the Gaussian kernel truncated at degree p.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::{check_dims, KernelParams, ScaledInput};
use crate::rng::child_seed;
use crate::sketch::{
    sample_sketch, variance_from_moments, PairMoments, PolynomialSketch, SketchKind,
};

const TAG_DEGREE: u64 = 0x10;

/// Hard cap on the coordinate count of an explicit map.
pub const EXPLICIT_DIM_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct MaclaurinFeatureMap {
    params: KernelParams,
    input_dim: usize,
    total_dim: usize,
    variant: MapVariant,
}

#[derive(Debug, Clone)]
enum MapVariant {
    Explicit {
        degree_cap: usize,
    },
    Randomized {
        /// Feature counts per degree 1..=p; zero drops the degree.
        allocation: Vec<usize>,
        /// Sketches for the degrees with a nonzero allocation.
        sketches: Vec<PolynomialSketch>,
    },
}

/// Builds the exact map whose features are the scaled tensor powers of the
/// input up to `degree_cap`. The coordinate count is 1 + d + d^2 + ... + d^p
/// and must stay within [`EXPLICIT_DIM_LIMIT`].
pub fn build_explicit_map(
    params: &KernelParams,
    degree_cap: usize,
    input_dim: usize,
) -> Result<MaclaurinFeatureMap> {
    if input_dim == 0 {
        return Err(Error::invalid("input_dim", "must be at least 1"));
    }
    let mut total: u128 = 1;
    let mut power: u128 = 1;
    for _ in 1..=degree_cap {
        power = power.saturating_mul(input_dim as u128);
        total = total.saturating_add(power);
        if total > EXPLICIT_DIM_LIMIT as u128 {
            return Err(Error::CapacityExceeded {
                requested: total,
                limit: EXPLICIT_DIM_LIMIT,
            });
        }
    }
    Ok(MaclaurinFeatureMap {
        params: *params,
        input_dim,
        total_dim: total as usize,
        variant: MapVariant::Explicit { degree_cap },
    })
}

/// Builds a randomized map from a per-degree feature allocation
/// (`allocation[n-1]` features for degree n; zero drops the degree). An
/// all-zero allocation is legal and leaves only the constant coordinate.
pub fn build_random_map(
    params: &KernelParams,
    allocation: &[usize],
    kind: SketchKind,
    input_dim: usize,
    seed: u64,
) -> Result<MaclaurinFeatureMap> {
    if input_dim == 0 {
        return Err(Error::invalid("input_dim", "must be at least 1"));
    }
    let mut sketches = Vec::new();
    for (idx, &count) in allocation.iter().enumerate() {
        let degree = idx + 1;
        if count > 0 {
            sketches.push(sample_sketch(
                kind,
                degree,
                input_dim,
                count,
                child_seed(seed, &[TAG_DEGREE, degree as u64]),
            )?);
        }
    }
    Ok(MaclaurinFeatureMap {
        params: *params,
        input_dim,
        total_dim: 1 + allocation.iter().sum::<usize>(),
        variant: MapVariant::Randomized {
            allocation: allocation.to_vec(),
            sketches,
        },
    })
}

impl MaclaurinFeatureMap {
    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.variant, MapVariant::Explicit { .. })
    }

    /// Largest degree the map represents.
    pub fn degree_cap(&self) -> usize {
        match &self.variant {
            MapVariant::Explicit { degree_cap } => *degree_cap,
            MapVariant::Randomized { allocation, .. } => allocation.len(),
        }
    }

    /// Per-degree feature counts of a randomized map.
    pub fn allocation(&self) -> Option<&[usize]> {
        match &self.variant {
            MapVariant::Explicit { .. } => None,
            MapVariant::Randomized { allocation, .. } => Some(allocation),
        }
    }

    /// Features of `x - center` (center defaults to the origin).
    pub fn feature_vector(
        &self,
        x: &DVector<f64>,
        center: Option<&DVector<f64>>,
    ) -> Result<DVector<f64>> {
        check_dims(self.input_dim, x.len())?;
        let scaled = match center {
            Some(c) => ScaledInput::shifted(x, c, &self.params)?,
            None => ScaledInput::new(x, &self.params)?,
        };
        let xt = scaled.values();
        let prefactor =
            self.params.kernel_variance().sqrt() * (-xt.norm_squared() / 2.0).exp();
        let mut out = DVector::zeros(self.total_dim);
        out[0] = 1.0;
        match &self.variant {
            MapVariant::Explicit { degree_cap } => {
                let base: Vec<f64> = xt.iter().cloned().collect();
                let mut tensor = vec![1.0];
                let mut offset = 1;
                let mut factorial = 1.0;
                for n in 1..=*degree_cap {
                    let mut next = Vec::with_capacity(tensor.len() * base.len());
                    for &a in &tensor {
                        for &b in &base {
                            next.push(a * b);
                        }
                    }
                    tensor = next;
                    factorial *= n as f64;
                    let coeff = 1.0 / factorial.sqrt();
                    for (k, &v) in tensor.iter().enumerate() {
                        out[offset + k] = coeff * v;
                    }
                    offset += tensor.len();
                }
            }
            MapVariant::Randomized { sketches, .. } => {
                let mut offset = 1;
                for sketch in sketches {
                    let phi = sketch.apply(xt)?;
                    let mut factorial = 1.0;
                    for n in 1..=sketch.degree() {
                        factorial *= n as f64;
                    }
                    let coeff = 1.0 / factorial.sqrt();
                    for (k, v) in phi.iter().enumerate() {
                        out[offset + k] = coeff * v;
                    }
                    offset += sketch.feature_dim();
                }
            }
        }
        Ok(out * prefactor)
    }

    /// Feature matrix with one row per row of `x`.
    pub fn featurize(
        &self,
        x: &DMatrix<f64>,
        center: Option<&DVector<f64>>,
    ) -> Result<DMatrix<f64>> {
        check_dims(self.input_dim, x.ncols())?;
        let mut out = DMatrix::zeros(x.nrows(), self.total_dim);
        for i in 0..x.nrows() {
            let row = self.feature_vector(&x.row(i).transpose(), center)?;
            out.row_mut(i).copy_from(&row.transpose());
        }
        Ok(out)
    }

    /// Exact variance (over the sketch distribution) of the kernel estimate
    /// produced by this map for the pair (x, y) recentered at `center`.
    /// Degrees are sampled independently, so the variance is the prefactored
    /// sum of the per-degree sketch variances. Explicit maps return zero.
    pub fn kernel_estimate_variance(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        center: Option<&DVector<f64>>,
    ) -> Result<f64> {
        check_dims(self.input_dim, x.len())?;
        check_dims(self.input_dim, y.len())?;
        let (xt, yt) = match center {
            Some(c) => (
                ScaledInput::shifted(x, c, &self.params)?,
                ScaledInput::shifted(y, c, &self.params)?,
            ),
            None => (
                ScaledInput::new(x, &self.params)?,
                ScaledInput::new(y, &self.params)?,
            ),
        };
        match &self.variant {
            MapVariant::Explicit { .. } => Ok(0.0),
            MapVariant::Randomized { sketches, .. } => {
                let moments = PairMoments::new(xt.values(), yt.values());
                let sigma2 = self.params.kernel_variance();
                let prefactor = sigma2
                    * sigma2
                    * (-xt.values().norm_squared()).exp()
                    * (-yt.values().norm_squared()).exp();
                let mut sum = 0.0;
                for sketch in sketches {
                    let mut factorial = 1.0;
                    for n in 1..=sketch.degree() {
                        factorial *= n as f64;
                    }
                    let coeff = 1.0 / (factorial * factorial);
                    sum += coeff
                        * variance_from_moments(
                            sketch.kind(),
                            &moments,
                            sketch.degree(),
                            sketch.feature_dim(),
                        );
                }
                Ok(prefactor * sum)
            }
        }
    }
}

/// Outcome of the greedy per-degree feature allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Largest degree with a nonzero allocation.
    pub optimal_degree: usize,
    /// Feature counts for degrees 1..=optimal_degree.
    pub allocation: Vec<usize>,
    /// Objective value after each assigned feature.
    pub objective_trace: Vec<f64>,
}

/// Mean-squared-error objective of an allocation over the sample pairs:
/// squared bias of the expected estimate (missing degrees count as bias)
/// plus the summed per-degree estimator variances.
struct AllocationObjective {
    pairs: Vec<PairTerms>,
    kind: SketchKind,
}

struct PairTerms {
    moments: PairMoments,
    /// sigma^2 exp(-(||x~||^2 + ||y~||^2)/2)
    half_prefactor: f64,
    /// Exact Gaussian kernel value for the pair.
    exact: f64,
    /// t^n / n! for n = 1..=p_max.
    coeffs: Vec<f64>,
    /// sigma^4 exp(-||x~||^2) exp(-||y~||^2)
    var_prefactor: f64,
}

impl AllocationObjective {
    fn new(
        pairs: &[(DVector<f64>, DVector<f64>)],
        p_max: usize,
        kind: SketchKind,
        params: &KernelParams,
    ) -> Result<Self> {
        let sigma2 = params.kernel_variance();
        let mut terms = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            let xt = ScaledInput::new(x, params)?;
            let yt = ScaledInput::new(y, params)?;
            let moments = PairMoments::new(xt.values(), yt.values());
            let half_prefactor = sigma2 * (-(moments.nx2 + moments.ny2) / 2.0).exp();
            let exact = half_prefactor * moments.dot.exp();
            let mut coeffs = Vec::with_capacity(p_max);
            let mut term = 1.0;
            for n in 1..=p_max {
                term *= moments.dot / n as f64;
                coeffs.push(term);
            }
            terms.push(PairTerms {
                moments,
                half_prefactor,
                exact,
                coeffs,
                var_prefactor: sigma2 * sigma2 * (-moments.nx2 - moments.ny2).exp(),
            });
        }
        Ok(Self { pairs: terms, kind })
    }

    fn objective(&self, allocation: &[usize]) -> f64 {
        let mut total = 0.0;
        for pair in &self.pairs {
            let mut series = 1.0;
            let mut variance = 0.0;
            let mut factorial = 1.0;
            for (idx, &count) in allocation.iter().enumerate() {
                let degree = idx + 1;
                factorial *= degree as f64;
                if count > 0 {
                    series += pair.coeffs[idx];
                    variance += variance_from_moments(self.kind, &pair.moments, degree, count)
                        / (factorial * factorial);
                }
            }
            let bias = pair.exact - pair.half_prefactor * series;
            total += bias * bias + pair.var_prefactor * variance;
        }
        total / self.pairs.len() as f64
    }
}

/// Greedy incremental allocation of `budget` random features across degrees
/// 1..=p_max, minimizing squared truncation bias plus estimator variance over
/// the sample pairs. Each step assigns one feature to the degree with the
/// largest objective decrease; ties go to the lower degree.
pub fn optimize_allocation(
    pairs: &[(DVector<f64>, DVector<f64>)],
    budget: usize,
    p_max: usize,
    kind: SketchKind,
    params: &KernelParams,
) -> Result<AllocationResult> {
    if budget == 0 {
        return Err(Error::invalid("budget", "must be at least 1"));
    }
    if p_max == 0 {
        return Err(Error::invalid("p_max", "must be at least 1"));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput("allocation pairs"));
    }
    let dim = pairs[0].0.len();
    for (x, y) in pairs {
        check_dims(dim, x.len())?;
        check_dims(dim, y.len())?;
    }
    let objective = AllocationObjective::new(pairs, p_max, kind, params)?;
    let mut allocation = vec![0usize; p_max];
    let mut trace = Vec::with_capacity(budget);
    for _ in 0..budget {
        let mut best: Option<(usize, f64)> = None;
        for deg in 0..p_max {
            allocation[deg] += 1;
            let value = objective.objective(&allocation);
            allocation[deg] -= 1;
            if best.map_or(true, |(_, b)| value < b) {
                best = Some((deg, value));
            }
        }
        let (deg, value) = best.expect("p_max >= 1");
        allocation[deg] += 1;
        trace.push(value);
    }
    let optimal_degree = allocation
        .iter()
        .rposition(|&c| c > 0)
        .map(|i| i + 1)
        .expect("budget >= 1 assigns at least one feature");
    allocation.truncate(optimal_degree);
    Ok(AllocationResult {
        optimal_degree,
        allocation,
        objective_trace: trace,
    })
}

/// Draws `count` index pairs (i != j) for the allocation subsample.
pub fn sample_allocation_pairs(
    inputs: &DMatrix<f64>,
    center: &DVector<f64>,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<(DVector<f64>, DVector<f64>)> {
    let n = inputs.nrows();
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        if n > 1 {
            while j == i {
                j = rng.gen_range(0..n);
            }
        }
        pairs.push((
            inputs.row(i).transpose() - center,
            inputs.row(j).transpose() - center,
        ));
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{gaussian_kernel, truncated_maclaurin_kernel};
    use crate::rng::child_rng;
    use rand::Rng;

    fn params(l: f64, s2: f64) -> KernelParams {
        KernelParams::new(l, s2, 0.5).unwrap()
    }

    fn dvec(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn explicit_dims() {
        let p = params(1.0, 1.0);
        assert_eq!(build_explicit_map(&p, 9, 1).unwrap().total_dim(), 10);
        assert_eq!(build_explicit_map(&p, 2, 2).unwrap().total_dim(), 7);
        assert!(matches!(
            build_explicit_map(&p, 10, 10),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn explicit_inner_product_approximates_kernel() {
        let p = params(1.0, 1.7);
        let map = build_explicit_map(&p, 8, 2).unwrap();
        let mut rng = child_rng(3, &[0]);
        for _ in 0..20 {
            let x = DVector::from_fn(2, |_, _| rng.gen_range(-0.7..0.7));
            let y = DVector::from_fn(2, |_, _| rng.gen_range(-0.7..0.7));
            let fx = map.feature_vector(&x, None).unwrap();
            let fy = map.feature_vector(&y, None).unwrap();
            let k = gaussian_kernel(&x, &y, &p).unwrap();
            assert!((fx.dot(&fy) - k).abs() < 1e-6, "err {}", (fx.dot(&fy) - k).abs());
        }
    }

    #[test]
    fn explicit_inner_product_matches_truncated_kernel_exactly() {
        let p = params(0.6, 2.0);
        let map = build_explicit_map(&p, 4, 2).unwrap();
        let x = dvec(&[0.3, -0.2]);
        let y = dvec(&[-0.1, 0.4]);
        let fx = map.feature_vector(&x, None).unwrap();
        let fy = map.feature_vector(&y, None).unwrap();
        let kp = truncated_maclaurin_kernel(&x, &y, &p, 4).unwrap();
        assert!((fx.dot(&fy) - kp).abs() < 1e-14);
    }

    #[test]
    fn random_map_zero_input() {
        let p = params(1.0, 4.0);
        let map = build_random_map(&p, &[3, 2], SketchKind::Rademacher, 2, 9).unwrap();
        let f = map.feature_vector(&DVector::zeros(2), None).unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(f[0], 2.0); // sigma
        assert!(f.iter().skip(1).all(|&v| v == 0.0));
    }

    #[test]
    fn random_map_unbiased_for_truncated_kernel() {
        let p = params(1.0, 1.0);
        let x = dvec(&[0.5, -0.3]);
        let y = dvec(&[0.4, 0.6]);
        let target = truncated_maclaurin_kernel(&x, &y, &p, 2).unwrap();
        let draws = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for seed in 0..draws {
            let map = build_random_map(&p, &[3, 3], SketchKind::Gaussian, 2, seed).unwrap();
            let est = map
                .feature_vector(&x, None)
                .unwrap()
                .dot(&map.feature_vector(&y, None).unwrap());
            sum += est;
            sum_sq += est * est;
        }
        let mean = sum / draws as f64;
        let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - target).abs() <= 3.0 * se,
            "mean {mean}, target {target}, se {se}"
        );
    }

    #[test]
    fn feature_norm_lower_bound() {
        // The constant coordinate alone contributes sigma^2 exp(-||x~||^2).
        let p = params(0.9, 1.4);
        let map = build_random_map(&p, &[4, 2], SketchKind::Rademacher, 3, 17).unwrap();
        let mut rng = child_rng(18, &[0]);
        for _ in 0..20 {
            let x = DVector::from_fn(3, |_, _| rng.gen_range(-1.5..1.5));
            let f = map.feature_vector(&x, None).unwrap();
            let bound = p.kernel_variance() * (-(x.norm_squared()) / (0.9f64 * 0.9)).exp();
            assert!(f.norm_squared() >= bound - 1e-12);
        }
    }

    #[test]
    fn localization_is_exact_and_deterministic_at_center() {
        let p = params(0.4, 2.3);
        let c = dvec(&[0.7, -0.4]);
        let y = dvec(&[0.2, 0.5]);
        let exact = gaussian_kernel(&c, &y, &p).unwrap();
        for seed in 0..20 {
            for kind in [SketchKind::Gaussian, SketchKind::Rademacher, SketchKind::TensorSrht] {
                let map = build_random_map(&p, &[3, 2, 1], kind, 2, seed).unwrap();
                let fc = map.feature_vector(&c, Some(&c)).unwrap();
                let fy = map.feature_vector(&y, Some(&c)).unwrap();
                assert!((fc.dot(&fy) - exact).abs() <= 1e-12);
                let fcc = map.feature_vector(&c, Some(&c)).unwrap();
                assert!((fc.dot(&fcc) - p.kernel_variance()).abs() <= 1e-12);
                assert_eq!(
                    map.kernel_estimate_variance(&c, &y, Some(&c)).unwrap(),
                    0.0
                );
            }
        }
    }

    #[test]
    fn featurize_center_zero_matches_uncentered() {
        let p = params(1.1, 1.0);
        let map = build_random_map(&p, &[2, 2], SketchKind::Gaussian, 2, 4).unwrap();
        let mut rng = child_rng(20, &[0]);
        let x = DMatrix::from_fn(5, 2, |_, _| rng.gen_range(-1.0..1.0));
        let zero = DVector::zeros(2);
        let a = map.featurize(&x, None).unwrap();
        let b = map.featurize(&x, Some(&zero)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimate_variance_matches_seed_spread() {
        // Sample spread of the kernel estimate across seeds should match the
        // closed-form variance of the map.
        let p = params(1.0, 1.0);
        let x = dvec(&[0.8, -0.2]);
        let y = dvec(&[-0.5, 0.6]);
        let draws = 40_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for seed in 0..draws {
            let map = build_random_map(&p, &[4], SketchKind::Rademacher, 2, seed).unwrap();
            let est = map
                .feature_vector(&x, None)
                .unwrap()
                .dot(&map.feature_vector(&y, None).unwrap());
            sum += est;
            sum_sq += est * est;
        }
        let mean = sum / draws as f64;
        let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
        let map = build_random_map(&p, &[4], SketchKind::Rademacher, 2, 0).unwrap();
        let formula = map.kernel_estimate_variance(&x, &y, None).unwrap();
        assert!(
            (var - formula).abs() <= 0.08 * formula,
            "mc {var} vs formula {formula}"
        );
    }

    fn brute_force_best(
        objective: &AllocationObjective,
        budget: usize,
        p_max: usize,
    ) -> (Vec<usize>, f64) {
        fn recurse(
            objective: &AllocationObjective,
            alloc: &mut Vec<usize>,
            remaining: usize,
            deg: usize,
            best: &mut (Vec<usize>, f64),
        ) {
            if deg == alloc.len() - 1 {
                alloc[deg] = remaining;
                let v = objective.objective(alloc);
                if v < best.1 {
                    *best = (alloc.clone(), v);
                }
                alloc[deg] = 0;
                return;
            }
            for take in 0..=remaining {
                alloc[deg] = take;
                recurse(objective, alloc, remaining - take, deg + 1, best);
            }
            alloc[deg] = 0;
        }
        let mut alloc = vec![0usize; p_max];
        let mut best = (vec![], f64::INFINITY);
        recurse(objective, &mut alloc, budget, 0, &mut best);
        best
    }

    #[test]
    fn allocation_prefers_degree_one_for_tiny_norms() {
        let p = params(1.0, 1.0);
        let mut rng = child_rng(30, &[0]);
        let pairs: Vec<_> = (0..20)
            .map(|_| {
                (
                    DVector::from_fn(2, |_, _| rng.gen_range(-0.07..0.07)),
                    DVector::from_fn(2, |_, _| rng.gen_range(-0.07..0.07)),
                )
            })
            .collect();
        let res = optimize_allocation(&pairs, 3, 4, SketchKind::Gaussian, &p).unwrap();
        assert_eq!(res.allocation, vec![3]);
        assert_eq!(res.optimal_degree, 1);
        // Exhaustive search agrees.
        let objective = AllocationObjective::new(&pairs, 4, SketchKind::Gaussian, &p).unwrap();
        let (best_alloc, _) = brute_force_best(&objective, 3, 4);
        assert_eq!(&best_alloc[..1], &[3]);
        assert!(best_alloc[1..].iter().all(|&c| c == 0));
    }

    #[test]
    fn allocation_is_deterministic() {
        let p = params(0.8, 1.0);
        let mut rng = child_rng(31, &[0]);
        let pairs: Vec<_> = (0..10)
            .map(|_| {
                (
                    DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0)),
                    DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        let a = optimize_allocation(&pairs, 8, 3, SketchKind::Rademacher, &p).unwrap();
        let b = optimize_allocation(&pairs, 8, 3, SketchKind::Rademacher, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn allocation_trace_non_increasing_and_near_optimal() {
        let p = params(1.0, 1.0);
        let mut rng = child_rng(32, &[0]);
        let pairs: Vec<_> = (0..20)
            .map(|_| {
                (
                    DVector::from_fn(2, |_, _| rng.gen_range(-1.2..1.2)),
                    DVector::from_fn(2, |_, _| rng.gen_range(-1.2..1.2)),
                )
            })
            .collect();
        let res = optimize_allocation(&pairs, 10, 4, SketchKind::Rademacher, &p).unwrap();
        assert_eq!(res.allocation.iter().sum::<usize>(), 10);
        for w in res.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        let objective = AllocationObjective::new(&pairs, 4, SketchKind::Rademacher, &p).unwrap();
        let mut padded = res.allocation.clone();
        padded.resize(4, 0);
        let greedy_value = objective.objective(&padded);
        assert!((greedy_value - res.objective_trace.last().unwrap()).abs() <= 1e-12);
        let (_, best_value) = brute_force_best(&objective, 10, 4);
        assert!(
            greedy_value <= best_value * 1.05,
            "greedy {greedy_value} vs brute force {best_value}"
        );
    }

    #[test]
    fn allocation_input_validation() {
        let p = params(1.0, 1.0);
        let pairs = vec![(dvec(&[0.1, 0.2]), dvec(&[0.3, 0.1]))];
        assert!(optimize_allocation(&pairs, 0, 3, SketchKind::Gaussian, &p).is_err());
        assert!(optimize_allocation(&[], 3, 3, SketchKind::Gaussian, &p).is_err());
    }
}
