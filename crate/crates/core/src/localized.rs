//! Clustered localized predictor.
//!
//! Training data is covered with farthest-point centroids; every centroid
//! gets its own feature-space GP fitted on features of (X - c). A test point
//! is served by the model of its nearest centroid, so the feature map is
//! always evaluated close to its expansion point where it is accurate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::{
    build_explicit_map, build_random_map, optimize_allocation, sample_allocation_pairs,
    MaclaurinFeatureMap,
};
use crate::gpr::{feature_gpr_fit, Dataset, FeatureGPModel, PredictiveGaussian};
use crate::kernel::{check_dims, KernelParams};
use crate::rng::{child_rng, child_seed};
use crate::sketch::SketchKind;

const TAG_PAIRS: u64 = 0x30;
const TAG_MAP: u64 = 0x31;

/// Centroids produced by farthest-point clustering. The first centroid is the
/// training mean; all later ones are training points.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    centroids: Vec<DVector<f64>>,
    threshold: f64,
}

impl CentroidSet {
    pub fn centroids(&self) -> &[DVector<f64>] {
        &self.centroids
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    /// Index of the centroid closest to `x`; ties go to the lower index.
    pub fn nearest(&self, x: &DVector<f64>) -> usize {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, c) in self.centroids.iter().enumerate() {
            let d = (x - c).norm();
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        best
    }
}

/// Greedy farthest-point clustering: start from the training mean, repeatedly
/// add the training point farthest from the current centroids (ties to the
/// lowest row index) until every point lies within `threshold` of a centroid.
pub fn farthest_point_clustering(inputs: &DMatrix<f64>, threshold: f64) -> Result<CentroidSet> {
    if inputs.nrows() == 0 {
        return Err(Error::EmptyInput("clustering inputs"));
    }
    if !(threshold > 0.0) {
        return Err(Error::invalid("threshold", "must be positive"));
    }
    let n = inputs.nrows();
    let mean = inputs.row_mean().transpose();
    let mut centroids = vec![mean];
    let mut min_dist: Vec<f64> = (0..n)
        .map(|i| (inputs.row(i).transpose() - &centroids[0]).norm())
        .collect();
    loop {
        let (arg_max, max) = min_dist
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |(ai, am), (i, &d)| {
                if d > am {
                    (i, d)
                } else {
                    (ai, am)
                }
            });
        if max < threshold {
            break;
        }
        let new_centroid = inputs.row(arg_max).transpose();
        for i in 0..n {
            let d = (inputs.row(i).transpose() - &new_centroid).norm();
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
        centroids.push(new_centroid);
    }
    Ok(CentroidSet {
        centroids,
        threshold,
    })
}

/// Feature-map configuration shared by all per-centroid models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedConfig {
    /// Total feature-map width, including the constant coordinate.
    pub total_features: usize,
    /// Truncation degree for 1-D explicit maps is `total_features - 1`; for
    /// randomized maps this caps the degrees the allocation may use.
    pub degree_cap: usize,
    pub kind: SketchKind,
    /// Size of the pair subsample the allocation is optimized on.
    pub allocation_pairs: usize,
}

impl LocalizedConfig {
    pub fn new(total_features: usize, degree_cap: usize, kind: SketchKind) -> Self {
        Self {
            total_features,
            degree_cap,
            kind,
            allocation_pairs: 100,
        }
    }
}

/// Centroids plus one fitted feature-space GP per centroid, all sharing one
/// feature map.
#[derive(Debug, Clone)]
pub struct LocalizedModel {
    centroid_set: CentroidSet,
    local_models: Vec<FeatureGPModel>,
    feature_map: MaclaurinFeatureMap,
}

impl LocalizedModel {
    pub fn centroid_set(&self) -> &CentroidSet {
        &self.centroid_set
    }

    pub fn n_centroids(&self) -> usize {
        self.centroid_set.len()
    }

    pub fn feature_map(&self) -> &MaclaurinFeatureMap {
        &self.feature_map
    }

    pub fn local_models(&self) -> &[FeatureGPModel] {
        &self.local_models
    }
}

/// Builds the shared feature map for a training set: the explicit map for
/// one-dimensional inputs (degree `total_features - 1`), otherwise a
/// randomized map whose per-degree widths come from the greedy allocation on
/// mean-centered training pairs.
pub fn build_shared_map(
    train: &Dataset,
    config: &LocalizedConfig,
    params: &KernelParams,
    seed: u64,
) -> Result<MaclaurinFeatureMap> {
    if config.total_features < 2 {
        return Err(Error::invalid("total_features", "must be at least 2"));
    }
    if train.dim() == 1 {
        build_explicit_map(params, config.total_features - 1, 1)
    } else {
        if config.degree_cap == 0 {
            return Err(Error::invalid("degree_cap", "must be at least 1"));
        }
        let mean = train.input_mean();
        let mut rng = child_rng(seed, &[TAG_PAIRS]);
        let pairs =
            sample_allocation_pairs(train.inputs(), &mean, config.allocation_pairs, &mut rng);
        let allocation = optimize_allocation(
            &pairs,
            config.total_features - 1,
            config.degree_cap,
            config.kind,
            params,
        )?;
        build_random_map(
            params,
            &allocation.allocation,
            config.kind,
            train.dim(),
            child_seed(seed, &[TAG_MAP]),
        )
    }
}

/// Clusters the training data and fits one local model per centroid.
pub fn fit_localized(
    train: &Dataset,
    config: &LocalizedConfig,
    params: &KernelParams,
    threshold: f64,
    seed: u64,
) -> Result<LocalizedModel> {
    let feature_map = build_shared_map(train, config, params, seed)?;
    let centroid_set = farthest_point_clustering(train.inputs(), threshold)?;
    let mut local_models = Vec::with_capacity(centroid_set.len());
    for (index, centroid) in centroid_set.centroids().iter().enumerate() {
        let features = feature_map.featurize(train.inputs(), Some(centroid))?;
        let model = feature_gpr_fit(&features, train.targets(), params.noise_variance())
            .map_err(|e| Error::LocalFit {
                index,
                source: Box::new(e),
            })?;
        local_models.push(model);
    }
    Ok(LocalizedModel {
        centroid_set,
        local_models,
        feature_map,
    })
}

/// Predicts each test point with the model of its nearest centroid.
pub fn predict_localized(
    model: &LocalizedModel,
    test_inputs: &DMatrix<f64>,
) -> Result<PredictiveGaussian> {
    check_dims(model.feature_map.input_dim(), test_inputs.ncols())?;
    let m = test_inputs.nrows();
    let mut mean = DVector::zeros(m);
    let mut variance = DVector::zeros(m);
    for i in 0..m {
        let x = test_inputs.row(i).transpose();
        let c = model.centroid_set.nearest(&x);
        let phi = model
            .feature_map
            .feature_vector(&x, Some(&model.centroid_set.centroids()[c]))?;
        let (mu, var) = model.local_models[c].predict_one(&phi)?;
        mean[i] = mu;
        variance[i] = var;
    }
    PredictiveGaussian::new(mean, variance)
}

/// Slow reference mode: refits the feature-space GP with the map recentered
/// at every single test point. At the test point itself the recentered kernel
/// is exact and deterministic, so predictions at inputs far from the training
/// data fall back to the prior. Costs one fit per test point.
pub fn predict_recentered(
    train: &Dataset,
    map: &MaclaurinFeatureMap,
    test_inputs: &DMatrix<f64>,
) -> Result<PredictiveGaussian> {
    check_dims(map.input_dim(), test_inputs.ncols())?;
    let m = test_inputs.nrows();
    let mut mean = DVector::zeros(m);
    let mut variance = DVector::zeros(m);
    for i in 0..m {
        let x = test_inputs.row(i).transpose();
        let features = map.featurize(train.inputs(), Some(&x))?;
        let model = feature_gpr_fit(&features, train.targets(), map.params().noise_variance())?;
        let phi = map.feature_vector(&x, Some(&x))?;
        let (mu, var) = model.predict_one(&phi)?;
        mean[i] = mu;
        variance[i] = var;
    }
    PredictiveGaussian::new(mean, variance)
}
