//! Gaussian process regression with linearized Gaussian kernels.
//!
//! The Gaussian kernel admits an expansion into a weighted sum of polynomial
//! kernels. Truncating that expansion gives a finite feature map, and
//! replacing the exact polynomial feature maps with randomized sketches gives
//! a compact randomized one. This crate implements:
//!
//! * the exact Gaussian kernel, its truncated expansion and kernel matrices
//!   ([`kernel`]),
//! * randomized polynomial sketches (Gaussian, Rademacher, TensorSRHT) with
//!   closed-form estimator variances ([`sketch`]),
//! * assembled Gaussian-kernel feature maps, explicit or randomized, with a
//!   greedy per-degree feature allocation optimizer ([`features`]),
//! * a random Fourier feature baseline ([`rff`]),
//! * exact and feature-space GP regression with marginal-likelihood
//!   hyperparameter fitting ([`gpr`]),
//! * a localized predictor that recenters the feature map on cluster
//!   centroids obtained by farthest-point clustering ([`localized`]),
//! * evaluation metrics ([`metrics`]).
//!
//! Truncated expansions of the Gaussian kernel vanish for inputs far from the
//! expansion point, which collapses GP predictions on data with short length
//! scales. Recentering the feature map ([`localized`]) removes the collapse:
//! at the center the approximate kernel is exact and deterministic.

pub mod error;
pub mod features;
pub mod gpr;
pub mod kernel;
pub mod localized;
pub mod metrics;
pub mod rff;
pub mod rng;
pub mod sketch;

pub use error::{Error, Result};
pub use features::{AllocationResult, MaclaurinFeatureMap};
pub use gpr::{Dataset, FeatureGPModel, HyperFit, PredictiveGaussian};
pub use kernel::{KernelParams, PairwiseMedian, ScaledInput};
pub use localized::{CentroidSet, LocalizedConfig, LocalizedModel};
pub use metrics::{EvalReport, KlDirection};
pub use rff::FourierFeatureMap;
pub use sketch::{PolynomialSketch, SketchKind};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
