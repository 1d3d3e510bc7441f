//! Kinky inference (Lipschitz interpolation) regression with hyperparameters
//! chosen by certified global Lipschitz optimisation of a validation loss.
//!
//! * [`metrics`]: the parameterised pseudo-metric family and its parameter
//!   Lipschitz bounds.
//! * [`predictor`]: datasets and the ceiling/floor/midpoint prediction rule.
//! * [`loss`]: empirical errors, the validation loss and its Lipschitz bound.
//! * [`optimizer`]: certified box minimisation, Shubert's 1-D method and
//!   Hölder-constant arithmetic.
//! * [`poki`]: the split/optimise/refit training pipeline and slope estimators.
//! * [`baselines`]: least squares and LACKI.
//! * [`data`]: synthetic targets, noise, CSV I/O and seeded splits.
//! * [`experiment`]: experiment configs, runs and reports.

pub mod baselines;
pub mod data;
pub mod error;
pub mod experiment;
pub mod loss;
pub mod metrics;
pub mod optimizer;
pub mod poki;
pub mod predictor;

pub use baselines::{fit_linear, lacki, predict_linear, LinearModel};
pub use data::{Generator, NoiseModel};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, Method, MethodSpec, ResultRecord};
pub use loss::{empirical_error, sample_error, LossContext};
pub use metrics::{MetricKind, MetricSpec, ParamMetric};
pub use optimizer::{
    batch_bounds, minimize, minimize_traced, rect_diameter, shubert_minimize_1d, HolderSpec, HyperRect,
    MinimizeOptions, OptResult, Termination, TraceRecord,
};
pub use poki::{split, strongin_estimate, strongin_estimate_noise_robust, train, PokiConfig, PokiFit, ThetaBox};
pub use predictor::{Dataset, Predictor};
