//! Parameterised pseudo-metrics on the input space.
//!
//! Every member of the family is nonnegative, symmetric and vanishes on the
//! diagonal for nonnegative parameters. Each also reports a bound on how fast
//! the distance between two fixed points can change as the parameter moves,
//! measured in the max-norm on the parameter vector. That bound is what makes
//! the validation loss Lipschitz in the parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `θ ‖x − y‖_∞`, a single Lipschitz-constant parameter.
    ScaledNorm,
    /// `max_i θ_i |x_i − y_i|`, one relevance weight per input dimension.
    ArdMax,
    /// `|sin(π θ |x − y|)|` on scalar inputs; θ is a frequency.
    PeriodicSine,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::ScaledNorm => "scaled_norm",
            MetricKind::ArdMax => "ard_max",
            MetricKind::PeriodicSine => "periodic_sine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamMetric {
    kind: MetricKind,
    theta_dim: usize,
}

impl ParamMetric {
    pub fn scaled_norm() -> Self {
        ParamMetric {
            kind: MetricKind::ScaledNorm,
            theta_dim: 1,
        }
    }

    /// ARD metric over `input_dim` coordinates.
    pub fn ard_max(input_dim: usize) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::invalid("ARD metric needs at least one input dimension"));
        }
        Ok(ParamMetric {
            kind: MetricKind::ArdMax,
            theta_dim: input_dim,
        })
    }

    pub fn periodic_sine() -> Self {
        ParamMetric {
            kind: MetricKind::PeriodicSine,
            theta_dim: 1,
        }
    }

    /// Builds the metric of the given kind for inputs of dimension `input_dim`.
    pub fn for_kind(kind: MetricKind, input_dim: usize) -> Result<Self> {
        match kind {
            MetricKind::ScaledNorm => Ok(Self::scaled_norm()),
            MetricKind::ArdMax => Self::ard_max(input_dim),
            MetricKind::PeriodicSine if input_dim == 1 => Ok(Self::periodic_sine()),
            MetricKind::PeriodicSine => Err(Error::invalid(format!(
                "periodic metric is defined on scalar inputs only, got dimension {input_dim}"
            ))),
        }
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn theta_dim(&self) -> usize {
        self.theta_dim
    }

    /// Checks that `theta` has the right length and only nonnegative, finite entries.
    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.theta_dim {
            return Err(Error::invalid(format!(
                "{} metric expects {} parameter(s), got {}",
                self.kind.name(),
                self.theta_dim,
                theta.len()
            )));
        }
        if let Some(t) = theta.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::invalid(format!(
                "metric parameters must be finite and nonnegative, got {t}"
            )));
        }
        Ok(())
    }

    /// Checks that `dim` is an admissible input dimension for this metric.
    pub fn check_input_dim(&self, dim: usize) -> Result<()> {
        match self.kind {
            MetricKind::ArdMax if dim != self.theta_dim => Err(Error::invalid(format!(
                "ARD metric built for dimension {}, inputs have dimension {dim}",
                self.theta_dim
            ))),
            MetricKind::PeriodicSine if dim != 1 => Err(Error::invalid(format!(
                "periodic metric needs scalar inputs, got dimension {dim}"
            ))),
            _ => Ok(()),
        }
    }

    fn check_pair(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::invalid(format!(
                "input dimension mismatch: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        self.check_input_dim(x.len())
    }

    /// Distance `𝔡(x, y; θ)`.
    pub fn eval(&self, theta: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        self.check_pair(x, y)?;
        Ok(self.eval_unchecked(theta, x, y))
    }

    /// Distance without argument validation. Callers guarantee the
    /// preconditions of [`ParamMetric::eval`].
    #[inline]
    pub(crate) fn eval_unchecked(&self, theta: &[f64], x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            MetricKind::ScaledNorm => theta[0] * max_abs_diff(x, y),
            MetricKind::ArdMax => x
                .iter()
                .zip(y)
                .zip(theta)
                .fold(0.0, |acc, ((a, b), t)| f64::max(acc, t * (a - b).abs())),
            MetricKind::PeriodicSine => (PI * theta[0] * (x[0] - y[0]).abs()).sin().abs(),
        }
    }

    /// A constant `B` with `|𝔡(x,y;θ) − 𝔡(x,y;θ′)| ≤ B ‖θ − θ′‖_∞` for all
    /// nonnegative θ, θ′.
    pub fn theta_lipschitz_bound(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_pair(x, y)?;
        Ok(self.theta_lipschitz_bound_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn theta_lipschitz_bound_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            MetricKind::ScaledNorm | MetricKind::ArdMax => max_abs_diff(x, y),
            MetricKind::PeriodicSine => PI * (x[0] - y[0]).abs(),
        }
    }

    /// Scale turning an input-space max-norm diameter into the parameter
    /// Lipschitz bound: 1 for the norm-based metrics, π for the periodic one.
    pub(crate) fn diameter_factor(&self) -> f64 {
        match self.kind {
            MetricKind::ScaledNorm | MetricKind::ArdMax => 1.0,
            MetricKind::PeriodicSine => PI,
        }
    }
}

#[inline]
pub(crate) fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |acc, (a, b)| f64::max(acc, (a - b).abs()))
}

/// Serialised form of a metric together with a parameter vector, as it
/// appears in experiment configs and model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub variant: MetricKind,
    pub theta: Vec<f64>,
}

impl MetricSpec {
    pub fn new(metric: &ParamMetric, theta: &[f64]) -> Self {
        MetricSpec {
            variant: metric.kind(),
            theta: theta.to_vec(),
        }
    }

    /// Resolves the spec into a metric whose parameter length matches `theta`.
    pub fn to_metric(&self) -> Result<ParamMetric> {
        let metric = ParamMetric::for_kind(self.variant, self.theta.len().max(1))?;
        metric.check_theta(&self.theta)?;
        Ok(metric)
    }
}
