//! Parameter-optimised kinky inference.
//!
//! Training splits the data into conditioning and evaluation halves, finds
//! the metric parameter minimising the evaluation loss with the certified
//! Lipschitz optimiser, and finally conditions a predictor on all the data
//! at that parameter.

use serde::{Deserialize, Serialize};

use crate::data::split_indices;
use crate::error::{Error, Result};
use crate::loss::LossContext;
use crate::metrics::{max_abs_diff, MetricKind, ParamMetric};
use crate::optimizer::{minimize_traced, HolderSpec, MinimizeOptions, OptResult, TraceRecord};
use crate::predictor::{Dataset, Predictor};

/// Random conditioning/evaluation split with `round(ratio·N)` conditioning
/// samples, clamped so neither part is empty.
pub fn split(data: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if data.len() < 2 {
        return Err(Error::invalid("splitting needs at least two samples"));
    }
    let (mut cond, mut eval) = split_indices(data.len(), ratio, seed)?;
    // Rounding can empty one side on tiny data; move one sample across.
    if cond.is_empty() {
        cond.push(eval.remove(0));
    } else if eval.is_empty() {
        eval.push(cond.pop().expect("nonempty"));
    }
    Ok((data.subset(&cond)?, data.subset(&eval)?))
}

fn pairs(data: &Dataset) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
    (0..data.len()).flat_map(move |i| {
        (i + 1..data.len()).map(move |j| {
            (
                i,
                j,
                (data.output(i) - data.output(j)).abs(),
                max_abs_diff(data.input(i), data.input(j)),
            )
        })
    })
}

/// Largest pairwise slope `|f̃_i − f̃_j| / ‖s_i − s_j‖_∞`.
///
/// Pairs with identical inputs and outputs are skipped; identical inputs
/// with different outputs make the estimate undefined.
pub fn strongin_estimate(data: &Dataset) -> Result<f64> {
    if data.len() < 2 {
        return Err(Error::invalid("slope estimate needs at least two samples"));
    }
    let mut best = 0.0f64;
    for (i, j, rise, run) in pairs(data) {
        if run == 0.0 {
            if rise != 0.0 {
                return Err(Error::EstimateUndefined { first: i, second: j });
            }
            continue;
        }
        best = best.max(rise / run);
    }
    Ok(best)
}

/// Slope estimate for outputs with noise bounded by `noise_bound`:
/// `max (|f̃_i − f̃_j| − 2ē) / ‖s_i − s_j‖_∞`, floored at zero.
pub fn strongin_estimate_noise_robust(data: &Dataset, noise_bound: f64) -> Result<f64> {
    if data.len() < 2 {
        return Err(Error::invalid("slope estimate needs at least two samples"));
    }
    if !(noise_bound.is_finite() && noise_bound >= 0.0) {
        return Err(Error::invalid(format!(
            "noise bound must be nonnegative, got {noise_bound}"
        )));
    }
    let mut best = 0.0f64;
    for (i, j, rise, run) in pairs(data) {
        let excess = rise - 2.0 * noise_bound;
        if run == 0.0 {
            if excess > 0.0 {
                return Err(Error::EstimateUndefined { first: i, second: j });
            }
            continue;
        }
        best = best.max(excess / run);
    }
    Ok(best)
}

/// Axis-aligned parameter box Θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ThetaBox {
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Self {
        ThetaBox {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn validate(&self, metric: &ParamMetric) -> Result<()> {
        if self.lo.len() != metric.theta_dim() || self.hi.len() != metric.theta_dim() {
            return Err(Error::invalid(format!(
                "parameter box has dimension {}/{}, metric needs {}",
                self.lo.len(),
                self.hi.len(),
                metric.theta_dim()
            )));
        }
        if self.lo.iter().chain(&self.hi).any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameter box must be finite"));
        }
        if self.lo.iter().any(|&v| v < 0.0) {
            return Err(Error::invalid("parameter box must be nonnegative"));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l >= h) {
            return Err(Error::invalid(
                "parameter box is degenerate: need lo < hi on every axis",
            ));
        }
        Ok(())
    }
}

/// Default Θ for the norm-based metrics: `[0, 2ℓ̂]` per axis with ℓ̂ the
/// slope estimate. When ℓ̂ is undefined the upper end becomes the output
/// range over the smallest positive input gap; when it is zero, `[0, 1]`.
pub fn default_theta_box(data: &Dataset, metric: &ParamMetric) -> Result<ThetaBox> {
    if metric.kind() == MetricKind::PeriodicSine {
        return Err(Error::invalid("the periodic metric needs an explicit frequency range"));
    }
    let hi = match strongin_estimate(data) {
        Ok(l) => 2.0 * l,
        Err(Error::EstimateUndefined { .. }) => {
            let (lo_y, hi_y) = data
                .outputs()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
            let gap = pairs(data)
                .map(|(_, _, _, run)| run)
                .filter(|&r| r > 0.0)
                .fold(f64::INFINITY, f64::min);
            if gap.is_finite() {
                (hi_y - lo_y) / gap
            } else {
                0.0
            }
        }
        Err(e) => return Err(e),
    };
    let hi = if hi > 0.0 && hi.is_finite() { hi } else { 1.0 };
    Ok(ThetaBox::uniform(metric.theta_dim(), 0.0, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PokiConfig {
    pub metric: ParamMetric,
    /// Θ; `None` selects [`default_theta_box`].
    pub theta_box: Option<ThetaBox>,
    /// Share of the data used for conditioning.
    pub split_ratio: f64,
    pub seed: u64,
    pub budget: usize,
    pub tol: f64,
}

impl PokiConfig {
    pub fn new(metric: ParamMetric) -> Self {
        let opts = MinimizeOptions::default();
        PokiConfig {
            metric,
            theta_box: None,
            split_ratio: 0.5,
            seed: 0,
            budget: opts.budget,
            tol: opts.tol,
        }
    }

    pub fn with_box(mut self, theta_box: ThetaBox) -> Self {
        self.theta_box = Some(theta_box);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: usize, tol: f64) -> Self {
        self.budget = budget;
        self.tol = tol;
        self
    }

    fn options(&self) -> MinimizeOptions {
        MinimizeOptions {
            budget: self.budget,
            tol: self.tol,
        }
    }
}

/// Outcome of [`train`].
#[derive(Debug, Clone)]
pub struct PokiFit {
    /// Predictor on the full data at the optimised parameter.
    pub predictor: Predictor,
    pub opt: OptResult,
    /// Lipschitz constant of the loss used by the optimiser.
    pub loss_lipschitz: f64,
    pub theta_box: ThetaBox,
    pub cond_size: usize,
    pub eval_size: usize,
}

pub fn train(data: &Dataset, cfg: &PokiConfig) -> Result<PokiFit> {
    train_traced(data, cfg, |_| {})
}

/// [`train`] forwarding every optimiser step to `trace`.
pub fn train_traced<T: FnMut(&TraceRecord)>(data: &Dataset, cfg: &PokiConfig, trace: T) -> Result<PokiFit> {
    cfg.metric.check_input_dim(data.dim())?;
    if data.len() < 2 {
        return Err(Error::invalid("training needs at least two samples"));
    }
    let theta_box = match &cfg.theta_box {
        Some(b) => b.clone(),
        None => default_theta_box(data, &cfg.metric)?,
    };
    theta_box.validate(&cfg.metric)?;

    let (cond, eval) = split(data, cfg.split_ratio, cfg.seed)?;
    let (cond_size, eval_size) = (cond.len(), eval.len());
    let ctx = LossContext::new(cond, eval, cfg.metric)?;
    let loss_lipschitz = ctx.loss_lipschitz_bound();
    let spec = HolderSpec::lipschitz(loss_lipschitz)?;
    let opt = minimize_traced(
        |theta| ctx.loss_unchecked(theta),
        &theta_box.lo,
        &theta_box.hi,
        spec,
        cfg.options(),
        trace,
    )?;
    let predictor = Predictor::new(data.clone(), cfg.metric, opt.argmin.clone())?;
    Ok(PokiFit {
        predictor,
        opt,
        loss_lipschitz,
        theta_box,
        cond_size,
        eval_size,
    })
}
