//! Empirical prediction errors and the validation loss used to tune θ,
//! together with the Lipschitz bound of that loss in θ.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::ParamMetric;
use crate::predictor::{envelope, Dataset, Predictor};

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Mean absolute deviation between the predictor and a known target over
/// the rows of `xs` (row-major, `pred.data().dim()` columns).
pub fn empirical_error<F>(pred: &Predictor, truth: F, xs: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = pred.data().dim();
    if xs.is_empty() {
        return Err(Error::invalid("empirical error needs at least one query point"));
    }
    let predictions = pred.predict_batch(xs)?;
    Ok(mean(
        xs.chunks_exact(dim).zip(predictions).map(|(x, p)| (p - truth(x)).abs()),
    ))
}

/// Mean absolute deviation between the predictor and observed test outputs.
pub fn sample_error(pred: &Predictor, test: &Dataset) -> Result<f64> {
    if test.dim() != pred.data().dim() {
        return Err(Error::invalid(format!(
            "test data has dimension {}, predictor has {}",
            test.dim(),
            pred.data().dim()
        )));
    }
    let predictions = pred.predict_batch(test.inputs_flat())?;
    Ok(mean(predictions.iter().zip(test.outputs()).map(|(p, y)| (p - y).abs())))
}

/// Conditioning data, evaluation data and the metric whose parameter is tuned.
#[derive(Debug, Clone)]
pub struct LossContext {
    cond: Dataset,
    eval: Dataset,
    metric: ParamMetric,
}

impl LossContext {
    pub fn new(cond: Dataset, eval: Dataset, metric: ParamMetric) -> Result<Self> {
        if cond.dim() != eval.dim() {
            return Err(Error::invalid(format!(
                "conditioning data has dimension {}, evaluation data has {}",
                cond.dim(),
                eval.dim()
            )));
        }
        metric.check_input_dim(cond.dim())?;
        Ok(LossContext { cond, eval, metric })
    }

    pub fn cond(&self) -> &Dataset {
        &self.cond
    }

    pub fn eval(&self) -> &Dataset {
        &self.eval
    }

    pub fn metric(&self) -> &ParamMetric {
        &self.metric
    }

    /// Mean absolute error on the evaluation data of the predictor
    /// conditioned on the conditioning data at parameter `theta`.
    pub fn poki_loss(&self, theta: &[f64]) -> Result<f64> {
        self.metric.check_theta(theta)?;
        Ok(self.loss_unchecked(theta))
    }

    /// Per-point deviations are computed in parallel and summed in index
    /// order, so the value is bit-identical for any thread count.
    pub(crate) fn loss_unchecked(&self, theta: &[f64]) -> f64 {
        let deviations: Vec<f64> = if self.cond.len() * self.eval.len() < 4096 {
            self.eval.samples().map(|(x, y)| self.deviation(theta, x, y)).collect()
        } else {
            self.eval
                .inputs_flat()
                .par_chunks_exact(self.eval.dim())
                .zip(self.eval.outputs().par_iter())
                .map(|(x, &y)| self.deviation(theta, x, y))
                .collect()
        };
        mean(deviations.into_iter())
    }

    #[inline]
    fn deviation(&self, theta: &[f64], x: &[f64], y: f64) -> f64 {
        let (c, f) = envelope(&self.cond, &self.metric, theta, x);
        (y - (0.5 * c + 0.5 * f)).abs()
    }

    /// Lipschitz constant of θ ↦ loss in the max-norm: the largest parameter
    /// bound over all pairs of inputs drawn from conditioning ∪ evaluation data.
    ///
    /// For every metric in the family the pairwise bound is a fixed multiple of
    /// the pair's max-norm distance, so the maximum is that multiple of the
    /// max-norm diameter, i.e. of the widest per-coordinate range.
    pub fn loss_lipschitz_bound(&self) -> f64 {
        let dim = self.cond.dim();
        let diameter = (0..dim)
            .map(|k| {
                let (lo, hi) = self
                    .cond
                    .rows()
                    .chain(self.eval.rows())
                    .map(|row| row[k])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                hi - lo
            })
            .fold(0.0, f64::max);
        self.metric.diameter_factor() * diameter
    }

    /// The tighter bound that only pairs each evaluation input with the
    /// conditioning inputs (max over evaluation points of the per-query
    /// sensitivity). Diagnostic; the optimiser uses
    /// [`LossContext::loss_lipschitz_bound`].
    pub fn per_query_lipschitz_bound(&self) -> f64 {
        self.eval
            .rows()
            .map(|x| {
                self.cond
                    .rows()
                    .map(|s| self.metric.theta_lipschitz_bound_unchecked(x, s))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Dataset {
        Dataset::from_scalars(&[0.0, 1.0], &[0.0, 1.0]).unwrap()
    }

    fn pairwise_bound(ctx: &LossContext) -> f64 {
        let rows: Vec<&[f64]> = ctx.cond().rows().chain(ctx.eval().rows()).collect();
        let mut best = 0.0f64;
        for a in &rows {
            for b in &rows {
                best = best.max(ctx.metric().theta_lipschitz_bound(a, b).unwrap());
            }
        }
        best
    }

    #[test]
    fn empirical_error_cases() {
        let p = Predictor::new(line(), ParamMetric::scaled_norm(), vec![1.0]).unwrap();
        let e = empirical_error(&p, |x| x[0], &[0.25, 0.5, 0.75]).unwrap();
        assert_eq!(e, 0.0);

        let constant = Predictor::new(
            Dataset::from_scalars(&[0.0], &[3.0]).unwrap(),
            ParamMetric::scaled_norm(),
            vec![1.0],
        )
        .unwrap();
        let e = empirical_error(&constant, |_| 4.0, &[0.1, 5.0, -2.0]).unwrap();
        assert_eq!(e, 1.0);
        assert!(empirical_error(&constant, |_| 4.0, &[]).is_err());
    }

    #[test]
    fn sample_error_cases() {
        let p = Predictor::new(line(), ParamMetric::scaled_norm(), vec![1.0]).unwrap();
        assert_eq!(sample_error(&p, &line()).unwrap(), 0.0);
        let one = Dataset::from_scalars(&[0.5], &[0.8]).unwrap();
        assert!((sample_error(&p, &one).unwrap() - 0.3).abs() < 1e-15);
        let two = Dataset::from_scalars(&[0.5, 0.25], &[0.5, 1.25]).unwrap();
        assert_eq!(sample_error(&p, &two).unwrap(), 0.5);
        let wrong_dim = Dataset::from_rows(vec![vec![0.0, 0.0]], vec![0.0]).unwrap();
        assert!(sample_error(&p, &wrong_dim).is_err());
    }

    #[test]
    fn poki_loss_cases() {
        let eval = Dataset::from_scalars(&[0.5], &[0.5]).unwrap();
        let ctx = LossContext::new(line(), eval, ParamMetric::scaled_norm()).unwrap();
        assert_eq!(ctx.poki_loss(&[1.0]).unwrap(), 0.0);
        assert_eq!(ctx.poki_loss(&[0.0]).unwrap(), 0.0);
        assert!(ctx.poki_loss(&[-1.0]).is_err());
        assert!(ctx.poki_loss(&[1.0, 1.0]).is_err());

        let eval = Dataset::from_scalars(&[0.5], &[0.9]).unwrap();
        let ctx = LossContext::new(line(), eval, ParamMetric::scaled_norm()).unwrap();
        assert!((ctx.poki_loss(&[0.0]).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn bound_is_scaled_diameter() {
        let cond = Dataset::from_scalars(&[0.0, 3.0], &[0.0, 0.0]).unwrap();
        let eval = Dataset::from_scalars(&[1.0], &[0.0]).unwrap();
        let ctx = LossContext::new(cond, eval, ParamMetric::scaled_norm()).unwrap();
        assert_eq!(ctx.loss_lipschitz_bound(), 3.0);
        assert_eq!(ctx.loss_lipschitz_bound(), pairwise_bound(&ctx));
        assert_eq!(ctx.per_query_lipschitz_bound(), 2.0);

        let cond = Dataset::from_scalars(&[0.0], &[0.0]).unwrap();
        let eval = Dataset::from_scalars(&[0.25], &[1.0]).unwrap();
        let ctx = LossContext::new(cond, eval, ParamMetric::periodic_sine()).unwrap();
        assert!((ctx.loss_lipschitz_bound() - std::f64::consts::PI * 0.25).abs() < 1e-15);
        assert_eq!(ctx.loss_lipschitz_bound(), pairwise_bound(&ctx));

        let same = Dataset::from_rows(vec![vec![1.0, 2.0]; 3], vec![0.0, 1.0, 2.0]).unwrap();
        let ctx = LossContext::new(same.clone(), same, ParamMetric::ard_max(2).unwrap()).unwrap();
        assert_eq!(ctx.loss_lipschitz_bound(), 0.0);
    }

    #[test]
    fn bound_matches_pairwise_oracle_on_mixed_data() {
        let cond = Dataset::from_rows(
            vec![vec![0.0, 5.0], vec![2.0, -1.0], vec![-0.5, 0.0]],
            vec![0.0, 1.0, 2.0],
        )
        .unwrap();
        let eval = Dataset::from_rows(vec![vec![1.0, 7.5], vec![3.0, 0.0]], vec![1.0, 0.0]).unwrap();
        let ctx = LossContext::new(cond, eval, ParamMetric::ard_max(2).unwrap()).unwrap();
        assert_eq!(ctx.loss_lipschitz_bound(), pairwise_bound(&ctx));
        assert_eq!(ctx.loss_lipschitz_bound(), 8.5);
    }

    #[test]
    fn context_validation() {
        let two_d = Dataset::from_rows(vec![vec![0.0, 0.0]], vec![0.0]).unwrap();
        assert!(LossContext::new(line(), two_d.clone(), ParamMetric::scaled_norm()).is_err());
        assert!(LossContext::new(two_d.clone(), two_d, ParamMetric::periodic_sine()).is_err());
    }
}
