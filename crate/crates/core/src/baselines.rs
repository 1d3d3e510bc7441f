//! Comparison methods: ordinary least squares and kinky inference with the
//! lazily estimated Lipschitz constant (LACKI).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ParamMetric;
use crate::poki::strongin_estimate;
use crate::predictor::{Dataset, Predictor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::invalid(format!(
                "query has dimension {}, model has {}",
                x.len(),
                self.weights.len()
            )));
        }
        Ok(self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
    }
}

/// Least-squares fit of `y ≈ w·x + b`, via SVD so rank-deficient designs get
/// the minimum-norm solution.
pub fn fit_linear(data: &Dataset) -> Result<LinearModel> {
    let (n, d) = (data.len(), data.dim());
    // Centring decouples the intercept and keeps the design well scaled.
    let mean_x: Vec<f64> = (0..d)
        .map(|k| data.rows().map(|r| r[k]).sum::<f64>() / n as f64)
        .collect();
    let mean_y = data.outputs().iter().sum::<f64>() / n as f64;
    let design = DMatrix::from_fn(n, d, |i, k| data.input(i)[k] - mean_x[k]);
    let target = DVector::from_iterator(n, data.outputs().iter().map(|y| y - mean_y));

    let svd = design.svd(true, true);
    let eps = (svd.singular_values.max() * (n.max(d) as f64) * f64::EPSILON).max(f64::MIN_POSITIVE);
    let w = svd
        .solve(&target, eps)
        .map_err(|e| Error::invalid(format!("least squares failed: {e}")))?;
    let weights: Vec<f64> = w.iter().copied().collect();
    let intercept = mean_y - weights.iter().zip(&mean_x).map(|(w, m)| w * m).sum::<f64>();
    Ok(LinearModel { weights, intercept })
}

pub fn predict_linear(model: &LinearModel, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

/// Kinky inference with the max-norm metric scaled by the slope estimate.
pub fn lacki(data: &Dataset) -> Result<Predictor> {
    let theta = strongin_estimate(data)?;
    Predictor::new(data.clone(), ParamMetric::scaled_norm(), vec![theta])
}
