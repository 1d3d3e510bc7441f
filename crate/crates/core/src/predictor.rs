//! The kinky inference rule: ceiling and floor envelopes and their midpoint.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ParamMetric;

/// A finite sample of inputs with scalar observed outputs.
///
/// Inputs are stored row-major; every row has the same dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DatasetRepr", into = "DatasetRepr")]
pub struct Dataset {
    dim: usize,
    inputs: Vec<f64>,
    outputs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DatasetRepr {
    inputs: Vec<Vec<f64>>,
    outputs: Vec<f64>,
}

impl TryFrom<DatasetRepr> for Dataset {
    type Error = Error;
    fn try_from(r: DatasetRepr) -> Result<Self> {
        Dataset::from_rows(r.inputs, r.outputs)
    }
}

impl From<Dataset> for DatasetRepr {
    fn from(d: Dataset) -> Self {
        DatasetRepr {
            inputs: d.rows().map(<[f64]>::to_vec).collect(),
            outputs: d.outputs,
        }
    }
}

impl Dataset {
    /// Builds a dataset from a row-major input buffer of `dim` columns.
    pub fn new(dim: usize, inputs: Vec<f64>, outputs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("input dimension must be positive"));
        }
        if outputs.is_empty() {
            return Err(Error::invalid("dataset must contain at least one sample"));
        }
        if inputs.len() != dim * outputs.len() {
            return Err(Error::invalid(format!(
                "{} input values do not form {} rows of dimension {dim}",
                inputs.len(),
                outputs.len()
            )));
        }
        if let Some(i) = inputs.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite input in row {}", i / dim)));
        }
        if let Some(i) = outputs.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite output in row {i}")));
        }
        Ok(Dataset { dim, inputs, outputs })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, outputs: Vec<f64>) -> Result<Self> {
        if rows.len() != outputs.len() {
            return Err(Error::invalid(format!(
                "{} input rows but {} outputs",
                rows.len(),
                outputs.len()
            )));
        }
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::invalid(format!(
                "row {i} has dimension {}, expected {dim}",
                rows[i].len()
            )));
        }
        Dataset::new(dim, rows.concat(), outputs)
    }

    /// One-dimensional inputs.
    pub fn from_scalars(inputs: &[f64], outputs: &[f64]) -> Result<Self> {
        Dataset::new(1, inputs.to_vec(), outputs.to_vec())
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn output(&self, i: usize) -> f64 {
        self.outputs[i]
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    /// Row-major input buffer.
    pub fn inputs_flat(&self) -> &[f64] {
        &self.inputs
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.inputs.chunks_exact(self.dim)
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = (&[f64], f64)> + '_ {
        self.rows().zip(self.outputs.iter().copied())
    }

    /// The samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut inputs = Vec::with_capacity(indices.len() * self.dim);
        let mut outputs = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::invalid(format!(
                    "sample index {i} out of range for {} samples",
                    self.len()
                )));
            }
            inputs.extend_from_slice(self.input(i));
            outputs.push(self.outputs[i]);
        }
        Dataset::new(self.dim, inputs, outputs)
    }
}

/// Computes `(ceiling, floor)` at `x` in a single pass over the data.
#[inline]
pub(crate) fn envelope(data: &Dataset, metric: &ParamMetric, theta: &[f64], x: &[f64]) -> (f64, f64) {
    let mut ceiling = f64::INFINITY;
    let mut floor = f64::NEG_INFINITY;
    for (s, f) in data.samples() {
        let d = metric.eval_unchecked(theta, x, s);
        ceiling = ceiling.min(f + d);
        floor = floor.max(f - d);
    }
    (ceiling, floor)
}

/// A kinky inference predictor: data, pseudo-metric and a fixed parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor {
    data: Dataset,
    metric: ParamMetric,
    theta: Vec<f64>,
}

impl Predictor {
    pub fn new(data: Dataset, metric: ParamMetric, theta: Vec<f64>) -> Result<Self> {
        metric.check_theta(&theta)?;
        metric.check_input_dim(data.dim())?;
        Ok(Predictor { data, metric, theta })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn metric(&self) -> &ParamMetric {
        &self.metric
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.data.dim() {
            return Err(Error::invalid(format!(
                "query has dimension {}, data has dimension {}",
                x.len(),
                self.data.dim()
            )));
        }
        Ok(())
    }

    /// Upper envelope `min_i f̃_i + 𝔡(x, s_i; θ)`.
    pub fn ceiling(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        Ok(self
            .data
            .samples()
            .map(|(s, f)| f + self.metric.eval_unchecked(&self.theta, x, s))
            .fold(f64::INFINITY, f64::min))
    }

    /// Lower envelope `max_i f̃_i − 𝔡(x, s_i; θ)`.
    pub fn floor(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        Ok(self
            .data
            .samples()
            .map(|(s, f)| f - self.metric.eval_unchecked(&self.theta, x, s))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Midpoint of ceiling and floor.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        let (c, f) = envelope(&self.data, &self.metric, &self.theta, x);
        Ok(0.5 * c + 0.5 * f)
    }

    /// Predicts every row of the row-major buffer `xs` (`dim` columns).
    /// Rows are evaluated in parallel; each value is computed independently
    /// so the output does not depend on the thread count.
    pub fn predict_batch(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let dim = self.data.dim();
        if !xs.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "query buffer of length {} is not a multiple of dimension {dim}",
                xs.len()
            )));
        }
        Ok(xs
            .par_chunks_exact(dim)
            .map(|x| {
                let (c, f) = envelope(&self.data, &self.metric, &self.theta, x);
                0.5 * c + 0.5 * f
            })
            .collect())
    }

    /// How far the floor rises above the ceiling at `x`, clamped at 0.
    /// Positive only when the data is inconsistent with the metric at θ.
    pub fn consistency_gap(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        let (c, f) = envelope(&self.data, &self.metric, &self.theta, x);
        Ok((f - c).max(0.0))
    }

    /// Bound on how fast `predict(x; ·)` can change with θ in the max-norm:
    /// the largest parameter bound between `x` and any sample input.
    pub fn theta_sensitivity(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        Ok(self
            .data
            .rows()
            .map(|s| self.metric.theta_lipschitz_bound_unchecked(x, s))
            .fold(0.0, f64::max))
    }
}
