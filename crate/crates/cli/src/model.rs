//! JSON model files.
//!
//! ```json
//! {
//!   "format": "poki-model/1",
//!   "method": "poki-ard",
//!   "model": {
//!     "kind": "kinky",
//!     "metric": { "variant": "ard_max", "theta": [9.4, 0.1] },
//!     "data": { "inputs": [[0.1, 2.0], ...], "outputs": [-0.98, ...] }
//!   },
//!   "provenance": { "source": "pendulum.csv", "seed": 7, "version": "0.1.0", ... }
//! }
//! ```
//!
//! Linear models use `{"kind": "linear", "weights": [...], "intercept": ...}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use poki_core::experiment::{Method, MethodSpec, TrainedModel};
use poki_core::{Dataset, LinearModel, MetricSpec, OptResult, Predictor};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FORMAT: &str = "poki-model/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelBody {
    Linear(LinearModel),
    Kinky { metric: MetricSpec, data: Dataset },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: PathBuf,
    pub seed: u64,
    pub version: String,
    pub config: MethodSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub method: Method,
    pub model: ModelBody,
    pub provenance: Provenance,
}

impl ModelFile {
    pub fn new(spec: &MethodSpec, trained: &TrainedModel, source: &Path, seed: u64) -> Self {
        let model = match trained {
            TrainedModel::Linear(m) => ModelBody::Linear(m.clone()),
            TrainedModel::Kinky { predictor, .. } => ModelBody::Kinky {
                metric: MetricSpec::new(predictor.metric(), predictor.theta()),
                data: predictor.data().clone(),
            },
        };
        ModelFile {
            format: FORMAT.to_string(),
            method: spec.method,
            model,
            provenance: Provenance {
                source: source.to_path_buf(),
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: spec.clone(),
                optimizer: trained.opt().cloned(),
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let model: ModelFile = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if model.format != FORMAT {
            return Err(CliError::Usage(format!(
                "{}: unsupported model format '{}'",
                path.display(),
                model.format
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut out = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(out)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io(path, e))
    }

    pub fn to_trained(&self) -> Result<TrainedModel, CliError> {
        Ok(match &self.model {
            ModelBody::Linear(m) => TrainedModel::Linear(m.clone()),
            ModelBody::Kinky { metric, data } => TrainedModel::Kinky {
                predictor: Predictor::new(data.clone(), metric.to_metric()?, metric.theta.clone())?,
                opt: self.provenance.optimizer.clone(),
            },
        })
    }

    pub fn input_dim(&self) -> usize {
        match &self.model {
            ModelBody::Linear(m) => m.weights.len(),
            ModelBody::Kinky { data, .. } => data.dim(),
        }
    }
}
