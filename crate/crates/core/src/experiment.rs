//! Experiment runner: builds a dataset, trains each configured method,
//! measures absolute test errors and runtimes, and writes reports.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{fit_linear, lacki, LinearModel};
use crate::data::{load_csv, train_test_split, CsvColumns, Generator, NoiseModel};
use crate::error::{Error, Result};
use crate::metrics::ParamMetric;
use crate::optimizer::OptResult;
use crate::poki::{train, PokiConfig, ThetaBox};
use crate::predictor::{Dataset, Predictor};

/// Mixes a stream index into a base seed so that data, test inputs and
/// splits draw from unrelated ChaCha streams.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

const TEST_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Lin,
    Lacki,
    PokiLc,
    PokiArd,
    PokiPeriodic,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lin => "lin",
            Method::Lacki => "lacki",
            Method::PokiLc => "poki-lc",
            Method::PokiArd => "poki-ard",
            Method::PokiPeriodic => "poki-periodic",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        [
            Method::Lin,
            Method::Lacki,
            Method::PokiLc,
            Method::PokiArd,
            Method::PokiPeriodic,
        ]
        .into_iter()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::invalid(format!("unknown method '{name}'")))
    }

    pub fn is_poki(self) -> bool {
        matches!(self, Method::PokiLc | Method::PokiArd | Method::PokiPeriodic)
    }
}

/// One method entry of an experiment config. The optional fields only apply
/// to the POKI methods and fall back to [`PokiConfig::new`] defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_box: Option<ThetaBox>,
}

impl MethodSpec {
    pub fn new(method: Method) -> Self {
        MethodSpec {
            method,
            budget: None,
            tol: None,
            split_ratio: None,
            theta_box: None,
        }
    }

    /// The POKI configuration for inputs of dimension `dim`, or `None` for
    /// the baselines.
    pub fn poki_config(&self, dim: usize, seed: u64) -> Result<Option<PokiConfig>> {
        let metric = match self.method {
            Method::Lin | Method::Lacki => return Ok(None),
            Method::PokiLc => ParamMetric::scaled_norm(),
            Method::PokiArd => ParamMetric::ard_max(dim)?,
            Method::PokiPeriodic => ParamMetric::for_kind(crate::metrics::MetricKind::PeriodicSine, dim)?,
        };
        let mut cfg = PokiConfig::new(metric).with_seed(seed);
        cfg.theta_box = self.theta_box.clone();
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(r) = self.split_ratio {
            cfg.split_ratio = r;
        }
        Ok(Some(cfg))
    }
}

/// A fitted model of any method.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Linear(LinearModel),
    Kinky {
        predictor: Predictor,
        opt: Option<OptResult>,
    },
}

impl TrainedModel {
    pub fn predict_batch(&self, xs: &[f64]) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Linear(m) => {
                let dim = m.weights.len();
                if dim == 0 || !xs.len().is_multiple_of(dim) {
                    return Err(Error::invalid("query buffer does not match model dimension"));
                }
                xs.chunks_exact(dim).map(|x| m.predict(x)).collect()
            }
            TrainedModel::Kinky { predictor, .. } => predictor.predict_batch(xs),
        }
    }

    pub fn opt(&self) -> Option<&OptResult> {
        match self {
            TrainedModel::Kinky { opt, .. } => opt.as_ref(),
            TrainedModel::Linear(_) => None,
        }
    }
}

/// Trains `spec.method` on `data`; `seed` drives the POKI split.
pub fn fit_method(spec: &MethodSpec, data: &Dataset, seed: u64) -> Result<TrainedModel> {
    match spec.method {
        Method::Lin => Ok(TrainedModel::Linear(fit_linear(data)?)),
        Method::Lacki => Ok(TrainedModel::Kinky {
            predictor: lacki(data)?,
            opt: None,
        }),
        _ => {
            let cfg = spec.poki_config(data.dim(), seed)?.expect("POKI method");
            let fit = train(data, &cfg)?;
            Ok(TrainedModel::Kinky {
                predictor: fit.predictor,
                opt: Some(fit.opt),
            })
        }
    }
}

fn default_test_size() -> usize {
    4000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// Training data from a generator; the test error is measured against the
    /// noise-free target on `test_size` fresh uniform inputs.
    Synthetic {
        target: Generator,
        n: usize,
        #[serde(default)]
        noise: NoiseModel,
        #[serde(default = "default_test_size")]
        test_size: usize,
    },
    /// A CSV file split into training and test parts; the test error is
    /// measured against the observed test outputs.
    Csv {
        path: PathBuf,
        train_fraction: f64,
        #[serde(default = "default_true")]
        header: bool,
        #[serde(default)]
        columns: CsvColumns,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetSpec,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ExperimentConfig = serde_json::from_reader(BufReader::new(file))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::invalid("experiment needs at least one method"));
        }
        match &self.dataset {
            DatasetSpec::Synthetic { n, test_size, .. } if *n == 0 || *test_size == 0 => {
                Err(Error::invalid("synthetic sample and test sizes must be positive"))
            }
            DatasetSpec::Csv { path, .. } if !path.exists() => Err(Error::invalid(format!(
                "dataset file {} does not exist",
                path.display()
            ))),
            _ => Ok(()),
        }
    }
}

/// Training data plus the test inputs and their reference values.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: Dataset,
    pub test_inputs: Vec<f64>,
    pub test_targets: Vec<f64>,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    match &cfg.dataset {
        DatasetSpec::Synthetic {
            target,
            n,
            noise,
            test_size,
        } => {
            let train = target.generate(*n, *noise, cfg.seed)?;
            let test_inputs = target.sample_inputs(*test_size, derive_seed(cfg.seed, TEST_STREAM))?;
            let test_targets = test_inputs
                .chunks_exact(target.dim())
                .map(|x| target.target(x))
                .collect();
            Ok(Prepared {
                train,
                test_inputs,
                test_targets,
            })
        }
        DatasetSpec::Csv {
            path,
            train_fraction,
            header,
            columns,
        } => {
            let data = load_csv(path, columns, *header)?;
            let (train, test) = train_test_split(&data, *train_fraction, cfg.seed)?;
            Ok(Prepared {
                train,
                test_inputs: test.inputs_flat().to_vec(),
                test_targets: test.outputs().to_vec(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
}

/// Mean, sample standard deviation (n − 1 denominator, 0 for a single value)
/// and median of the absolute residuals.
pub fn error_stats(residuals: &[f64]) -> Result<ErrorStats> {
    if residuals.is_empty() {
        return Err(Error::invalid("error statistics need at least one residual"));
    }
    let mut abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let n = abs.len();
    let mean = abs.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        (abs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    abs.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        abs[n / 2]
    } else {
        0.5 * (abs[n / 2 - 1] + abs[n / 2])
    };
    Ok(ErrorStats { mean, std, median })
}

/// Serialises NaN as JSON `null` and reads `null` back as NaN.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// One row of an experiment report. Failed methods carry NaN statistics and
/// the error message in `status`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub method: String,
    #[serde(with = "nan_as_null")]
    pub error_mean: f64,
    #[serde(with = "nan_as_null")]
    pub error_std: f64,
    #[serde(with = "nan_as_null")]
    pub error_median: f64,
    #[serde(with = "nan_as_null")]
    pub train_seconds: f64,
    #[serde(with = "nan_as_null")]
    pub mean_predict_seconds: f64,
    pub opt_gap: Option<f64>,
    pub opt_evals: Option<usize>,
    pub status: String,
}

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn failed(method: Method, err: &Error) -> Self {
        ResultRecord {
            method: method.name().to_string(),
            error_mean: f64::NAN,
            error_std: f64::NAN,
            error_median: f64::NAN,
            train_seconds: f64::NAN,
            mean_predict_seconds: f64::NAN,
            opt_gap: None,
            opt_evals: None,
            status: format!("failed: {err}"),
        }
    }
}

/// Column order of the CSV report.
pub const REPORT_HEADER: &str =
    "method,error_mean,error_std,error_median,train_seconds,mean_predict_seconds,opt_gap,opt_evals,status";

fn run_method(spec: &MethodSpec, prepared: &Prepared, split_seed: u64) -> Result<ResultRecord> {
    let started = Instant::now();
    let model = fit_method(spec, &prepared.train, split_seed)?;
    let train_seconds = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let predictions = model.predict_batch(&prepared.test_inputs)?;
    let predict_seconds = started.elapsed().as_secs_f64();

    let residuals: Vec<f64> = predictions
        .iter()
        .zip(&prepared.test_targets)
        .map(|(p, t)| p - t)
        .collect();
    let stats = error_stats(&residuals)?;
    Ok(ResultRecord {
        method: spec.method.name().to_string(),
        error_mean: stats.mean,
        error_std: stats.std,
        error_median: stats.median,
        train_seconds,
        mean_predict_seconds: predict_seconds / predictions.len() as f64,
        opt_gap: model.opt().map(|o| o.gap),
        opt_evals: model.opt().map(|o| o.evals),
        status: "ok".to_string(),
    })
}

/// Runs every method of `cfg` in config order. A failing method yields a
/// failed record; only dataset preparation errors abort the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let split_seed = derive_seed(cfg.seed, SPLIT_STREAM);
    Ok(cfg
        .methods
        .iter()
        .map(|spec| run_method(spec, &prepared, split_seed).unwrap_or_else(|e| ResultRecord::failed(spec.method, &e)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `json` for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the records as CSV (fixed [`REPORT_HEADER`]) or as a JSON array of
/// flat objects.
pub fn emit_report(records: &[ResultRecord], path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_error(path))?;
    match format {
        ReportFormat::Json => {
            let mut out = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out).map_err(io_error(path))?;
            out.flush().map_err(io_error(path))
        }
        ReportFormat::Csv => {
            let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            writer.write_record(REPORT_HEADER.split(','))?;
            for r in records {
                writer.serialize(r)?;
            }
            writer.flush().map_err(io_error(path))
        }
    }
}

pub fn read_report(path: impl AsRef<Path>, format: ReportFormat) -> Result<Vec<ResultRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_error(path))?;
    match format {
        ReportFormat::Json => Ok(serde_json::from_reader(BufReader::new(file))?),
        ReportFormat::Csv => csv::Reader::from_reader(file)
            .deserialize()
            .map(|r| r.map_err(Error::from))
            .collect(),
    }
}

/// Fixed-width text table of the records for terminal output.
pub fn summary_table(records: &[ResultRecord]) -> String {
    let mut out = format!(
        "{:<14} {:>10} {:>10} {:>10} {:>11} {:>11} {:>10} {:>7}  status\n",
        "method", "mean", "std", "median", "train_s", "predict_s", "gap", "evals"
    );
    for r in records {
        let gap = r.opt_gap.map_or("-".to_string(), |g| format!("{g:.2e}"));
        let evals = r.opt_evals.map_or("-".to_string(), |e| e.to_string());
        out.push_str(&format!(
            "{:<14} {:>10.4} {:>10.4} {:>10.4} {:>11.3e} {:>11.3e} {:>10} {:>7}  {}\n",
            r.method,
            r.error_mean,
            r.error_std,
            r.error_median,
            r.train_seconds,
            r.mean_predict_seconds,
            gap,
            evals,
            r.status
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_conventions() {
        let s = error_stats(&[1.0, -1.0]).unwrap();
        assert_eq!((s.mean, s.std, s.median), (1.0, 0.0, 1.0));
        let s = error_stats(&[0.0, 0.0, 3.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!((s.std - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.median, 0.0);
        let s = error_stats(&[-2.0]).unwrap();
        assert_eq!((s.mean, s.std, s.median), (2.0, 0.0, 2.0));
        let s = error_stats(&[4.0, -1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert!(error_stats(&[]).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Lin,
            Method::Lacki,
            Method::PokiLc,
            Method::PokiArd,
            Method::PokiPeriodic,
        ] {
            assert_eq!(Method::parse(m.name()).unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!(Method::parse("gp").is_err());
    }

    fn record(method: &str, mean: f64) -> ResultRecord {
        ResultRecord {
            method: method.to_string(),
            error_mean: mean,
            error_std: 0.5,
            error_median: 0.25,
            train_seconds: 1.5e-3,
            mean_predict_seconds: 2e-7,
            opt_gap: Some(1e-4),
            opt_evals: Some(812),
            status: "ok".to_string(),
        }
    }

    #[test]
    fn reports_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![
            record("poki-lc", 0.125),
            ResultRecord {
                opt_gap: None,
                opt_evals: None,
                ..record("lin", 0.5)
            },
        ];
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            let path = dir.path().join(format!("r.{format:?}"));
            emit_report(&records, &path, format).unwrap();
            assert_eq!(read_report(&path, format).unwrap(), records);
        }
        let path = dir.path().join("empty.csv");
        emit_report(&[], &path, ReportFormat::Csv).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{REPORT_HEADER}\n"));

        let path = dir.path().join("one.csv");
        emit_report(&records[..1], &path, ReportFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), 9);
        assert_eq!(row, "poki-lc,0.125,0.5,0.25,0.0015,2e-7,0.0001,812,ok");
    }

    #[test]
    fn failed_records_survive_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        let rec = ResultRecord::failed(Method::Lacki, &Error::invalid("boom"));
        emit_report(std::slice::from_ref(&rec), &path, ReportFormat::Json).unwrap();
        let back = read_report(&path, ReportFormat::Json).unwrap();
        assert!(back[0].error_mean.is_nan());
        assert_eq!(back[0].status, rec.status);
        assert!(!back[0].is_ok());
    }

    #[test]
    fn config_parses_from_json() {
        let text = r#"{
            "name": "artificial-1d",
            "dataset": {"source": "synthetic", "target": {"generator": "artificial", "d": 1},
                        "n": 84, "noise": {"kind": "gaussian", "sd": 0.25}},
            "methods": [{"method": "lin"}, {"method": "poki-lc", "budget": 500, "tol": 0.01}],
            "seed": 3
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.methods[1].budget, Some(500));
        match cfg.dataset {
            DatasetSpec::Synthetic { test_size, n, .. } => assert_eq!((test_size, n), (4000, 84)),
            _ => panic!(),
        }
        let cfg = ExperimentConfig { methods: vec![], ..cfg };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn failing_method_does_not_abort_others() {
        let cfg = ExperimentConfig {
            name: "t".into(),
            dataset: DatasetSpec::Synthetic {
                target: Generator::Artificial { d: 2 },
                n: 20,
                noise: NoiseModel::None,
                test_size: 50,
            },
            // The periodic metric needs scalar inputs, so this one fails.
            methods: vec![MethodSpec::new(Method::PokiPeriodic), MethodSpec::new(Method::Lacki)],
            seed: 1,
            output: None,
        };
        let records = run_experiment(&cfg).unwrap();
        assert!(!records[0].is_ok());
        assert!(records[1].is_ok());
        assert!(records[1].error_mean.is_finite());
    }
}
