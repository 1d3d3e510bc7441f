//! `poki`: generate data, fit and apply models, run experiments and inspect
//! optimiser traces.
//!
//! Exit codes: 0 on success, 1 when a method fails, 2 on usage or I/O errors.

mod error;
mod model;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poki_core::data::{load_csv, load_inputs, write_csv, CsvColumns};
use poki_core::experiment::{
    emit_report, fit_method, run_experiment, summary_table, ExperimentConfig, Method, MethodSpec, ReportFormat,
    TrainedModel,
};
use poki_core::poki::{train_traced, ThetaBox};
use poki_core::{Dataset, Generator, NoiseModel, TraceRecord};
use serde::Deserialize;

use error::CliError;
use model::ModelFile;

#[derive(Debug, Parser)]
#[command(
    name = "poki",
    version,
    about = "Kinky inference regression with optimised hyperparameters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a synthetic dataset and write it as CSV.
    Gen(GenArgs),
    /// Train a model on a CSV dataset and save it as JSON.
    Fit(FitArgs),
    /// Predict with a saved model on a CSV of query inputs.
    Predict(PredictArgs),
    /// Run an experiment config and write its report.
    Experiment(ExperimentArgs),
    /// Train a POKI model and print the optimiser trace.
    Trace(FitArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GeneratorName {
    Artificial,
    Periodic,
    Pendulum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodName {
    Lin,
    Lacki,
    PokiLc,
    PokiArd,
    PokiPeriodic,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Lin => Method::Lin,
            MethodName::Lacki => Method::Lacki,
            MethodName::PokiLc => Method::PokiLc,
            MethodName::PokiArd => Method::PokiArd,
            MethodName::PokiPeriodic => Method::PokiPeriodic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatName {
    Csv,
    Json,
}

impl From<FormatName> for ReportFormat {
    fn from(f: FormatName) -> Self {
        match f {
            FormatName::Csv => ReportFormat::Csv,
            FormatName::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(value_enum)]
    generator: GeneratorName,
    /// Number of samples.
    #[arg(short, long)]
    n: usize,
    /// Input dimension (artificial target only).
    #[arg(short, long, default_value_t = 1)]
    d: usize,
    /// `none`, `gaussian:<sd>` or `uniform:<halfwidth>`.
    #[arg(long, default_value = "none", value_parser = parse_noise)]
    noise: NoiseModel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(value_enum)]
    method: MethodName,
    /// Training data CSV (last column is the output unless the config says
    /// otherwise).
    #[arg(long)]
    data: PathBuf,
    /// JSON with optional `budget`, `tol`, `split_ratio`, `theta_box`,
    /// `columns` and `header` fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Treat the first CSV line as data.
    #[arg(long)]
    no_header: bool,
    /// Model file for `fit`; trace file for `trace` (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatName,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// CSV of query inputs, one row per query.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    no_header: bool,
    /// Prediction CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; overrides the config's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; defaults from the report file extension.
    #[arg(long, value_enum)]
    format: Option<FormatName>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    budget: Option<usize>,
    tol: Option<f64>,
    split_ratio: Option<f64>,
    theta_box: Option<ThetaBox>,
    #[serde(default)]
    columns: CsvColumns,
    header: Option<bool>,
}

fn parse_noise(s: &str) -> Result<NoiseModel, String> {
    let (kind, level) = match s.split_once(':') {
        Some((k, v)) => (
            k,
            Some(v.parse::<f64>().map_err(|e| format!("bad noise level '{v}': {e}"))?),
        ),
        None => (s, None),
    };
    let noise = match (kind, level) {
        ("none", None) => NoiseModel::None,
        ("gaussian", Some(sd)) => NoiseModel::Gaussian { sd },
        ("uniform", Some(halfwidth)) => NoiseModel::Uniform { halfwidth },
        _ => {
            return Err(format!(
                "expected none, gaussian:<sd> or uniform:<halfwidth>, got '{s}'"
            ))
        }
    };
    noise.validate().map_err(|e| e.to_string())?;
    Ok(noise)
}

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{}: no such file", path.display())))
    }
}

fn require_writable(path: &Path) -> Result<(), CliError> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if path.is_dir() {
        return Err(CliError::Usage(format!("{}: is a directory", path.display())));
    }
    if !parent.is_dir() {
        return Err(CliError::Usage(format!(
            "{}: directory does not exist",
            parent.display()
        )));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    require_writable(&args.out)?;
    let generator = match args.generator {
        GeneratorName::Artificial => Generator::Artificial { d: args.d },
        GeneratorName::Periodic => Generator::Periodic,
        GeneratorName::Pendulum => Generator::Pendulum,
    };
    let data = generator.generate(args.n, args.noise, args.seed)?;
    write_csv(&data, &args.out)?;
    println!("wrote {} rows to {}", data.len(), args.out.display());
    Ok(())
}

/// Loads the config, data and method spec shared by `fit` and `trace`.
fn prepare_fit(args: &FitArgs) -> Result<(MethodSpec, Dataset, u64), CliError> {
    require_file(&args.data)?;
    let cfg = match &args.config {
        Some(path) => {
            require_file(path)?;
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => FitConfig::default(),
    };
    if let Some(out) = &args.out {
        require_writable(out)?;
    }
    let header = !args.no_header && cfg.header.unwrap_or(true);
    let data = load_csv(&args.data, &cfg.columns, header)?;
    let spec = MethodSpec {
        method: args.method.into(),
        budget: args.budget.or(cfg.budget),
        tol: args.tol.or(cfg.tol),
        split_ratio: cfg.split_ratio,
        theta_box: cfg.theta_box,
    };
    Ok((spec, data, args.seed.unwrap_or(0)))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let (spec, data, seed) = prepare_fit(&args)?;
    let trained = fit_method(&spec, &data, seed).map_err(|e| CliError::Method(e.to_string()))?;
    match &trained {
        TrainedModel::Linear(m) => println!("weights = {}\nintercept = {:.6}", fmt_vec(&m.weights), m.intercept),
        TrainedModel::Kinky { predictor, opt } => {
            println!("theta = {}", fmt_vec(predictor.theta()));
            if let Some(o) = opt {
                println!(
                    "loss = {:.6}\nlower_bound = {:.6}\ngap = {:.6}\nevals = {}\ntermination = {:?}",
                    o.min_value, o.lower_bound, o.gap, o.evals, o.termination
                );
            }
        }
    }
    if let Some(out) = &args.out {
        ModelFile::new(&spec, &trained, &args.data, seed).save(out)?;
        println!("model written to {}", out.display());
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    require_file(&args.model)?;
    require_file(&args.input)?;
    if let Some(out) = &args.out {
        require_writable(out)?;
    }
    let model = ModelFile::load(&args.model)?;
    let (width, xs) = load_inputs(&args.input, !args.no_header)?;
    if width != model.input_dim() {
        return Err(CliError::Usage(format!(
            "{} has {width} columns, model expects {}",
            args.input.display(),
            model.input_dim()
        )));
    }
    let predictions = model
        .to_trained()?
        .predict_batch(&xs)
        .map_err(|e| CliError::Method(e.to_string()))?;
    let mut text = String::from("prediction\n");
    for p in &predictions {
        text.push_str(&format!("{p}\n"));
    }
    match &args.out {
        Some(out) => {
            let mut w = create(out)?;
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(out, e))?;
            println!("wrote {} predictions to {}", predictions.len(), out.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    require_file(&args.config)?;
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.clone().or_else(|| cfg.output.clone());
    if let Some(out) = &out {
        require_writable(out)?;
    }
    let records = run_experiment(&cfg)?;
    print!("{}", summary_table(&records));
    if let Some(out) = &out {
        let format = args
            .format
            .map(ReportFormat::from)
            .unwrap_or_else(|| ReportFormat::from_path(out));
        emit_report(&records, out, format)?;
        println!("report written to {}", out.display());
    }
    let failed: Vec<&str> = records
        .iter()
        .filter(|r| !r.is_ok())
        .map(|r| r.method.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Method(format!("methods failed: {}", failed.join(", "))))
    }
}

fn write_trace(records: &[TraceRecord], format: FormatName, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        FormatName::Csv => {
            writeln!(out, "iteration,evals,incumbent,lower_bound,gap")?;
            for r in records {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.iteration, r.evals, r.incumbent, r.lower_bound, r.gap
                )?;
            }
        }
        FormatName::Json => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string(r).map_err(std::io::Error::other)?)?;
            }
        }
    }
    out.flush()
}

fn cmd_trace(args: FitArgs) -> Result<(), CliError> {
    let (spec, data, seed) = prepare_fit(&args)?;
    let cfg = spec
        .poki_config(data.dim(), seed)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .ok_or_else(|| CliError::Usage(format!("{} has no optimiser to trace", spec.method.name())))?;
    let mut records = Vec::new();
    let fit = train_traced(&data, &cfg, |r| records.push(*r)).map_err(|e| CliError::Method(e.to_string()))?;
    let summary = format!(
        "theta = {} loss = {:.6} gap = {:.6} evals = {}",
        fmt_vec(&fit.opt.argmin),
        fit.opt.min_value,
        fit.opt.gap,
        fit.opt.evals
    );
    match &args.out {
        Some(out) => {
            write_trace(&records, args.format, &mut create(out)?).map_err(|e| CliError::io(out, e))?;
            println!(
                "{summary}\n{} trace records written to {}",
                records.len(),
                out.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            write_trace(&records, args.format, &mut stdout.lock())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Trace(a) => cmd_trace(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
