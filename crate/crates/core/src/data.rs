//! Synthetic regression targets, noise models, CSV I/O and seeded splits.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so a seed reproduces the same data on every platform.
//! Generators draw, per sample, the input coordinates in order followed by
//! the noise term.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictor::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Additive observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    #[default]
    None,
    /// Zero-mean normal noise with standard deviation `sd`.
    Gaussian { sd: f64 },
    /// Uniform noise on `[-halfwidth, halfwidth]`.
    Uniform { halfwidth: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let v = match *self {
            NoiseModel::None => return Ok(()),
            NoiseModel::Gaussian { sd } => sd,
            NoiseModel::Uniform { halfwidth } => halfwidth,
        };
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "noise scale must be finite and nonnegative, got {v}"
            )))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Gaussian { sd } => Normal::new(0.0, sd).expect("validated sd").sample(rng),
            NoiseModel::Uniform { halfwidth } => halfwidth * (2.0 * rng.random::<f64>() - 1.0),
        }
    }
}

/// `|−cos(2π x₁)| + x₁` on `[0, 1]^d`; only the first coordinate matters.
pub fn artificial_target(x: &[f64]) -> f64 {
    (-(2.0 * PI * x[0]).cos()).abs() + x[0]
}

/// `2 + sin(4π x)` on `[0, 1]`, frequency 2.
pub fn periodic_target(x: &[f64]) -> f64 {
    2.0 + (4.0 * PI * x[0]).sin()
}

/// Angular acceleration `−9.81 sin(q)` of a frictionless pendulum with state
/// `(q, q̇)`; independent of the velocity.
pub fn pendulum_target(x: &[f64]) -> f64 {
    -9.81 * x[0].sin()
}

/// Angle range of the pendulum generator.
pub const PENDULUM_ANGLE: (f64, f64) = (-PI, PI);
/// Angular-velocity range of the pendulum generator.
pub const PENDULUM_VELOCITY: (f64, f64) = (-5.0, 5.0);

/// A synthetic target together with its input domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum Generator {
    Artificial { d: usize },
    Periodic,
    Pendulum,
}

impl Generator {
    pub fn dim(&self) -> usize {
        match *self {
            Generator::Artificial { d } => d,
            Generator::Periodic => 1,
            Generator::Pendulum => 2,
        }
    }

    pub fn target(&self, x: &[f64]) -> f64 {
        match self {
            Generator::Artificial { .. } => artificial_target(x),
            Generator::Periodic => periodic_target(x),
            Generator::Pendulum => pendulum_target(x),
        }
    }

    /// Per-coordinate sampling range.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match *self {
            Generator::Artificial { d } => vec![(0.0, 1.0); d],
            Generator::Periodic => vec![(0.0, 1.0)],
            Generator::Pendulum => vec![PENDULUM_ANGLE, PENDULUM_VELOCITY],
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::invalid("input dimension must be at least 1"));
        }
        if n == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        Ok(())
    }

    fn draw_input<R: Rng + ?Sized>(bounds: &[(f64, f64)], rng: &mut R, out: &mut Vec<f64>) {
        out.extend(bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()));
    }

    /// `n` i.i.d. uniform inputs with noisy target values.
    pub fn generate(&self, n: usize, noise: NoiseModel, seed: u64) -> Result<Dataset> {
        self.check(n)?;
        noise.validate()?;
        let bounds = self.bounds();
        let mut rng = rng(seed);
        let mut inputs = Vec::with_capacity(n * bounds.len());
        let mut outputs = Vec::with_capacity(n);
        for i in 0..n {
            Self::draw_input(&bounds, &mut rng, &mut inputs);
            let x = &inputs[i * bounds.len()..];
            outputs.push(self.target(x) + noise.sample(&mut rng));
        }
        Dataset::new(bounds.len(), inputs, outputs)
    }

    /// `n` i.i.d. uniform inputs (row-major), e.g. for a noise-free test set.
    pub fn sample_inputs(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.check(n)?;
        let bounds = self.bounds();
        let mut rng = rng(seed);
        let mut inputs = Vec::with_capacity(n * bounds.len());
        for _ in 0..n {
            Self::draw_input(&bounds, &mut rng, &mut inputs);
        }
        Ok(inputs)
    }
}

pub fn gen_artificial(d: usize, n: usize, noise: NoiseModel, seed: u64) -> Result<Dataset> {
    Generator::Artificial { d }.generate(n, noise, seed)
}

pub fn gen_periodic(n: usize, noise: NoiseModel, seed: u64) -> Result<Dataset> {
    Generator::Periodic.generate(n, noise, seed)
}

pub fn gen_pendulum(n: usize, noise: NoiseModel, seed: u64) -> Result<Dataset> {
    Generator::Pendulum.generate(n, noise, seed)
}

/// Seeded random partition of `0..n` into a first part of `round(fraction·n)`
/// indices (half rounds up) and the rest. Both parts are returned sorted.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let k = (fraction * n as f64 + 0.5).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(seed));
    let (first, rest) = order.split_at(k.min(n));
    let (mut first, mut rest) = (first.to_vec(), rest.to_vec());
    first.sort_unstable();
    rest.sort_unstable();
    Ok((first, rest))
}

/// Random train/test partition with `round(train_fraction·N)` training samples.
pub fn train_test_split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if data.len() < 2 {
        return Err(Error::invalid("splitting needs at least two samples"));
    }
    let (train, test) = split_indices(data.len(), train_fraction, seed)?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::invalid(format!(
            "fraction {train_fraction} of {} samples leaves an empty part",
            data.len()
        )));
    }
    Ok((data.subset(&train)?, data.subset(&test)?))
}

/// Which CSV columns hold inputs and output. `None` means all columns but
/// the last as inputs, and the last as output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CsvColumns {
    #[serde(default)]
    pub inputs: Option<Vec<usize>>,
    #[serde(default)]
    pub output: Option<usize>,
}

/// Calls `each(row, values)` for every record of a numeric CSV file, where
/// `row` is the 1-based line number including any header line.
fn read_numeric_rows<F>(path: &Path, header: bool, mut each: F) -> Result<()>
where
    F: FnMut(usize, &[f64]) -> Result<()>,
{
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(file);
    let malformed = |row: usize, message: String| Error::MalformedRow {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1 + usize::from(header);
        let record = record.map_err(|e| malformed(row, e.to_string()))?;
        values.clear();
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| malformed(row, format!("column {c}: '{field}' is not a number")))?;
            if !v.is_finite() {
                return Err(malformed(row, format!("column {c}: non-finite value")));
            }
            values.push(v);
        }
        each(row, &values)?;
    }
    Ok(())
}

/// Reads a comma-separated numeric table into a dataset.
pub fn load_csv(path: impl AsRef<Path>, columns: &CsvColumns, header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let mut layout: Option<(Vec<usize>, usize)> = None;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    read_numeric_rows(path, header, |_, values| {
        let (in_cols, out_col) = match &layout {
            Some(l) => l,
            None => layout.insert(resolve_columns(columns, values.len())?),
        };
        inputs.extend(in_cols.iter().map(|&c| values[c]));
        outputs.push(values[*out_col]);
        Ok(())
    })?;
    let (in_cols, _) = layout.ok_or_else(|| Error::invalid(format!("{}: no data rows", path.display())))?;
    Dataset::new(in_cols.len(), inputs, outputs)
}

/// Reads a CSV of query inputs (every column is an input). Returns the row
/// width and the row-major values.
pub fn load_inputs(path: impl AsRef<Path>, header: bool) -> Result<(usize, Vec<f64>)> {
    let path = path.as_ref();
    let mut width = None;
    let mut values = Vec::new();
    read_numeric_rows(path, header, |_, row| {
        width.get_or_insert(row.len());
        values.extend_from_slice(row);
        Ok(())
    })?;
    let width = width.ok_or_else(|| Error::invalid(format!("{}: no data rows", path.display())))?;
    Ok((width, values))
}

fn resolve_columns(columns: &CsvColumns, width: usize) -> Result<(Vec<usize>, usize)> {
    if width < 2 && columns.inputs.is_none() {
        return Err(Error::invalid(format!("need at least two columns, found {width}")));
    }
    let output = columns.output.unwrap_or(width - 1);
    let inputs = match &columns.inputs {
        Some(cols) => cols.clone(),
        None => (0..width).filter(|&c| c != output).collect(),
    };
    if inputs.is_empty() {
        return Err(Error::invalid("no input columns selected"));
    }
    if let Some(&c) = inputs.iter().chain([&output]).find(|&&c| c >= width) {
        return Err(Error::invalid(format!("column {c} out of range for {width} columns")));
    }
    Ok((inputs, output))
}

/// Writes a dataset as CSV with header `x1,…,xd,y`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    let header: Vec<String> = (1..=data.dim())
        .map(|k| format!("x{k}"))
        .chain(["y".to_string()])
        .collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for (x, y) in data.samples() {
        for v in x {
            write!(out, "{v},").map_err(io)?;
        }
        writeln!(out, "{y}").map_err(io)?;
    }
    out.flush().map_err(io)
}
