//! On-disk formats: space files, function files, kernel triplets,
//! experiment configs and the report document.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use fracint_core::harness::{generate_space, log_distance_field, ExperimentConfig, SpaceFamily, WeightScheme};
use fracint_core::mspace::{build_space, euclidean_distances};
use fracint_core::operators::FractionalKernel;
use fracint_core::{DominatingSpec, FieldFunction, Space, VerificationReport};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A space file.
///
/// ```json
/// {
///   "points": { "coords": [[0.0], [1.0]] },
///   "weights": [1.0, 1.0],
///   "lambda": { "type": "power", "c": 2.0, "k": 1.0 },
///   "dim_n": 1.0
/// }
/// ```
///
/// `points` may instead hold a full `distance_matrix`. A `table` lambda
/// gives `radii` and one row of `values` per point. `dim_n` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Points,
    pub weights: Vec<f64>,
    pub lambda: LambdaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Points {
    Coords(Vec<Vec<f64>>),
    DistanceMatrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSpec {
    Power { c: f64, k: f64 },
    Table { radii: Vec<f64>, values: Vec<Vec<f64>> },
}

impl SpaceFile {
    pub fn build(&self) -> Result<Space, CliError> {
        let n = self.weights.len();
        let distances = match &self.points {
            Points::Coords(c) => {
                if c.len() != n {
                    return Err(CliError::input(format!(
                        "points.coords has {} entries but weights has {n}",
                        c.len()
                    )));
                }
                euclidean_distances(c).map_err(|e| CliError::input(format!("points.coords: {e}")))?
            }
            Points::DistanceMatrix(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::input(format!(
                        "points.distance_matrix must be {n} × {n} to match weights"
                    )));
                }
                rows.concat()
            }
        };
        let lambda = match &self.lambda {
            LambdaSpec::Power { c, k } => DominatingSpec::Power { c: *c, k: *k },
            LambdaSpec::Table { radii, values } => DominatingSpec::Table {
                radii: radii.clone(),
                values: values.clone(),
            },
        };
        build_space(distances, self.weights.clone(), lambda, self.dim_n).map_err(CliError::from)
    }

    /// The space as a file with an explicit distance matrix, so a reload
    /// reproduces it exactly.
    pub fn export(space: &Space) -> Self {
        let n = space.point_count();
        let rows = space.distances().chunks(n).map(<[f64]>::to_vec).collect();
        let lambda = match space.lambda_spec() {
            DominatingSpec::Power { c, k } => LambdaSpec::Power { c: *c, k: *k },
            DominatingSpec::Table { radii, values } => LambdaSpec::Table {
                radii: radii.clone(),
                values: values.clone(),
            },
        };
        Self {
            points: Points::DistanceMatrix(rows),
            weights: space.weights().to_vec(),
            lambda,
            dim_n: Some(space.dim_n()),
        }
    }
}

/// Built-in spaces: `grid1d:N`, `grid2d:SIDE`, `random:N:SEED`,
/// `clustered:N:CLUSTERS:SEED`.
pub fn parse_family(spec: &str) -> Option<SpaceFamily> {
    SpaceFamily::parse(spec)
}

/// `uniform`, `lognormal:SEED` or `powerlaw:EXPONENT`.
pub fn parse_weights(spec: &str) -> Result<WeightScheme, CliError> {
    let bad = || CliError::input(format!("--weights: cannot parse '{spec}'"));
    match spec.split_once(':') {
        None if spec == "uniform" => Ok(WeightScheme::Uniform),
        Some(("lognormal", s)) => Ok(WeightScheme::Lognormal {
            seed: s.parse().map_err(|_| bad())?,
        }),
        Some(("powerlaw", e)) => Ok(WeightScheme::PowerLaw {
            exponent: e.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// A built-in spec or a path to a space file.
pub fn load_space(spec: &str, weights: &WeightScheme) -> Result<Space, CliError> {
    if let Some(family) = parse_family(spec) {
        return generate_space(&family, weights).map_err(CliError::from);
    }
    let text = read(spec, "--space")?;
    let file: SpaceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("space file {spec}: {e}")))?;
    file.build()
}

/// A function given inline or as a file.
///
/// Inline forms: `const:C`, `indicator:X` and `logdist:X` (the field
/// `log(1 + d(x, X)/d_min)`), where `X` is a point index or `last`, and
/// a literal JSON array. Files hold a JSON array or whitespace separated
/// numbers, one per point.
pub fn load_function(spec: &str, space: &Space, flag: &str) -> Result<FieldFunction, CliError> {
    let n = space.point_count();
    let inline = |rest: &str| -> Result<f64, CliError> {
        rest.parse()
            .map_err(|_| CliError::input(format!("{flag}: cannot parse '{spec}'")))
    };
    let point = |rest: &str| -> Result<usize, CliError> {
        if rest == "last" {
            return Ok(n - 1);
        }
        match rest.parse::<usize>() {
            Ok(x) if x < n => Ok(x),
            _ => Err(CliError::input(format!(
                "{flag}: point '{rest}' is not an index below {n}"
            ))),
        }
    };
    let values = match spec.split_once(':') {
        Some(("const", c)) => vec![inline(c)?; n],
        Some(("indicator", x)) => {
            let x = point(x)?;
            (0..n).map(|i| if i == x { 1.0 } else { 0.0 }).collect()
        }
        Some(("logdist", x)) => {
            let x = point(x)?;
            return log_distance_field(space, x).map_err(CliError::from);
        }
        _ if spec.trim_start().starts_with('[') => {
            parse_values(spec).map_err(|e| CliError::input(format!("{flag}: {e}")))?
        }
        _ => parse_values(&read(spec, flag)?)
            .map_err(|e| CliError::input(format!("{flag} file {spec}: {e}")))?,
    };
    if values.len() != n {
        return Err(CliError::input(format!(
            "{flag}: function has {} values but the space has {n} points",
            values.len()
        )));
    }
    FieldFunction::new(values).map_err(|e| CliError::input(format!("{flag}: {e}")))
}

/// A JSON array of numbers or whitespace separated numbers.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| e.to_string());
    }
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            tok.parse::<f64>()
                .map_err(|_| format!("entry {i} ('{tok}') is not a number"))
        })
        .collect()
}

fn read(path: &str, flag: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{flag}: cannot read {path}: {e}")))
}

pub fn load_experiment_config(path: &str) -> Result<ExperimentConfig, CliError> {
    let text = read(path, "--config")?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("config file {path}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

pub fn kernel_triplets(kernel: &FractionalKernel) -> Vec<KernelEntry> {
    kernel
        .triplets()
        .map(|(i, j, value)| KernelEntry { i, j, value })
        .collect()
}

/// The single document every run writes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub command: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<VerificationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub exit_code: u8,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl Document {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            ..Self::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("inputs serialize");
        self.inputs.insert(key.to_owned(), v);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        for (k, v) in &self.inputs {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for r in &self.reports {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{status}] {} fitted={:.6e}", r.id, r.fitted_constant);
            if let Some(seed) = r.seed {
                let _ = writeln!(s, "  seed = {seed}");
            }
            for m in &r.metrics {
                let _ = writeln!(s, "  {} = {}", m.name, m.value);
            }
            if !r.ratios.is_empty() {
                let _ = writeln!(s, "  ratios = {}", r.ratios.len());
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(s, "  witness = {}", serde_json::to_string(w).expect("witness"));
            }
            if let Some(m) = &r.message {
                let _ = writeln!(s, "  message = {m}");
            }
            if let Some(t) = r.wall_time_s {
                let _ = writeln!(s, "  wall_time_s = {t:.3}");
            }
        }
        if let Some(d) = &self.data {
            let _ = writeln!(s, "data: {}", serde_json::to_string(d).expect("data"));
        }
        if let Some(v) = &self.values {
            let _ = writeln!(s, "values:");
            for x in v {
                let _ = writeln!(s, "{x:e}");
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error (exit {}): {}", e.exit_code, e.message);
        }
        s
    }

    /// One row per trial ratio: `report,trial,ratio`.
    pub fn write_table(&self, path: &Path) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["report", "trial", "ratio"])?;
        for r in &self.reports {
            for (i, v) in r.ratios.iter().enumerate() {
                w.serialize((&r.id, i, v))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(p) => fs::write(p, text),
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()
            }
        }
    }
}
