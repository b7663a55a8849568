//! Sweep configuration, execution and serialization for the benchmark CLI.
//!
//! A sweep walks one family parameter over a range, evaluates every
//! requested method at every point, and emits plot-ready CSV or JSON.
//! Points run in parallel; output order is fixed by (axis index, purity
//! index, method index) regardless of completion order, so identical
//! configurations reproduce identical bytes up to the wall-time column.

use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use phasebench::report::{evaluate_point, BenchmarkResult, CutoffPolicy, EvalOptions, Method};
use phasebench::states::FamilySpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Output format of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// The family kinds a sweep command can address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Qubit,
    Coherent,
    SqueezedVacuum,
    DisplacedThermal,
    SqueezedThermal,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Qubit => "qubit",
            FamilyKind::Coherent => "coherent",
            FamilyKind::SqueezedVacuum => "squeezed_vacuum",
            FamilyKind::DisplacedThermal => "displaced_thermal",
            FamilyKind::SqueezedThermal => "squeezed_thermal",
        }
    }

    /// Whether the family carries a purity parameter.
    pub fn thermal(&self) -> bool {
        matches!(
            self,
            FamilyKind::DisplacedThermal | FamilyKind::SqueezedThermal
        )
    }
}

/// A fully resolved sweep: family template, axis, methods, cutoff policy,
/// output target.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub kind: FamilyKind,
    /// Fixed qubit polar angle; ignored by other families.
    pub theta: f64,
    /// Axis range (η, α², λ or r depending on the family).
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Purity values; `[1.0]` effectively for non-thermal families.
    pub mu_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub cutoff: CutoffPolicy,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub eval: EvalOptions,
}

impl SweepConfig {
    /// Command defaults mirroring the reference figures: coherent and
    /// displaced-thermal sweeps walk α², squeezed families walk λ or r.
    pub fn defaults(kind: FamilyKind) -> Self {
        let (from, to, points) = match kind {
            FamilyKind::Qubit => (0.0, 1.0, 11),
            FamilyKind::Coherent => (0.0, 10.0, 21),
            FamilyKind::SqueezedVacuum => (0.0, 0.9, 19),
            FamilyKind::DisplacedThermal => (0.0, 5.0, 11),
            FamilyKind::SqueezedThermal => (0.0, 1.0, 11),
        };
        let methods = match kind {
            FamilyKind::Qubit => vec![Method::Analytic, Method::Sdp],
            FamilyKind::Coherent | FamilyKind::SqueezedVacuum => vec![
                Method::PhaseMeasurement,
                Method::RestrictedGuess,
                Method::Sdp,
            ],
            _ => vec![Method::Sdp],
        };
        let mu_values = if kind.thermal() {
            vec![1.0, 0.95, 0.8, 0.7]
        } else {
            vec![1.0]
        };
        let cutoff = match kind {
            FamilyKind::Qubit => CutoffPolicy::Fixed(1),
            FamilyKind::Coherent | FamilyKind::SqueezedVacuum => CutoffPolicy::Fixed(23),
            _ => CutoffPolicy::Fixed(12),
        };
        Self {
            kind,
            theta: std::f64::consts::FRAC_PI_2,
            from,
            to,
            points,
            mu_values,
            methods,
            cutoff,
            out: None,
            format: Format::Csv,
            eval: EvalOptions::default(),
        }
    }

    fn family_at(&self, axis: f64, mu: f64) -> FamilySpec {
        match self.kind {
            FamilyKind::Qubit => FamilySpec::Qubit {
                eta: axis,
                theta: self.theta,
            },
            FamilyKind::Coherent => FamilySpec::Coherent {
                alpha: axis.max(0.0).sqrt(),
            },
            FamilyKind::SqueezedVacuum => FamilySpec::SqueezedVacuum { lambda: axis },
            FamilyKind::DisplacedThermal => FamilySpec::DisplacedThermal {
                alpha: axis.max(0.0).sqrt(),
                mu,
            },
            FamilyKind::SqueezedThermal => FamilySpec::SqueezedThermal { r: axis, mu },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(CliError::Config("point count must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("at least one method is required".into()));
        }
        if self.mu_values.is_empty() {
            return Err(CliError::Config("at least one purity value".into()));
        }
        let probe = self.family_at(self.from.max(1e-6), self.mu_values[0]);
        for m in &self.methods {
            if !m.compatible_with(&probe) {
                return Err(CliError::Config(format!(
                    "method {m} is not defined for family {}",
                    self.kind.name()
                )));
            }
        }
        Ok(())
    }
}

/// One failed sweep point, kept alongside the successes.
#[derive(Debug, Clone)]
pub struct PointFailure {
    pub family: String,
    pub method: Method,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub results: Vec<BenchmarkResult>,
    pub failures: Vec<PointFailure>,
}

/// Run every (axis point × purity × method) combination. Individual
/// failures are recorded, not fatal; ordering is deterministic.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let mut tasks: Vec<(FamilySpec, Method)> = Vec::new();
    for i in 0..config.points {
        let axis = if config.points == 1 {
            config.from
        } else {
            config.from + (config.to - config.from) * i as f64 / (config.points - 1) as f64
        };
        for &mu in &config.mu_values {
            let family = config.family_at(axis, mu);
            for &method in &config.methods {
                tasks.push((family, method));
            }
        }
    }
    let evaluated: Vec<(usize, std::result::Result<BenchmarkResult, String>)> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, (family, method))| {
            let out = evaluate_point(family, *method, &config.cutoff, &config.eval)
                .map_err(|e| e.to_string());
            (i, out)
        })
        .collect();

    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut ordered = evaluated;
    ordered.sort_by_key(|(i, _)| *i);
    for (i, out) in ordered {
        match out {
            Ok(r) => results.push(r),
            Err(error) => failures.push(PointFailure {
                family: tasks[i].0.canonical(),
                method: tasks[i].1,
                error,
            }),
        }
    }
    Ok(SweepOutcome { results, failures })
}

/// CSV columns, fixed order.
pub const CSV_HEADER: &str =
    "family,param_name,param_value,mu,method,fidelity,trunc_deficit,quad_error,solver_residual,wall_ms";

/// Serialize results to the requested format. CSV floats use the shortest
/// round-trip form; JSON is the canonical compact serde form, which
/// re-serializes byte-identically after parsing.
pub fn serialize_results(results: &[BenchmarkResult], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in results {
                let mu = r.mu.map(|m| m.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.family,
                    r.param_name,
                    r.param_value,
                    mu,
                    r.method,
                    r.fidelity,
                    r.trunc_deficit,
                    r.quad_error,
                    r.solver_residual,
                    r.wall_ms
                ));
            }
            out.into_bytes()
        }
        Format::Json => {
            let mut bytes =
                serde_json::to_vec(results).expect("record serialization is infallible");
            bytes.push(b'\n');
            bytes
        }
    }
}

/// Parse records back from the JSON form.
pub fn parse_results_json(bytes: &[u8]) -> std::result::Result<Vec<BenchmarkResult>, String> {
    serde_json::from_slice(bytes).map_err(|e| e.to_string())
}

pub fn write_results(
    results: &[BenchmarkResult],
    format: Format,
    path: &std::path::Path,
) -> Result<()> {
    std::fs::write(path, serialize_results(results, format)).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

// --- config file and flag parsing --------------------------------------------

/// Parse a flat `key = value` config file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Apply one key/value (from the config file or a flag) onto a config.
pub fn apply_setting(config: &mut SweepConfig, key: &str, value: &str) -> Result<()> {
    let parse_f64 = |v: &str| {
        v.parse::<f64>()
            .map_err(|e| CliError::Config(format!("{key}: {e}")))
    };
    match key {
        "points" => {
            config.points = value
                .parse()
                .map_err(|e| CliError::Config(format!("points: {e}")))?;
        }
        "from" => config.from = parse_f64(value)?,
        "to" => config.to = parse_f64(value)?,
        "theta" => config.theta = parse_f64(value)?,
        "cutoff" => {
            let n: usize = value
                .parse()
                .map_err(|e| CliError::Config(format!("cutoff: {e}")))?;
            config.cutoff = CutoffPolicy::Fixed(n);
        }
        "deficit-tol" => {
            config.cutoff = CutoffPolicy::DeficitTol(parse_f64(value)?);
        }
        "methods" => {
            let mut methods = Vec::new();
            for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let m = Method::parse(name)
                    .ok_or_else(|| CliError::Config(format!("unknown method {name:?}")))?;
                methods.push(m);
            }
            config.methods = methods;
        }
        "mu" => {
            let mut mus = Vec::new();
            for v in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                mus.push(parse_f64(v)?);
            }
            config.mu_values = mus;
        }
        "out" => config.out = Some(PathBuf::from(value)),
        "format" => {
            config.format = Format::parse(value)
                .ok_or_else(|| CliError::Config(format!("unknown format {value:?}")))?;
        }
        "family" => {
            let spec = FamilySpec::parse(value)
                .map_err(|e| CliError::Config(format!("family: {e}")))?;
            if spec.kind_name() != config.kind.name() {
                return Err(CliError::Config(format!(
                    "family {} does not match the {} command",
                    spec.kind_name(),
                    config.kind.name()
                )));
            }
            if let FamilySpec::Qubit { theta, .. } = spec {
                config.theta = theta;
            }
            if let Some(mu) = spec.mu() {
                config.mu_values = vec![mu];
            }
        }
        other => {
            return Err(CliError::Config(format!("unknown setting {other:?}")));
        }
    }
    Ok(())
}
