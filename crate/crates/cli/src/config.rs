//! Command-line and config-file parsing.
//!
//! A config file holds flat `key = value` lines; `#` starts a comment.
//! Flags given on the command line override file values. Every key is
//! validated before anything runs. `q`, `epsilon` and `seed` accept
//! comma-separated lists for `sweep`; `run` takes exactly one value each.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use exemplar_core::experiments::DEFAULT_DELTA;
use exemplar_core::metric::{ScalarMetric, VectorMetric};
use exemplar_core::stats::DEFAULT_WINDOW;
use exemplar_core::stream::{StreamGenerator, StreamKind};
use exemplar_core::target::Target;
use exemplar_core::{IndexKind, LearnerConfig};
use thiserror::Error;

pub const KEYS: &[&str] = &[
    "target",
    "metric",
    "index",
    "epsilon",
    "q",
    "tie_tolerance",
    "seed",
    "steps",
    "stream",
    "lower",
    "upper",
    "dim",
    "resolution",
    "walk_step",
    "cells",
    "window",
    "delta",
    "output",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("cannot read config file {path}: {reason}")]
    File { path: String, reason: String },
    #[error("{0}")]
    Usage(String),
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Parser, Debug)]
#[command(name = "exemplar", about = "Online exemplar-set learner: runs, sweeps and verification")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run one learner and write its per-step trace.
    Run(Flags),
    /// Run every combination of the q / epsilon / seed lists.
    Sweep(Flags),
    /// Run the built-in verification checks.
    Verify(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sine_1d | step_1d | quantized_labeler
    #[arg(long)]
    target: Option<String>,
    /// Input metric: euclidean | chebyshev | absolute
    #[arg(long)]
    metric: Option<String>,
    /// linear | vptree
    #[arg(long)]
    index: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    tie_tolerance: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// iid | grid | walk
    #[arg(long)]
    stream: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    resolution: Option<String>,
    #[arg(long)]
    walk_step: Option<String>,
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// Test hook: overrides the removal probability.
    #[arg(long, hide = true)]
    corrupt_removal: Option<String>,
}

impl Flags {
    fn pairs(self) -> Vec<(&'static str, String)> {
        [
            ("target", self.target),
            ("metric", self.metric),
            ("index", self.index),
            ("epsilon", self.epsilon),
            ("q", self.q),
            ("tie_tolerance", self.tie_tolerance),
            ("seed", self.seed),
            ("steps", self.steps),
            ("stream", self.stream),
            ("lower", self.lower),
            ("upper", self.upper),
            ("dim", self.dim),
            ("resolution", self.resolution),
            ("walk_step", self.walk_step),
            ("cells", self.cells),
            ("window", self.window),
            ("delta", self.delta),
            ("output", self.output),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    Verify,
}

#[derive(Clone, Debug)]
pub struct CliConfig {
    pub command: Command,
    pub target: Target,
    pub metric: VectorMetric,
    pub index: IndexKind,
    pub epsilons: Vec<f64>,
    pub qs: Vec<f64>,
    pub seeds: Vec<u64>,
    pub tie_tolerance: f64,
    pub steps: usize,
    pub stream: StreamKind,
    pub lower: f64,
    pub upper: f64,
    pub dim: usize,
    pub window: usize,
    pub delta: f64,
    pub output: PathBuf,
    pub removal_override: Option<f64>,
}

impl CliConfig {
    pub fn output_metric(&self) -> ScalarMetric {
        self.target.output_metric()
    }

    /// Learner configuration for one combination.
    pub fn learner(&self, epsilon: f64, q: f64, seed: u64) -> LearnerConfig {
        let config = LearnerConfig::new(epsilon, q)
            .and_then(|c| c.with_tie_tolerance(self.tie_tolerance))
            .expect("validated at parse time")
            .with_seed(seed);
        match self.removal_override {
            Some(p) => config.with_removal_probability_override(p),
            None => config,
        }
    }

    pub fn generator(&self, seed: u64) -> StreamGenerator {
        StreamGenerator::cube(self.stream.clone(), self.lower, self.upper, self.dim, seed)
            .expect("validated at parse time")
    }
}

/// Parses `key = value` lines.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Usage(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            )));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn number<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.trim()
        .parse()
        .map_err(|_| invalid(key, format!("malformed number `{raw}`")))
}

fn list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(invalid(key, "list is empty"));
    }
    items.into_iter().map(|s| number(key, s)).collect()
}

fn core_error(e: exemplar_core::Error) -> ConfigError {
    match e {
        exemplar_core::Error::InvalidConfig { key, reason } => invalid(key, reason),
        exemplar_core::Error::UnknownName { kind, name } => invalid(kind, format!("unknown name `{name}`")),
        other => ConfigError::Usage(other.to_string()),
    }
}

/// Parses argv (including the program name) into a validated config.
/// `Err(clap::Error)` covers help/version and flag syntax errors.
pub fn parse_config<I, T>(argv: I) -> Result<Result<CliConfig, ConfigError>, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, flags) = match cli.command {
        Sub::Run(f) => (Command::Run, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Verify(f) => (Command::Verify, f),
    };
    Ok(resolve(command, flags))
}

fn resolve(command: Command, mut flags: Flags) -> Result<CliConfig, ConfigError> {
    let mut values = match flags.config.take() {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| ConfigError::File {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    let corrupt = flags.corrupt_removal.take();
    for (k, v) in flags.pairs() {
        values.insert(k.to_string(), v);
    }
    let get = |k: &str| values.get(k).map(String::as_str);

    let cells: u32 = get("cells").map(|v| number("cells", v)).transpose()?.unwrap_or(4);
    let target = Target::from_name(get("target").unwrap_or("sine_1d"), cells).map_err(core_error)?;
    let metric = VectorMetric::from_name(get("metric").unwrap_or("euclidean")).map_err(core_error)?;
    let index = IndexKind::from_name(get("index").unwrap_or("vptree")).map_err(core_error)?;

    let epsilons: Vec<f64> = list("epsilon", get("epsilon").unwrap_or("0.05"))?;
    let qs: Vec<f64> = list("q", get("q").unwrap_or("0.9"))?;
    let seeds: Vec<u64> = list("seed", get("seed").unwrap_or("0"))?;
    if command != Command::Sweep {
        for (key, n) in [("epsilon", epsilons.len()), ("q", qs.len()), ("seed", seeds.len())] {
            if n != 1 {
                return Err(invalid(key, "lists are only accepted by `sweep`"));
            }
        }
    }
    let tie_tolerance: f64 = get("tie_tolerance").map(|v| number("tie_tolerance", v)).transpose()?.unwrap_or(0.0);
    for &epsilon in &epsilons {
        for &q in &qs {
            LearnerConfig::new(epsilon, q)
                .and_then(|c| c.with_tie_tolerance(tie_tolerance))
                .map_err(core_error)?;
        }
    }

    let steps: usize = get("steps").map(|v| number("steps", v)).transpose()?.unwrap_or(10_000);
    if steps == 0 {
        return Err(invalid("steps", "must be at least 1"));
    }
    let dim: usize = get("dim")
        .map(|v| number("dim", v))
        .transpose()?
        .unwrap_or(target.input_dim().unwrap_or(1));
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    if let Some(required) = target.input_dim() {
        if dim != required {
            return Err(invalid("dim", format!("target {} reads {required}-D inputs", target_name(&target))));
        }
    }
    if metric == VectorMetric::Absolute && dim != 1 {
        return Err(invalid("metric", "the absolute metric needs dim = 1"));
    }
    let (default_lower, default_upper) = target.default_bounds();
    let lower: f64 = get("lower").map(|v| number("lower", v)).transpose()?.unwrap_or(default_lower);
    let upper: f64 = get("upper").map(|v| number("upper", v)).transpose()?.unwrap_or(default_upper);
    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
        return Err(invalid("upper", "bounds must be finite with lower < upper"));
    }

    let stream = match get("stream").unwrap_or("iid") {
        "iid" => StreamKind::IidUniform,
        "grid" => {
            let resolution = match get("resolution") {
                Some(v) => number("resolution", v)?,
                None => default_resolution(steps, dim),
            };
            StreamKind::GridSweep { resolution }
        }
        "walk" => {
            let step_scale = match get("walk_step") {
                Some(v) => number("walk_step", v)?,
                None => 0.05 * (upper - lower),
            };
            StreamKind::RandomWalk { step_scale }
        }
        other => return Err(invalid("stream", format!("unknown stream `{other}` (iid | grid | walk)"))),
    };
    StreamGenerator::cube(stream.clone(), lower, upper, dim, 0).map_err(core_error)?;
    if let StreamKind::GridSweep { resolution } = stream {
        let enough = u32::try_from(dim)
            .ok()
            .and_then(|d| resolution.checked_pow(d))
            .is_some_and(|n| n >= steps);
        if !enough {
            return Err(invalid("resolution", format!("grid has fewer than {steps} points")));
        }
    }

    let window: usize = get("window").map(|v| number("window", v)).transpose()?.unwrap_or(DEFAULT_WINDOW);
    if window == 0 {
        return Err(invalid("window", "must be at least 1"));
    }
    let delta: f64 = get("delta").map(|v| number("delta", v)).transpose()?.unwrap_or(DEFAULT_DELTA);
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be a nonnegative finite number"));
    }
    let output = PathBuf::from(get("output").unwrap_or(match command {
        Command::Sweep => "sweep",
        _ => "trace.csv",
    }));
    let removal_override = corrupt.map(|v| number("corrupt_removal", &v)).transpose()?;

    Ok(CliConfig {
        command,
        target,
        metric,
        index,
        epsilons,
        qs,
        seeds,
        tie_tolerance,
        steps,
        stream,
        lower,
        upper,
        dim,
        window,
        delta,
        output,
        removal_override,
    })
}

fn target_name(t: &Target) -> &'static str {
    use exemplar_core::target::TargetFunction;
    TargetFunction::<exemplar_core::PointVector, f64>::name(t)
}

/// Smallest lattice resolution (at least 2) with enough points for `steps`.
fn default_resolution(steps: usize, dim: usize) -> usize {
    let mut r = ((steps as f64).powf(1.0 / dim as f64).floor() as usize).max(2);
    while u32::try_from(dim).ok().and_then(|d| r.checked_pow(d)).is_some_and(|n| n < steps) {
        r += 1;
    }
    r
}
