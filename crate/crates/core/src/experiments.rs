//! Monte Carlo drivers for the size-growth identities and the limiting hit
//! rate.
//!
//! * [`conditional_branch_experiment`]: forced hits on a fixed model; the
//!   Remove frequency should be `1/q - 1` and the mean size change `1 - 1/q`.
//! * [`miss_branch_experiment`]: forced misses; always Insert.
//! * [`growth_identity_experiment`]: hits stubbed as Bernoulli(p); the mean
//!   size change should be `1 - p/q`.
//! * [`theorem_experiment`]: a full learner on a real target; once the tail
//!   mean size change is within `delta` of zero the tail hit rate should be
//!   close to `q`.

use std::fmt;

use crate::error::Result;
use crate::index::IndexKind;
use crate::learner::{resolve_action, step, Action, Learner, LearnerConfig, Model, StepOutcome};
use crate::metric::{AbsoluteDifference, Metric};
use crate::rng::{RandomStream, LEARNER_STREAM, ORACLE_STREAM};
use crate::stats::WindowStats;
use crate::target::TargetFunction;

/// Default stabilization threshold on the tail mean size change.
pub const DEFAULT_DELTA: f64 = 0.01;
/// Allowance for `|hit_rate - q|` in the theorem check.
pub const HIT_RATE_TOLERANCE: f64 = 0.03;

#[derive(Clone, Debug, PartialEq)]
pub struct BranchFrequencies {
    pub trials: usize,
    pub remove_frequency: f64,
    pub keep_frequency: f64,
    /// Mean size change over the trials.
    pub mean_size_delta: f64,
}

fn frequencies(trials: usize, removes: usize, keeps: usize, inserts: usize) -> BranchFrequencies {
    let n = trials as f64;
    BranchFrequencies {
        trials,
        remove_frequency: removes as f64 / n,
        keep_frequency: keeps as f64 / n,
        mean_size_delta: (inserts as f64 - removes as f64) / n,
    }
}

/// Forces the hit branch `trials` times on the model
/// `{(0.0, 0.0), (5.0, 0.9)}` with query `(0.1, 0.05)` and `epsilon = 0.5`.
/// Only `q`, the seed and any removal override are taken from `config`.
pub fn conditional_branch_experiment(config: &LearnerConfig, trials: usize) -> BranchFrequencies {
    let mut config = config.clone();
    config.epsilon = 0.5;
    let fixture = Model::from_pairs([(0.0, 0.0), (5.0, 0.9)]);
    let mut rng = RandomStream::substream(config.seed, LEARNER_STREAM);
    let (mut removes, mut keeps, mut inserts) = (0, 0, 0);
    for _ in 0..trials {
        let mut model = fixture.clone();
        let outcome = step(&mut model, 1, 0.1, 0.05, &AbsoluteDifference, &AbsoluteDifference, &config, &mut rng);
        debug_assert!(outcome.hit);
        match outcome.action {
            Action::Remove => removes += 1,
            Action::Keep => keeps += 1,
            Action::Insert => inserts += 1,
        }
    }
    frequencies(trials, removes, keeps, inserts)
}

/// Forces the miss branch `trials` times: model `{(0.0, 0.0)}`, query
/// `(1.0, 1.0)`, `epsilon = 0.5`. Trial `i` runs on sub-stream `i` of the seed.
pub fn miss_branch_experiment(config: &LearnerConfig, trials: usize) -> BranchFrequencies {
    let mut config = config.clone();
    config.epsilon = 0.5;
    let (mut removes, mut keeps, mut inserts) = (0, 0, 0);
    for i in 0..trials {
        let mut rng = RandomStream::substream(config.seed, i as u64);
        let mut model = Model::from_pairs([(0.0, 0.0)]);
        let outcome = step(&mut model, 1, 1.0, 1.0, &AbsoluteDifference, &AbsoluteDifference, &config, &mut rng);
        match outcome.action {
            Action::Remove => removes += 1,
            Action::Keep => keeps += 1,
            Action::Insert => inserts += 1,
        }
    }
    frequencies(trials, removes, keeps, inserts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthIdentity {
    pub hit_probability: f64,
    pub q: f64,
    pub steps: usize,
    pub hit_rate: f64,
    pub mean_size_delta: f64,
}

impl GrowthIdentity {
    /// `1 - p/q`.
    pub fn predicted(&self) -> f64 {
        1.0 - self.hit_probability / self.q
    }
}

/// Drives the update rule with hits drawn as independent Bernoulli(`p`) on
/// the oracle sub-stream, bypassing geometry entirely.
pub fn growth_identity_experiment(hit_probability: f64, config: &LearnerConfig, steps: usize) -> GrowthIdentity {
    let mut oracle = RandomStream::substream(config.seed, ORACLE_STREAM);
    let mut rng = RandomStream::substream(config.seed, LEARNER_STREAM);
    let mut hits = 0usize;
    let mut total: i64 = 0;
    for _ in 0..steps {
        let hit = oracle.bernoulli(hit_probability);
        hits += hit as usize;
        total += resolve_action(hit, config, &mut rng).size_delta() as i64;
    }
    GrowthIdentity {
        hit_probability,
        q: config.q,
        steps,
        hit_rate: hits as f64 / steps as f64,
        mean_size_delta: total as f64 / steps as f64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSnapshot {
    pub n: u64,
    pub model_size: usize,
    pub hit_rate: f64,
    pub mean_size_delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub target: String,
    pub input_metric: String,
    pub output_metric: String,
    pub index: String,
    pub config: LearnerConfig,
    pub window: usize,
    pub delta: f64,
    pub steps: u64,
    pub final_size: usize,
    pub tail_hit_rate: f64,
    pub tail_mean_size_delta: f64,
    pub stabilized: bool,
    /// One snapshot at every multiple of `window`.
    pub series: Vec<WindowSnapshot>,
}

impl RunReport {
    /// `Some(|tail_hit_rate - q| <= tolerance)` when the run stabilized,
    /// `None` otherwise: the limit claim is conditional on stabilization.
    pub fn limit_holds(&self, tolerance: f64) -> Option<bool> {
        self.stabilized
            .then(|| (self.tail_hit_rate - self.config.q).abs() <= tolerance)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "input_metric: {}", self.input_metric)?;
        writeln!(f, "output_metric: {}", self.output_metric)?;
        writeln!(f, "index: {}", self.index)?;
        writeln!(f, "epsilon: {}", self.config.epsilon)?;
        writeln!(f, "q: {}", self.config.q)?;
        writeln!(f, "tie_tolerance: {}", self.config.tie_tolerance)?;
        writeln!(f, "seed: {}", self.config.seed)?;
        writeln!(f, "window: {}", self.window)?;
        writeln!(f, "delta: {}", self.delta)?;
        writeln!(f, "steps: {}", self.steps)?;
        writeln!(f, "final_size: {}", self.final_size)?;
        writeln!(f, "tail_hit_rate: {}", self.tail_hit_rate)?;
        writeln!(f, "tail_mean_delta: {}", self.tail_mean_size_delta)?;
        writeln!(f, "stabilized: {}", self.stabilized)?;
        match self.limit_holds(HIT_RATE_TOLERANCE) {
            Some(ok) => writeln!(f, "hit_rate_near_q: {ok}"),
            None => writeln!(f, "hit_rate_near_q: n/a (not stabilized)"),
        }
    }
}

/// Runs a learner over `inputs`, labelling each with `target`, and calls
/// `observe` after every step.
#[allow(clippy::too_many_arguments)]
pub fn theorem_experiment_with<X, Y, MX, MY, F, I>(
    target: &F,
    input_metric: MX,
    output_metric: MY,
    config: &LearnerConfig,
    index: IndexKind,
    inputs: I,
    window: usize,
    delta: f64,
    mut observe: impl FnMut(&StepOutcome, &WindowStats),
) -> Result<RunReport>
where
    X: Clone,
    MX: Metric<X>,
    MY: Metric<Y>,
    F: TargetFunction<X, Y> + ?Sized,
    I: IntoIterator<Item = X>,
{
    let input_name = input_metric.name().to_string();
    let output_name = output_metric.name().to_string();
    let mut learner = Learner::new(input_metric, output_metric, config.clone(), index)?;
    let mut rng = RandomStream::substream(config.seed, LEARNER_STREAM);
    let mut stats = WindowStats::new(window);
    let mut series = Vec::new();
    for x in inputs {
        let y = target.evaluate(&x);
        let outcome = learner.step(x, y, &mut rng);
        stats.update(&outcome);
        observe(&outcome, &stats);
        if stats.steps().is_multiple_of(window as u64) {
            series.push(WindowSnapshot {
                n: stats.steps(),
                model_size: stats.model_size(),
                hit_rate: stats.hit_rate(),
                mean_size_delta: stats.mean_size_delta(),
            });
        }
    }
    if stats.steps() == 0 {
        return Err(crate::error::Error::EmptyStream);
    }
    Ok(RunReport {
        target: target.name().to_string(),
        input_metric: input_name,
        output_metric: output_name,
        index: index.name().to_string(),
        config: config.clone(),
        window,
        delta,
        steps: stats.steps(),
        final_size: learner.model().len(),
        tail_hit_rate: stats.hit_rate(),
        tail_mean_size_delta: stats.mean_size_delta(),
        stabilized: stats.mean_size_delta().abs() <= delta,
        series,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn theorem_experiment<X, Y, MX, MY, F, I>(
    target: &F,
    input_metric: MX,
    output_metric: MY,
    config: &LearnerConfig,
    index: IndexKind,
    inputs: I,
    window: usize,
    delta: f64,
) -> Result<RunReport>
where
    X: Clone,
    MX: Metric<X>,
    MY: Metric<Y>,
    F: TargetFunction<X, Y> + ?Sized,
    I: IntoIterator<Item = X>,
{
    theorem_experiment_with(target, input_metric, output_metric, config, index, inputs, window, delta, |_, _| {})
}
