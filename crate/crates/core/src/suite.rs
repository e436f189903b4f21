//! The standard verification checks, shared by the `verify` subcommand and
//! the acceptance tests.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::Result;
use crate::experiments::{
    conditional_branch_experiment, growth_identity_experiment, miss_branch_experiment,
    theorem_experiment, RunReport, HIT_RATE_TOLERANCE,
};
use crate::index::IndexKind;
use crate::learner::LearnerConfig;
use crate::metric::{ScalarMetric, VectorMetric};
use crate::stream::{StreamGenerator, StreamKind};
use crate::target::Target;

pub const BRANCH_QS: [f64; 4] = [0.5, 0.6, 0.75, 0.9];
pub const BRANCH_TRIALS: usize = 100_000;
pub const MISS_TRIALS: usize = 10_000;
pub const GROWTH_PS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const GROWTH_QS: [f64; 3] = [0.5, 0.75, 0.9];
pub const GROWTH_STEPS: usize = 100_000;
pub const THEOREM_QS: [f64; 3] = [0.5, 0.75, 0.9];
pub const THEOREM_EPSILON: f64 = 0.05;
pub const THEOREM_STEPS: usize = 200_000;
pub const THEOREM_TAIL: usize = 50_000;
pub const STABILIZATION_DELTA: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target,
            tolerance,
            passed: (measured - target).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} measured={:.6} target={:.6} tolerance={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Mutation hook: replaces the removal probability everywhere.
    pub removal_override: Option<f64>,
}

impl SuiteOptions {
    fn config(&self, epsilon: f64, q: f64) -> LearnerConfig {
        let config = LearnerConfig::new(epsilon, q)
            .expect("suite parameters are valid")
            .with_seed(self.seed);
        match self.removal_override {
            Some(p) => config.with_removal_probability_override(p),
            None => config,
        }
    }
}

pub fn branch_checks(options: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for q in BRANCH_QS {
        let f = conditional_branch_experiment(&options.config(1.0, q), BRANCH_TRIALS);
        let exact = q == 0.5;
        checks.push(Check::within(
            format!("hit_branch_remove_frequency q={q}"),
            f.remove_frequency,
            1.0 / q - 1.0,
            if exact { 0.0 } else { 0.01 },
        ));
        checks.push(Check::within(
            format!("hit_branch_mean_delta q={q}"),
            f.mean_size_delta,
            1.0 - 1.0 / q,
            if exact { 0.0 } else { 0.015 },
        ));
    }
    let miss = miss_branch_experiment(&options.config(1.0, 0.9), MISS_TRIALS);
    checks.push(Check::within("miss_branch_mean_delta", miss.mean_size_delta, 1.0, 0.0));
    checks
}

pub fn growth_checks(options: &SuiteOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for q in GROWTH_QS {
        for p in GROWTH_PS {
            let g = growth_identity_experiment(p, &options.config(1.0, q), GROWTH_STEPS);
            let exact = p == 0.0 || (p == 1.0 && q == 0.5);
            checks.push(Check::within(
                format!("growth_identity p={p} q={q}"),
                g.mean_size_delta,
                g.predicted(),
                if exact { 0.0 } else { 0.01 },
            ));
        }
    }
    checks
}

/// One full learner run on `sin` over `[0, 2pi]` with absolute-difference
/// metrics and an iid uniform stream.
pub fn sine_run(q: f64, options: &SuiteOptions) -> Result<RunReport> {
    let config = options.config(THEOREM_EPSILON, q);
    let stream = StreamGenerator::cube(StreamKind::IidUniform, 0.0, TAU, 1, options.seed)?
        .generate(THEOREM_STEPS)?;
    theorem_experiment(
        &Target::Sine1d,
        VectorMetric::Absolute,
        ScalarMetric::Absolute,
        &config,
        IndexKind::default(),
        stream,
        THEOREM_TAIL,
        STABILIZATION_DELTA,
    )
}

pub fn theorem_checks(options: &SuiteOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for q in THEOREM_QS {
        let report = sine_run(q, options)?;
        checks.push(Check::within(
            format!("stabilized_tail_mean_delta q={q}"),
            report.tail_mean_size_delta,
            0.0,
            STABILIZATION_DELTA,
        ));
        let mut hit = Check::within(
            format!("tail_hit_rate q={q}"),
            report.tail_hit_rate,
            q,
            HIT_RATE_TOLERANCE,
        );
        // Only meaningful under stabilization.
        hit.passed &= report.stabilized;
        checks.push(hit);
    }
    Ok(checks)
}

pub fn run_suite(options: &SuiteOptions) -> Result<Vec<Check>> {
    let mut checks = branch_checks(options);
    checks.extend(growth_checks(options));
    checks.extend(theorem_checks(options)?);
    Ok(checks)
}
