use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use exemplar_core::experiments::{theorem_experiment_with, RunReport};
use exemplar_core::suite::{self, Check, SuiteOptions};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::CliConfig;
use crate::trace::{format_float, TraceRow, TraceWriter, SUMMARY_HEADER};
use crate::{EXIT_IO, EXIT_OK, EXIT_VERIFY_FAILED};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Core(#[from] exemplar_core::Error),
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Runs one combination and writes its trace to `trace_path`.
pub fn run_one(config: &CliConfig, epsilon: f64, q: f64, seed: u64, trace_path: &Path) -> Result<RunReport, RunError> {
    let file = File::create(trace_path).map_err(io_error(trace_path))?;
    let mut writer = TraceWriter::new(BufWriter::new(file)).map_err(io_error(trace_path))?;
    let learner = config.learner(epsilon, q, seed);
    let inputs = config.generator(seed).generate(config.steps)?;
    let mut write_error = None;
    let report = theorem_experiment_with(
        &config.target,
        config.metric,
        config.output_metric(),
        &learner,
        config.index,
        inputs,
        config.window,
        config.delta,
        |outcome, stats| {
            if write_error.is_none() {
                if let Err(e) = writer.write(&TraceRow::new(outcome, stats)) {
                    write_error = Some(e);
                }
            }
        },
    )?;
    if let Some(e) = write_error {
        return Err(io_error(trace_path)(e));
    }
    writer.finish().map_err(io_error(trace_path))?;
    Ok(report)
}

pub fn cmd_run(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_one(config, config.epsilons[0], config.qs[0], config.seeds[0], &config.output) {
        Ok(report) => {
            let _ = write!(out, "{report}");
            let _ = writeln!(out, "trace: {}", config.output.display());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
    }
}

fn trace_name(q: f64, epsilon: f64, seed: u64) -> String {
    format!("trace_q{q}_eps{epsilon}_seed{seed}.csv")
}

pub fn cmd_sweep(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let dir = &config.output;
    if let Err(e) = fs::create_dir_all(dir) {
        let _ = writeln!(err, "error: {}: {e}", dir.display());
        return EXIT_IO;
    }
    let combos: Vec<(f64, f64, u64)> = config
        .qs
        .iter()
        .flat_map(|&q| {
            config
                .epsilons
                .iter()
                .flat_map(move |&eps| config.seeds.iter().map(move |&seed| (q, eps, seed)))
        })
        .collect();
    let results: Vec<Result<RunReport, RunError>> = combos
        .par_iter()
        .map(|&(q, eps, seed)| run_one(config, eps, q, seed, &dir.join(trace_name(q, eps, seed))))
        .collect();

    let mut summary = String::new();
    summary.push_str(SUMMARY_HEADER);
    summary.push('\n');
    for ((q, eps, seed), result) in combos.iter().zip(results) {
        match result {
            Ok(r) => summary.push_str(&format!(
                "{q},{eps},{seed},{},{},{},{}\n",
                r.final_size,
                format_float(r.tail_hit_rate),
                format_float(r.tail_mean_size_delta),
                r.stabilized as u8
            )),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_IO;
            }
        }
    }
    let summary_path = dir.join("summary.csv");
    if let Err(e) = fs::write(&summary_path, summary) {
        let _ = writeln!(err, "error: {}: {e}", summary_path.display());
        return EXIT_IO;
    }
    let _ = writeln!(out, "runs: {}", combos.len());
    let _ = writeln!(out, "summary: {}", summary_path.display());
    EXIT_OK
}

pub fn verification_checks(options: &SuiteOptions) -> Result<Vec<Check>, exemplar_core::Error> {
    let ((branch, growth), theorem) = rayon::join(
        || rayon::join(|| suite::branch_checks(options), || suite::growth_checks(options)),
        || suite::theorem_checks(options),
    );
    let mut checks = branch;
    checks.extend(growth);
    checks.extend(theorem?);
    Ok(checks)
}

pub fn cmd_verify(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let options = SuiteOptions {
        seed: config.seeds[0],
        removal_override: config.removal_override,
    };
    let checks = match verification_checks(&options) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_VERIFY_FAILED;
        }
    };
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}
