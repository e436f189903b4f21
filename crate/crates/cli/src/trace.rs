//! Per-step trace CSV.
//!
//! Header: `n,action,model_size,output_distance,hit,window_hit_rate,window_mean_delta`.
//! Floats are written with 17 significant digits (`{:.16e}`), which round
//! trips every `f64`; an infinite distance is written as `inf`. `hit` is
//! `0` or `1`.

use std::io::{self, Write};

use exemplar_core::stats::WindowStats;
use exemplar_core::{Action, StepOutcome};

pub const TRACE_HEADER: &str = "n,action,model_size,output_distance,hit,window_hit_rate,window_mean_delta";
pub const SUMMARY_HEADER: &str = "q,epsilon,seed,final_size,tail_hit_rate,tail_mean_delta,stabilized";

pub fn format_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    pub action: Action,
    pub model_size: usize,
    pub output_distance: f64,
    pub hit: bool,
    pub window_hit_rate: f64,
    pub window_mean_delta: f64,
}

impl TraceRow {
    pub fn new(outcome: &StepOutcome, stats: &WindowStats) -> Self {
        Self {
            n: outcome.step_index,
            action: outcome.action,
            model_size: outcome.model_size_after,
            output_distance: outcome.output_distance,
            hit: outcome.hit,
            window_hit_rate: stats.hit_rate(),
            window_mean_delta: stats.mean_size_delta(),
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.action,
            self.model_size,
            format_float(self.output_distance),
            self.hit as u8,
            format_float(self.window_hit_rate),
            format_float(self.window_mean_delta),
        )
    }

    pub fn parse(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        let [n, action, size, distance, hit, rate, delta] = fields[..] else {
            return Err(format!("expected 7 fields, found {}", fields.len()));
        };
        let float = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
        Ok(Self {
            n: n.parse().map_err(|e| format!("n: {e}"))?,
            action: action.parse()?,
            model_size: size.parse().map_err(|e| format!("model_size: {e}"))?,
            output_distance: float(distance)?,
            hit: match hit {
                "0" => false,
                "1" => true,
                other => return Err(format!("hit: `{other}`")),
            },
            window_hit_rate: float(rate)?,
            window_mean_delta: float(delta)?,
        })
    }
}

pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{TRACE_HEADER}")?;
        Ok(Self { out })
    }

    pub fn write(&mut self, row: &TraceRow) -> io::Result<()> {
        writeln!(self.out, "{}", row.to_line())
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
