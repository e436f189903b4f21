//! Synthetic target functions `f : X -> Y` for experiments.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::metric::{PointVector, ScalarMetric};

pub trait TargetFunction<X, Y>: Send + Sync {
    fn evaluate(&self, x: &X) -> Y;
    fn name(&self) -> &'static str;
    fn lipschitz_bound(&self) -> Option<f64> {
        None
    }
}

/// `x -> sin(x[0])`, intended for inputs in `[0, 2pi]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sine1d;

impl TargetFunction<PointVector, f64> for Sine1d {
    fn evaluate(&self, x: &PointVector) -> f64 {
        x[0].sin()
    }
    fn name(&self) -> &'static str {
        "sine_1d"
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

impl TargetFunction<f64, f64> for Sine1d {
    fn evaluate(&self, x: &f64) -> f64 {
        x.sin()
    }
    fn name(&self) -> &'static str {
        "sine_1d"
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `-1` below `x[0] = 0.5`, `+1` from there on.
#[derive(Clone, Copy, Debug, Default)]
pub struct Step1d;

impl TargetFunction<PointVector, f64> for Step1d {
    fn evaluate(&self, x: &PointVector) -> f64 {
        if x[0] < 0.5 {
            -1.0
        } else {
            1.0
        }
    }
    fn name(&self) -> &'static str {
        "step_1d"
    }
}

/// Labels the cells of a `cells^d` grid over the unit cube. The label is the
/// cell's row-major index (first axis fastest), returned as `f64`.
#[derive(Clone, Copy, Debug)]
pub struct QuantizedLabeler {
    pub cells: u32,
}

impl Default for QuantizedLabeler {
    fn default() -> Self {
        Self { cells: 4 }
    }
}

impl TargetFunction<PointVector, f64> for QuantizedLabeler {
    fn evaluate(&self, x: &PointVector) -> f64 {
        let k = self.cells as f64;
        let mut label = 0.0;
        let mut stride = 1.0;
        for &c in x.iter() {
            let cell = (c.clamp(0.0, 1.0) * k).floor().min(k - 1.0);
            label += cell * stride;
            stride *= k;
        }
        label
    }
    fn name(&self) -> &'static str {
        "quantized_labeler"
    }
}

/// Target selected by configuration name.
#[derive(Clone, Copy, Debug)]
pub enum Target {
    Sine1d,
    Step1d,
    QuantizedLabeler(QuantizedLabeler),
}

impl Target {
    pub const NAMES: [&'static str; 3] = ["sine_1d", "step_1d", "quantized_labeler"];

    pub fn from_name(name: &str, cells: u32) -> Result<Self> {
        match name {
            "sine_1d" => Ok(Self::Sine1d),
            "step_1d" => Ok(Self::Step1d),
            "quantized_labeler" => {
                if cells == 0 {
                    return Err(Error::InvalidConfig {
                        key: "cells",
                        reason: "must be at least 1".into(),
                    });
                }
                Ok(Self::QuantizedLabeler(QuantizedLabeler { cells }))
            }
            other => Err(Error::UnknownName {
                kind: "target",
                name: other.to_string(),
            }),
        }
    }

    /// Regression targets live on the real line, labels under the discrete metric.
    pub fn output_metric(&self) -> ScalarMetric {
        match self {
            Self::Sine1d | Self::Step1d => ScalarMetric::Absolute,
            Self::QuantizedLabeler(_) => ScalarMetric::Discrete,
        }
    }

    /// Input dimension the target reads. `None` means any.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            Self::Sine1d | Self::Step1d => Some(1),
            Self::QuantizedLabeler(_) => None,
        }
    }

    /// Default per-axis sampling interval.
    pub fn default_bounds(&self) -> (f64, f64) {
        match self {
            Self::Sine1d => (0.0, TAU),
            Self::Step1d | Self::QuantizedLabeler(_) => (0.0, 1.0),
        }
    }
}

impl TargetFunction<PointVector, f64> for Target {
    fn evaluate(&self, x: &PointVector) -> f64 {
        match self {
            Self::Sine1d => TargetFunction::<PointVector, f64>::evaluate(&Sine1d, x),
            Self::Step1d => Step1d.evaluate(x),
            Self::QuantizedLabeler(q) => q.evaluate(x),
        }
    }
    fn name(&self) -> &'static str {
        match self {
            Self::Sine1d => "sine_1d",
            Self::Step1d => "step_1d",
            Self::QuantizedLabeler(_) => "quantized_labeler",
        }
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        match self {
            Self::Sine1d => Some(1.0),
            _ => None,
        }
    }
}
