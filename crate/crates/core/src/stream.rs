//! Input sequences `x_1, x_2, ...` for experiments.

use crate::error::{Error, Result};
use crate::metric::PointVector;
use crate::rng::{RandomStream, GENERATOR_STREAM};

#[derive(Clone, Debug, PartialEq)]
pub enum StreamKind {
    /// Independent uniform draws from the box.
    IidUniform,
    /// A seeded permutation of the `resolution^d` lattice spanning the box,
    /// endpoints included.
    GridSweep { resolution: usize },
    /// Uniform start, then per-axis steps uniform in `[-step_scale, step_scale]`,
    /// reflected at the box faces.
    RandomWalk { step_scale: f64 },
}

impl StreamKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::IidUniform => "iid",
            Self::GridSweep { .. } => "grid",
            Self::RandomWalk { .. } => "walk",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamGenerator {
    pub kind: StreamKind,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub seed: u64,
}

impl StreamGenerator {
    pub fn new(kind: StreamKind, lower: Vec<f64>, upper: Vec<f64>, seed: u64) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                left: lower.len(),
                right: upper.len(),
            });
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u))
        {
            return Err(Error::InvalidConfig {
                key: "bounds",
                reason: "each lower bound must be finite and below its upper bound".into(),
            });
        }
        match &kind {
            StreamKind::GridSweep { resolution } if *resolution < 2 => {
                return Err(Error::InvalidConfig {
                    key: "resolution",
                    reason: "grid resolution must be at least 2".into(),
                })
            }
            StreamKind::RandomWalk { step_scale } if !(*step_scale > 0.0 && step_scale.is_finite()) => {
                return Err(Error::InvalidConfig {
                    key: "walk_step",
                    reason: "walk step scale must be positive".into(),
                })
            }
            _ => {}
        }
        Ok(Self {
            kind,
            lower,
            upper,
            seed,
        })
    }

    /// Same box on every axis.
    pub fn cube(kind: StreamKind, lower: f64, upper: f64, dim: usize, seed: u64) -> Result<Self> {
        Self::new(kind, vec![lower; dim], vec![upper; dim], seed)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn generate(&self, length: usize) -> Result<Vec<PointVector>> {
        if length == 0 {
            return Err(Error::EmptyStream);
        }
        let mut rng = RandomStream::substream(self.seed, GENERATOR_STREAM);
        let raw = match &self.kind {
            StreamKind::IidUniform => (0..length).map(|_| self.uniform_point(&mut rng)).collect(),
            StreamKind::GridSweep { resolution } => self.grid(*resolution, length, &mut rng)?,
            StreamKind::RandomWalk { step_scale } => self.walk(*step_scale, length, &mut rng),
        };
        raw.into_iter().map(PointVector::new).collect()
    }

    fn uniform_point(&self, rng: &mut RandomStream) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + (u - l) * rng.next_f64())
            .collect()
    }

    fn grid(&self, resolution: usize, length: usize, rng: &mut RandomStream) -> Result<Vec<Vec<f64>>> {
        let total = u32::try_from(self.dim())
            .ok()
            .and_then(|d| resolution.checked_pow(d))
            .filter(|&t| t >= length)
            .ok_or_else(|| Error::InvalidConfig {
                key: "steps",
                reason: format!(
                    "a grid of resolution {resolution} in {} dimension(s) has fewer than {length} points",
                    self.dim()
                ),
            })?;
        // Partial Fisher-Yates: the first `length` entries are a uniform
        // random arrangement of distinct lattice indices.
        let mut order: Vec<usize> = (0..total).collect();
        for i in 0..length {
            let j = i + rng.below((total - i) as u64) as usize;
            order.swap(i, j);
        }
        let axis = |k: usize, i: usize| -> f64 {
            if i + 1 == resolution {
                self.upper[k]
            } else {
                let t = i as f64 / (resolution - 1) as f64;
                self.lower[k] + (self.upper[k] - self.lower[k]) * t
            }
        };
        Ok(order[..length]
            .iter()
            .map(|&flat| {
                let mut rest = flat;
                (0..self.dim())
                    .map(|k| {
                        let i = rest % resolution;
                        rest /= resolution;
                        axis(k, i)
                    })
                    .collect()
            })
            .collect())
    }

    fn walk(&self, step_scale: f64, length: usize, rng: &mut RandomStream) -> Vec<Vec<f64>> {
        let mut current = self.uniform_point(rng);
        let mut out = Vec::with_capacity(length);
        out.push(current.clone());
        for _ in 1..length {
            for (k, c) in current.iter_mut().enumerate() {
                let step = (2.0 * rng.next_f64() - 1.0) * step_scale;
                *c = reflect(*c + step, self.lower[k], self.upper[k]);
            }
            out.push(current.clone());
        }
        out
    }
}

/// Folds `x` back into `[lo, hi]` by mirror reflection.
fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    let period = 2.0 * width;
    let t = (x - lo).rem_euclid(period);
    if t <= width {
        lo + t
    } else {
        hi - (t - width)
    }
}
