//! Metric spaces for inputs and outputs.
//!
//! A [`Metric`] is a named distance function. The learner uses one metric on
//! the input space and one on the output space. Shipped metrics:
//!
//! | name        | carrier                      |
//! |-------------|------------------------------|
//! | `euclidean` | [`PointVector`]              |
//! | `chebyshev` | [`PointVector`]              |
//! | `absolute`  | `f64`, or 1-D [`PointVector`] |
//! | `hamming`   | [`BitString`]                |
//! | `discrete`  | anything with `PartialEq`    |
//!
//! The vector metrics panic on dimension mismatch when called through the
//! trait; the checked free functions return [`Error::DimensionMismatch`].

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

pub trait Metric<T: ?Sized>: Send + Sync {
    fn distance(&self, a: &T, b: &T) -> f64;

    /// Stable identifier used by configuration files.
    fn name(&self) -> &'static str;
}

impl<T: ?Sized, M: Metric<T> + ?Sized> Metric<T> for &M {
    fn distance(&self, a: &T, b: &T) -> f64 {
        (**self).distance(a, b)
    }
    fn name(&self) -> &'static str {
        (**self).name()
    }
}

/// A finite-coordinate point in R^d.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVector(Vec<f64>);

impl PointVector {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        if let Some(i) = coordinates.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(coordinates))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for PointVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl fmt::Display for PointVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Fixed-length bit string for the Hamming space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

pub fn chebyshev_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count() as f64)
}

pub fn discrete_distance<T: PartialEq + ?Sized>(a: &T, b: &T) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Euclidean;

impl Metric<PointVector> for Euclidean {
    fn distance(&self, a: &PointVector, b: &PointVector) -> f64 {
        euclidean_distance(a, b).expect("euclidean: dimension mismatch")
    }
    fn name(&self) -> &'static str {
        "euclidean"
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Chebyshev;

impl Metric<PointVector> for Chebyshev {
    fn distance(&self, a: &PointVector, b: &PointVector) -> f64 {
        chebyshev_distance(a, b).expect("chebyshev: dimension mismatch")
    }
    fn name(&self) -> &'static str {
        "chebyshev"
    }
}

/// `|a - b|` on the real line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AbsoluteDifference;

impl Metric<f64> for AbsoluteDifference {
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
    fn name(&self) -> &'static str {
        "absolute"
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Hamming;

impl Metric<BitString> for Hamming {
    fn distance(&self, a: &BitString, b: &BitString) -> f64 {
        hamming_distance(a, b).expect("hamming: length mismatch")
    }
    fn name(&self) -> &'static str {
        "hamming"
    }
}

/// 0 for equal values, 1 otherwise. With `epsilon < 1` a hit means an exact
/// label match.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Discrete;

impl<T: PartialEq> Metric<T> for Discrete {
    fn distance(&self, a: &T, b: &T) -> f64 {
        discrete_distance(a, b)
    }
    fn name(&self) -> &'static str {
        "discrete"
    }
}

/// Input metric over [`PointVector`] selected by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorMetric {
    Euclidean,
    Chebyshev,
    /// `|a[0] - b[0]|` for one-dimensional points.
    Absolute,
}

impl VectorMetric {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "euclidean" => Ok(Self::Euclidean),
            "chebyshev" => Ok(Self::Chebyshev),
            "absolute" => Ok(Self::Absolute),
            other => Err(Error::UnknownName {
                kind: "metric",
                name: other.to_string(),
            }),
        }
    }
}

impl Metric<PointVector> for VectorMetric {
    #[inline]
    fn distance(&self, a: &PointVector, b: &PointVector) -> f64 {
        match self {
            Self::Euclidean => Euclidean.distance(a, b),
            Self::Chebyshev => Chebyshev.distance(a, b),
            Self::Absolute => {
                assert!(a.dim() == 1 && b.dim() == 1, "absolute: points must be 1-D");
                AbsoluteDifference.distance(&a[0], &b[0])
            }
        }
    }
    fn name(&self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Chebyshev => "chebyshev",
            Self::Absolute => "absolute",
        }
    }
}

/// Output metric over real-valued targets selected by name. Labels are
/// carried as `f64` so that regression and classification share one type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMetric {
    Absolute,
    Discrete,
}

impl ScalarMetric {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "absolute" => Ok(Self::Absolute),
            "discrete" => Ok(Self::Discrete),
            other => Err(Error::UnknownName {
                kind: "output metric",
                name: other.to_string(),
            }),
        }
    }
}

impl Metric<f64> for ScalarMetric {
    #[inline]
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        match self {
            Self::Absolute => AbsoluteDifference.distance(a, b),
            Self::Discrete => discrete_distance(a, b),
        }
    }
    fn name(&self) -> &'static str {
        match self {
            Self::Absolute => "absolute",
            Self::Discrete => "discrete",
        }
    }
}
