//! Exact nearest-set search over a dynamic exemplar sequence.
//!
//! Positions are indices into the live sequence in insertion order; removing
//! position `p` shifts every later position down by one, exactly like
//! `Vec::remove`. Both backends evaluate `metric.distance(stored, query)` in
//! that operand order and share [`tie_threshold`], so their answers agree bit
//! for bit.

mod fenwick;
mod linear;
mod vptree;

pub use linear::{linear_nearest_set, LinearScan};
pub use vptree::VpTree;

use crate::error::{Error, Result};
use crate::metric::Metric;

pub const DEFAULT_LEAF_CAPACITY: usize = 16;

/// Largest distance still counted as tied with `d_min`.
#[inline]
pub fn tie_threshold(d_min: f64, tie_tolerance: f64) -> f64 {
    d_min * (1.0 + tie_tolerance)
}

pub trait NearestSetIndex<X> {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, point: X);

    fn remove(&mut self, position: usize) -> Result<()>;

    /// Ascending positions whose distance to `query` is within
    /// `tie_threshold(d_min, tie_tolerance)`.
    fn nearest_set(&self, query: &X, tie_tolerance: f64) -> Result<Vec<usize>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    LinearScan,
    VpTree { leaf_capacity: usize },
}

impl IndexKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "linear" => Ok(Self::LinearScan),
            "vptree" => Ok(Self::VpTree {
                leaf_capacity: DEFAULT_LEAF_CAPACITY,
            }),
            other => Err(Error::UnknownName {
                kind: "index",
                name: other.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearScan => "linear",
            Self::VpTree { .. } => "vptree",
        }
    }
}

impl Default for IndexKind {
    fn default() -> Self {
        Self::VpTree {
            leaf_capacity: DEFAULT_LEAF_CAPACITY,
        }
    }
}

/// Backend chosen at runtime.
#[derive(Clone, Debug)]
pub enum NearestIndex<X, M> {
    Linear(LinearScan<X, M>),
    VpTree(VpTree<X, M>),
}

impl<X: Clone, M: Metric<X>> NearestIndex<X, M> {
    pub fn new(kind: IndexKind, metric: M) -> Self {
        match kind {
            IndexKind::LinearScan => Self::Linear(LinearScan::new(metric)),
            IndexKind::VpTree { leaf_capacity } => {
                Self::VpTree(VpTree::new(metric, leaf_capacity))
            }
        }
    }

    /// Index over `points`, which must be nonempty.
    pub fn build(points: Vec<X>, metric: M, kind: IndexKind) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyModel);
        }
        Ok(match kind {
            IndexKind::LinearScan => Self::Linear(LinearScan::from_points(points, metric)),
            IndexKind::VpTree { leaf_capacity } => {
                Self::VpTree(VpTree::from_points(points, metric, leaf_capacity))
            }
        })
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            Self::Linear(_) => IndexKind::LinearScan,
            Self::VpTree(t) => IndexKind::VpTree {
                leaf_capacity: t.leaf_capacity(),
            },
        }
    }
}

impl<X: Clone, M: Metric<X>> NearestSetIndex<X> for NearestIndex<X, M> {
    fn len(&self) -> usize {
        match self {
            Self::Linear(i) => i.len(),
            Self::VpTree(i) => i.len(),
        }
    }

    fn insert(&mut self, point: X) {
        match self {
            Self::Linear(i) => i.insert(point),
            Self::VpTree(i) => i.insert(point),
        }
    }

    fn remove(&mut self, position: usize) -> Result<()> {
        match self {
            Self::Linear(i) => i.remove(position),
            Self::VpTree(i) => i.remove(position),
        }
    }

    fn nearest_set(&self, query: &X, tie_tolerance: f64) -> Result<Vec<usize>> {
        match self {
            Self::Linear(i) => i.nearest_set(query, tie_tolerance),
            Self::VpTree(i) => i.nearest_set(query, tie_tolerance),
        }
    }
}
