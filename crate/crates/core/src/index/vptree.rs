//! Dynamic vantage-point tree.
//!
//! Every stored point occupies a slot; slots are never reused until a
//! rebuild. A split node keeps its vantage slot plus, for each child, the
//! closed range of distances from the vantage point to the child's points.
//! Queries prune a child when the triangle inequality puts all of it beyond
//! the current tie threshold.
//!
//! Removal tombstones the slot. A removed vantage point still routes
//! inserts, but queries no longer evaluate its distance and descend into
//! both children unpruned, so a query never evaluates more distances than
//! there are live points. Once tombstones exceed half of the live points
//! the tree is rebuilt from the live sequence.

use super::fenwick::Fenwick;
use super::{tie_threshold, NearestSetIndex};
use crate::error::{Error, Result};
use crate::metric::Metric;

// Relative allowance for rounding in pruning bounds. Pruning only skips a
// subtree when it is beyond the threshold by more than this, so the exact
// answer is never lost to a few-ulp triangle-inequality violation.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
struct Child {
    node: usize,
    lo: f64,
    hi: f64,
}

impl Child {
    fn empty(node: usize) -> Self {
        Self {
            node,
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    fn widen(&mut self, d: f64) {
        self.lo = self.lo.min(d);
        self.hi = self.hi.max(d);
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Lower bound on the distance from the query to anything in this child.
    fn lower_bound(&self, query_to_vantage: f64) -> f64 {
        (self.lo - query_to_vantage)
            .max(query_to_vantage - self.hi)
            .max(0.0)
    }

    fn prunable(&self, query_to_vantage: f64, threshold: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        let slack = PRUNE_SLACK * (query_to_vantage + self.hi.abs() + threshold);
        self.lower_bound(query_to_vantage) > threshold + slack
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        slots: Vec<usize>,
        split_limit: usize,
    },
    Split {
        vantage: usize,
        radius: f64,
        inner: Child,
        outer: Child,
    },
}

#[derive(Clone, Debug)]
pub struct VpTree<X, M> {
    metric: M,
    leaf_capacity: usize,
    points: Vec<X>,
    live: Vec<bool>,
    ranks: Fenwick,
    nodes: Vec<Node>,
    live_count: usize,
    dead_count: usize,
    rebuilds: usize,
}

struct QueryState {
    best: f64,
    tie_tolerance: f64,
    candidates: Vec<(usize, f64)>,
    evaluations: usize,
}

impl QueryState {
    fn threshold(&self) -> f64 {
        tie_threshold(self.best, self.tie_tolerance)
    }

    fn consider(&mut self, slot: usize, d: f64) {
        self.evaluations += 1;
        if d < self.best {
            self.best = d;
        }
        if d <= self.threshold() {
            self.candidates.push((slot, d));
        }
    }
}

impl<X: Clone, M: Metric<X>> VpTree<X, M> {
    pub fn new(metric: M, leaf_capacity: usize) -> Self {
        Self {
            metric,
            leaf_capacity: leaf_capacity.max(1),
            points: Vec::new(),
            live: Vec::new(),
            ranks: Fenwick::new(),
            nodes: vec![Node::Leaf {
                slots: Vec::new(),
                split_limit: 2 * leaf_capacity.max(1),
            }],
            live_count: 0,
            dead_count: 0,
            rebuilds: 0,
        }
    }

    pub fn from_points(points: Vec<X>, metric: M, leaf_capacity: usize) -> Self {
        let mut tree = Self::new(metric, leaf_capacity);
        tree.reset_with(points);
        tree
    }

    pub fn leaf_capacity(&self) -> usize {
        self.leaf_capacity
    }

    /// Number of tombstoned slots awaiting the next rebuild.
    pub fn tombstones(&self) -> usize {
        self.dead_count
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    /// Live points in position order.
    pub fn live_points(&self) -> impl Iterator<Item = &X> {
        self.points
            .iter()
            .zip(&self.live)
            .filter(|(_, &alive)| alive)
            .map(|(p, _)| p)
    }

    fn reset_with(&mut self, points: Vec<X>) {
        let n = points.len();
        self.points = points;
        self.live = vec![true; n];
        self.ranks = Fenwick::new();
        for _ in 0..n {
            self.ranks.push(1);
        }
        self.live_count = n;
        self.dead_count = 0;
        self.nodes.clear();
        self.nodes.push(Node::Leaf {
            slots: Vec::new(),
            split_limit: 0,
        });
        let root = self.build_node((0..n).collect());
        self.nodes.swap(0, root);
        // Root was built last-in-arena; after the swap the placeholder sits at
        // `root` and nothing references it. Drop it if it is the tail.
        if root == self.nodes.len() - 1 && root != 0 {
            self.nodes.pop();
        }
    }

    fn rebuild(&mut self) {
        let live: Vec<X> = self.live_points().cloned().collect();
        self.reset_with(live);
        self.rebuilds += 1;
    }

    fn leaf(&mut self, slots: Vec<usize>) -> usize {
        let split_limit = (2 * self.leaf_capacity).max(2 * slots.len());
        self.nodes.push(Node::Leaf { slots, split_limit });
        self.nodes.len() - 1
    }

    /// Builds a subtree over `slots` and returns its arena index.
    fn build_node(&mut self, mut slots: Vec<usize>) -> usize {
        if slots.len() <= self.leaf_capacity {
            return self.leaf(slots);
        }
        let vantage = slots.swap_remove(slots.len() / 2);
        let mut scored: Vec<(usize, f64)> = slots
            .iter()
            .map(|&s| (s, self.metric.distance(&self.points[vantage], &self.points[s])))
            .collect();
        let mid = scored.len() / 2;
        scored.select_nth_unstable_by(mid, |a, b| a.1.total_cmp(&b.1));
        let mut radius = scored[mid].1;
        let max_d = scored.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        if radius >= max_d {
            // Everything at or beyond the median is at the maximum; pull the
            // radius down so the far side is nonempty.
            match scored
                .iter()
                .map(|e| e.1)
                .filter(|&d| d < max_d)
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
            {
                Some(r) => radius = r,
                None => {
                    // All points equidistant from the vantage point.
                    slots.push(vantage);
                    slots.sort_unstable();
                    return self.leaf(slots);
                }
            }
        }
        let (inner_pts, outer_pts): (Vec<_>, Vec<_>) =
            scored.into_iter().partition(|e| e.1 <= radius);
        let mut inner = Child::empty(0);
        let mut outer = Child::empty(0);
        for e in &inner_pts {
            inner.widen(e.1);
        }
        for e in &outer_pts {
            outer.widen(e.1);
        }
        inner.node = self.build_node(inner_pts.into_iter().map(|e| e.0).collect());
        outer.node = self.build_node(outer_pts.into_iter().map(|e| e.0).collect());
        self.nodes.push(Node::Split {
            vantage,
            radius,
            inner,
            outer,
        });
        self.nodes.len() - 1
    }

    fn insert_slot(&mut self, slot: usize) {
        let mut at = 0;
        while let Node::Split { vantage, radius, .. } = &self.nodes[at] {
            let d = self.metric.distance(&self.points[*vantage], &self.points[slot]);
            let go_inner = d <= *radius;
            let Node::Split { inner, outer, .. } = &mut self.nodes[at] else {
                unreachable!()
            };
            let child = if go_inner { inner } else { outer };
            child.widen(d);
            at = child.node;
        }
        let Node::Leaf { slots, split_limit } = &mut self.nodes[at] else {
            unreachable!()
        };
        slots.push(slot);
        if slots.len() > *split_limit {
            let slots = std::mem::take(slots);
            let built = self.build_node(slots);
            // Move the new subtree root into the leaf's arena cell.
            self.nodes.swap(at, built);
            if built == self.nodes.len() - 1 {
                self.nodes.pop();
            } else {
                self.nodes[built] = Node::Leaf {
                    slots: Vec::new(),
                    split_limit: usize::MAX,
                };
            }
        }
    }

    fn search(&self, at: usize, query: &X, state: &mut QueryState) {
        match &self.nodes[at] {
            Node::Leaf { slots, .. } => {
                for &s in slots {
                    if self.live[s] {
                        let d = self.metric.distance(&self.points[s], query);
                        state.consider(s, d);
                    }
                }
            }
            Node::Split {
                vantage,
                radius,
                inner,
                outer,
            } => {
                if !self.live[*vantage] {
                    self.search(inner.node, query, state);
                    self.search(outer.node, query, state);
                    return;
                }
                let dv = self.metric.distance(&self.points[*vantage], query);
                state.consider(*vantage, dv);
                let (first, second) = if dv <= *radius {
                    (inner, outer)
                } else {
                    (outer, inner)
                };
                if !first.prunable(dv, state.threshold()) {
                    self.search(first.node, query, state);
                }
                if !second.prunable(dv, state.threshold()) {
                    self.search(second.node, query, state);
                }
            }
        }
    }

    /// Nearest set plus the number of distance evaluations spent.
    pub fn nearest_set_counted(&self, query: &X, tie_tolerance: f64) -> Result<(Vec<usize>, usize)> {
        if self.live_count == 0 {
            return Err(Error::EmptyModel);
        }
        let mut state = QueryState {
            best: f64::INFINITY,
            tie_tolerance,
            candidates: Vec::new(),
            evaluations: 0,
        };
        self.search(0, query, &mut state);
        let threshold = state.threshold();
        let mut slots: Vec<usize> = state
            .candidates
            .iter()
            .filter(|(_, d)| *d <= threshold)
            .map(|(s, _)| *s)
            .collect();
        slots.sort_unstable();
        let positions = slots.into_iter().map(|s| self.ranks.prefix(s)).collect();
        Ok((positions, state.evaluations))
    }
}

impl<X: Clone, M: Metric<X>> NearestSetIndex<X> for VpTree<X, M> {
    fn len(&self) -> usize {
        self.live_count
    }

    fn insert(&mut self, point: X) {
        let slot = self.points.len();
        self.points.push(point);
        self.live.push(true);
        self.ranks.push(1);
        self.live_count += 1;
        self.insert_slot(slot);
    }

    fn remove(&mut self, position: usize) -> Result<()> {
        if position >= self.live_count {
            return Err(Error::PositionOutOfRange {
                position,
                len: self.live_count,
            });
        }
        let slot = self.ranks.select(position);
        debug_assert!(self.live[slot]);
        self.live[slot] = false;
        self.ranks.decrement(slot);
        self.live_count -= 1;
        self.dead_count += 1;
        if 2 * self.dead_count > self.live_count {
            self.rebuild();
        }
        Ok(())
    }

    fn nearest_set(&self, query: &X, tie_tolerance: f64) -> Result<Vec<usize>> {
        self.nearest_set_counted(query, tie_tolerance).map(|(p, _)| p)
    }
}
