use super::{tie_threshold, NearestSetIndex};
use crate::error::{Error, Result};
use crate::metric::Metric;

/// Exact nearest set by full scan. This is the reference answer every other
/// backend is checked against.
pub fn linear_nearest_set<'a, X: 'a, M, I>(
    points: I,
    query: &X,
    metric: &M,
    tie_tolerance: f64,
) -> Result<Vec<usize>>
where
    M: Metric<X> + ?Sized,
    I: IntoIterator<Item = &'a X>,
{
    let distances: Vec<f64> = points
        .into_iter()
        .map(|p| metric.distance(p, query))
        .collect();
    if distances.is_empty() {
        return Err(Error::EmptyModel);
    }
    let d_min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = tie_threshold(d_min, tie_tolerance);
    Ok(distances
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= threshold)
        .map(|(i, _)| i)
        .collect())
}

#[derive(Clone, Debug)]
pub struct LinearScan<X, M> {
    points: Vec<X>,
    metric: M,
}

impl<X, M: Metric<X>> LinearScan<X, M> {
    pub fn new(metric: M) -> Self {
        Self {
            points: Vec::new(),
            metric,
        }
    }

    pub fn from_points(points: Vec<X>, metric: M) -> Self {
        Self { points, metric }
    }

    pub fn points(&self) -> &[X] {
        &self.points
    }
}

impl<X, M: Metric<X>> NearestSetIndex<X> for LinearScan<X, M> {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn insert(&mut self, point: X) {
        self.points.push(point);
    }

    fn remove(&mut self, position: usize) -> Result<()> {
        if position >= self.points.len() {
            return Err(Error::PositionOutOfRange {
                position,
                len: self.points.len(),
            });
        }
        self.points.remove(position);
        Ok(())
    }

    fn nearest_set(&self, query: &X, tie_tolerance: f64) -> Result<Vec<usize>> {
        linear_nearest_set(&self.points, query, &self.metric, tie_tolerance)
    }
}
