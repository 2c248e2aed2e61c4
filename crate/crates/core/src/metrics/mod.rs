//! Metric backends, weighted point sets and clustering cost evaluation.

mod curves;
mod euclidean;
mod graph;
mod matrix;

pub use curves::{
    directed_hausdorff, discrete_frechet, hausdorff, Curve, CurveCollection, CurveDistance,
};
pub use euclidean::{euclidean, EuclideanSpace};
pub use graph::GraphMetric;
pub use matrix::DistanceMatrix;

use crate::error::{CoresetError, Result};
use crate::sum::CompensatedSum;

/// A finite metric space whose points are addressed by index.
#[derive(Debug, Clone)]
pub enum MetricBackend {
    Euclidean(EuclideanSpace),
    Matrix(DistanceMatrix),
    Graph(GraphMetric),
    Frechet(CurveCollection),
    Hausdorff(CurveCollection),
}

impl MetricBackend {
    pub fn len(&self) -> usize {
        match self {
            MetricBackend::Euclidean(s) => s.len(),
            MetricBackend::Matrix(m) => m.len(),
            MetricBackend::Graph(g) => g.len(),
            MetricBackend::Frechet(c) | MetricBackend::Hausdorff(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MetricBackend::Euclidean(_) => "euclidean",
            MetricBackend::Matrix(_) => "matrix",
            MetricBackend::Graph(_) => "graph",
            MetricBackend::Frechet(_) => "frechet",
            MetricBackend::Hausdorff(_) => "hausdorff",
        }
    }

    /// Checked distance between points `p` and `q`.
    pub fn dist(&self, p: usize, q: usize) -> Result<f64> {
        let n = self.len();
        for index in [p, q] {
            if index >= n {
                return Err(CoresetError::IndexOutOfRange { index, len: n });
            }
        }
        Ok(self.distance(p, q))
    }

    /// Distance without the range check; panics on an invalid index.
    #[inline]
    pub fn distance(&self, p: usize, q: usize) -> f64 {
        match self {
            MetricBackend::Euclidean(s) => s.distance(p, q),
            MetricBackend::Matrix(m) => m.distance(p, q),
            MetricBackend::Graph(g) => g.distance(p, q),
            MetricBackend::Frechet(c) => c.distance(CurveDistance::DiscreteFrechet, p, q),
            MetricBackend::Hausdorff(c) => c.distance(CurveDistance::Hausdorff, p, q),
        }
    }

    /// Warms any lazily computed state so later parallel reads never block.
    pub fn prepare(&self) {
        if let MetricBackend::Graph(g) = self {
            g.precompute_all();
        }
    }
}

/// Indexed points with nonnegative weights over a metric backend.
#[derive(Debug, Clone)]
pub struct PointSet {
    backend: MetricBackend,
    weights: Vec<f64>,
    total_weight: f64,
}

impl PointSet {
    /// Unit weights.
    pub fn new(backend: MetricBackend) -> Result<Self> {
        let n = backend.len();
        Self::with_weights(backend, vec![1.0; n])
    }

    pub fn with_weights(backend: MetricBackend, weights: Vec<f64>) -> Result<Self> {
        if backend.is_empty() {
            return Err(CoresetError::Empty("point set"));
        }
        if weights.len() != backend.len() {
            return Err(CoresetError::DimensionMismatch {
                expected: backend.len(),
                found: weights.len(),
            });
        }
        if let Some((index, &weight)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(CoresetError::InvalidWeight { index, weight });
        }
        let total_weight = crate::sum::compensated_sum(weights.iter().copied());
        if total_weight <= 0.0 {
            return Err(CoresetError::ZeroTotalWeight);
        }
        Ok(Self {
            backend,
            weights,
            total_weight,
        })
    }

    pub fn euclidean_line(xs: &[f64]) -> Result<Self> {
        Self::new(MetricBackend::Euclidean(EuclideanSpace::from_line(xs)?))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn backend(&self) -> &MetricBackend {
        &self.backend
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, p: usize) -> f64 {
        self.weights[p]
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    #[inline]
    pub fn distance(&self, p: usize, q: usize) -> f64 {
        self.backend.distance(p, q)
    }

    pub fn dist(&self, p: usize, q: usize) -> Result<f64> {
        self.backend.dist(p, q)
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(CoresetError::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `min_{c in centers} dist(p, c)^z` with no index checks.
    #[inline]
    pub fn cost_to(&self, p: usize, centers: &[usize], z: u32) -> f64 {
        let d = centers
            .iter()
            .map(|&c| self.distance(p, c))
            .fold(f64::INFINITY, f64::min);
        power(d, z)
    }
}

/// `d^z` for a positive integer exponent.
#[inline]
pub fn power(d: f64, z: u32) -> f64 {
    match z {
        1 => d,
        2 => d * d,
        _ => d.powi(z as i32),
    }
}

/// A nonempty set of distinct center indices drawn from the point set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateSolution {
    centers: Vec<usize>,
}

impl CandidateSolution {
    /// Validates the centers against a point count. Centers are stored sorted.
    pub fn new(mut centers: Vec<usize>, n: usize) -> Result<Self> {
        if centers.is_empty() {
            return Err(CoresetError::InvalidSolution("no centers".into()));
        }
        centers.sort_unstable();
        if let Some(&bad) = centers.iter().find(|&&c| c >= n) {
            return Err(CoresetError::IndexOutOfRange { index: bad, len: n });
        }
        if centers.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoresetError::InvalidSolution("duplicate center".into()));
        }
        Ok(Self { centers })
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.centers.binary_search(&p).is_ok()
    }
}

fn check_exponent(z: u32) -> Result<()> {
    if z == 0 {
        return Err(crate::error::invalid("z", "must be a positive integer"));
    }
    Ok(())
}

fn check_solution(ps: &PointSet, solution: &CandidateSolution) -> Result<()> {
    solution
        .centers()
        .iter()
        .try_for_each(|&c| ps.check_index(c))
}

/// Cost of point `p` in `solution`: the smallest z-th power distance to a center.
pub fn point_cost(ps: &PointSet, p: usize, solution: &CandidateSolution, z: u32) -> Result<f64> {
    check_exponent(z)?;
    ps.check_index(p)?;
    check_solution(ps, solution)?;
    Ok(ps.cost_to(p, solution.centers(), z))
}

/// Weighted cost `sum_p w_p cost(p, S)` over the whole point set.
pub fn set_cost(ps: &PointSet, solution: &CandidateSolution, z: u32) -> Result<f64> {
    check_exponent(z)?;
    check_solution(ps, solution)?;
    Ok(weighted_cost(ps, 0..ps.len(), solution.centers(), z))
}

/// Weighted cost restricted to the listed point indices.
pub fn set_cost_masked(
    ps: &PointSet,
    indices: &[usize],
    solution: &CandidateSolution,
    z: u32,
) -> Result<f64> {
    check_exponent(z)?;
    check_solution(ps, solution)?;
    indices.iter().try_for_each(|&p| ps.check_index(p))?;
    Ok(weighted_cost(ps, indices.iter().copied(), solution.centers(), z))
}

pub(crate) fn weighted_cost(
    ps: &PointSet,
    indices: impl Iterator<Item = usize>,
    centers: &[usize],
    z: u32,
) -> f64 {
    let mut acc = CompensatedSum::new();
    for p in indices {
        let w = ps.weight(p);
        if w > 0.0 {
            acc.add(w * ps.cost_to(p, centers, z));
        }
    }
    acc.value()
}
