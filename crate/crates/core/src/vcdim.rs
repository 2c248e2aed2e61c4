//! Range space of metric balls at desk scale: traces, shattering, and an
//! empirical VC-dimension search.
//!
//! A range is `R(S, r) = {p : dist(p, S) >= r}` for a center set `S` of at
//! most `k_fold` centers and a threshold `r >= 0`. For a fixed `S` the ranges
//! are nested, so every range is one of the `n + 1` suffixes of the points
//! sorted by distance to `S`. All distinct ranges over the whole point set are
//! materialized once as 64-bit masks; the trace on a subset `Y` is a mask
//! intersection.

use std::collections::BTreeSet;

use rand::seq::index::sample as sample_indices;
use serde::Serialize;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{invalid, CoresetError, Result};
use crate::metrics::{euclidean, MetricBackend, PointSet};
use crate::rng::substream_with;

/// Largest point set the toolkit accepts.
pub const MAX_POINTS: usize = 64;

/// Scale of the far-field grid copy relative to the padded bounding box.
const FAR_SCALE: f64 = 1e3;

/// Largest subset whose traces are enumerated.
pub const MAX_SUBSET: usize = 20;

#[derive(Debug, Clone)]
pub struct BallRangeSpace {
    n: usize,
    k_fold: usize,
    center_count: usize,
    ranges: Vec<u64>,
}

impl BallRangeSpace {
    /// Ranges with centers drawn from the point set.
    pub fn new(ps: &PointSet, k_fold: usize) -> Result<Self> {
        Self::with_extra_centers(ps, k_fold, &[])
    }

    /// Adds a `resolution^dim` grid of synthetic centers over the bounding box
    /// of a Euclidean point set, padded by half its extent on every side, plus
    /// a far-field copy of the grid scaled about the box center. The far
    /// copies reach the unbounded cells where a single hull vertex is the
    /// farthest point.
    pub fn with_grid_centers(ps: &PointSet, k_fold: usize, resolution: usize) -> Result<Self> {
        let MetricBackend::Euclidean(space) = ps.backend() else {
            return Err(invalid("grid", "synthetic centers need a Euclidean backend"));
        };
        if resolution == 0 {
            return Self::new(ps, k_fold);
        }
        let dim = space.dim();
        let total = (resolution as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > 1_000_000 {
            return Err(CoresetError::TooLarge(format!("grid of {total} centers")));
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in 0..space.len() {
            for (d, &x) in space.point(p).iter().enumerate() {
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
        }
        let axes: Vec<Vec<f64>> = (0..dim)
            .map(|d| {
                let extent = (hi[d] - lo[d]).max(1.0);
                let (a, b) = (lo[d] - 0.5 * extent, hi[d] + 0.5 * extent);
                (0..resolution)
                    .map(|i| {
                        if resolution == 1 {
                            0.5 * (a + b)
                        } else {
                            a + (b - a) * i as f64 / (resolution - 1) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let mut centers = Vec::with_capacity(total as usize);
        let mut idx = vec![0usize; dim];
        loop {
            centers.push(idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect::<Vec<f64>>());
            let mut d = 0;
            while d < dim {
                idx[d] += 1;
                if idx[d] < resolution {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dim {
                break;
            }
        }
        let mid: Vec<f64> = (0..dim).map(|d| 0.5 * (lo[d] + hi[d])).collect();
        let far: Vec<Vec<f64>> = centers
            .iter()
            .filter(|c| c.iter().zip(&mid).any(|(x, m)| x != m))
            .map(|c| {
                c.iter()
                    .zip(&mid)
                    .map(|(x, m)| m + FAR_SCALE * (x - m))
                    .collect()
            })
            .collect();
        centers.extend(far);
        Self::with_extra_centers(ps, k_fold, &centers)
    }

    /// Ranges with centers from the point set plus explicit Euclidean centers.
    pub fn with_extra_centers(ps: &PointSet, k_fold: usize, extra: &[Vec<f64>]) -> Result<Self> {
        let n = ps.len();
        if n > MAX_POINTS {
            return Err(CoresetError::TooLarge(format!(
                "{n} points, the range toolkit handles at most {MAX_POINTS}"
            )));
        }
        if k_fold == 0 {
            return Err(invalid("k_fold", "must be at least 1"));
        }
        // Distance rows: one per candidate center.
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|c| (0..n).map(|p| ps.distance(p, c)).collect())
            .collect();
        if !extra.is_empty() {
            let MetricBackend::Euclidean(space) = ps.backend() else {
                return Err(invalid("centers", "synthetic centers need a Euclidean backend"));
            };
            for c in extra {
                if c.len() != space.dim() {
                    return Err(CoresetError::DimensionMismatch {
                        expected: space.dim(),
                        found: c.len(),
                    });
                }
                rows.push((0..n).map(|p| euclidean(space.point(p), c)).collect());
            }
        }
        let center_count = rows.len();
        if binomial(center_count, k_fold.min(center_count)) > 50_000_000 {
            return Err(CoresetError::TooLarge(format!(
                "{center_count} centers with k_fold = {k_fold}"
            )));
        }
        let mut ranges = BTreeSet::new();
        ranges.insert(0u64);
        let mut dist = vec![0.0; n];
        let mut order: Vec<usize> = (0..n).collect();
        for size in 1..=k_fold.min(center_count) {
            for_each_combination(center_count, size, |set| {
                for (p, d) in dist.iter_mut().enumerate() {
                    *d = set.iter().map(|&c| rows[c][p]).fold(f64::INFINITY, f64::min);
                }
                order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
                // Suffixes {p : dist >= v}, cut only between distinct values.
                let mut mask = 0u64;
                for (i, &p) in order.iter().enumerate() {
                    mask |= 1 << p;
                    if i + 1 == n || dist[order[i + 1]] < dist[p] {
                        ranges.insert(mask);
                    }
                }
                true
            });
        }
        Ok(Self {
            n,
            k_fold,
            center_count,
            ranges: ranges.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k_fold(&self) -> usize {
        self.k_fold
    }

    pub fn center_count(&self) -> usize {
        self.center_count
    }

    /// Distinct ranges on the whole point set, as point masks.
    pub fn ranges(&self) -> &[u64] {
        &self.ranges
    }

    fn subset_mask(&self, subset: &[usize]) -> Result<u64> {
        if subset.len() > MAX_SUBSET {
            return Err(CoresetError::TooLarge(format!(
                "subset of {} points, at most {MAX_SUBSET}",
                subset.len()
            )));
        }
        let mut mask = 0u64;
        for &p in subset {
            if p >= self.n {
                return Err(CoresetError::IndexOutOfRange {
                    index: p,
                    len: self.n,
                });
            }
            mask |= 1 << p;
        }
        Ok(mask)
    }

    fn trace_masks(&self, mask: u64) -> BTreeSet<u64> {
        self.ranges.iter().map(|r| r & mask).collect()
    }

    /// Distinct traces `R ∩ Y`, bit `i` standing for `subset[i]`.
    pub fn enumerate_ranges(&self, subset: &[usize]) -> Result<BTreeSet<u32>> {
        let mask = self.subset_mask(subset)?;
        Ok(self
            .trace_masks(mask)
            .into_iter()
            .map(|t| {
                subset
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| t & (1 << p) != 0)
                    .fold(0u32, |acc, (i, _)| acc | (1 << i))
            })
            .collect())
    }

    /// Whether every subset of `subset` is a trace.
    pub fn is_shattered(&self, subset: &[usize]) -> Result<bool> {
        let mask = self.subset_mask(subset)?;
        if mask.count_ones() as usize != subset.len() {
            // Repeated index.
            return Ok(false);
        }
        Ok(self.shatters_mask(mask))
    }

    fn shatters_mask(&self, mask: u64) -> bool {
        let d = mask.count_ones();
        if (self.ranges.len() as u128) < (1u128 << d) {
            return false;
        }
        self.trace_masks(mask).len() as u128 == 1u128 << d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCount {
    pub size: usize,
    /// Subsets examined at this size.
    pub examined: u64,
    /// Most distinct traces seen on one examined subset.
    pub max_traces: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VcEstimate {
    pub d_hat: usize,
    /// Every size searched was searched exhaustively.
    pub exhaustive: bool,
    /// The search stopped because a size had no shattered subset, as opposed
    /// to reaching `max_d`.
    pub bounded: bool,
    pub witness_subset: Vec<usize>,
    pub trace_counts_by_size: Vec<TraceCount>,
}

/// Published VC-dimension bound for the ball range space of a backend, with
/// all hidden constants set to 1: `d + 1` for Euclidean balls in `d`
/// dimensions and `d l log2(l m)` for discrete Fréchet balls around curves of
/// at most `l` vertices over inputs of at most `m` vertices (both the longest
/// input curve here). `None` where no closed form applies.
pub fn known_vc_bound(backend: &MetricBackend) -> Option<usize> {
    match backend {
        MetricBackend::Euclidean(space) => Some(space.dim() + 1),
        MetricBackend::Frechet(curves) => {
            let longest = (0..curves.len()).map(|i| curves.curve(i).len()).max()?;
            let l = longest as f64;
            let bound = curves.dim() as f64 * l * (l * l).log2().max(1.0);
            Some(bound.ceil() as usize)
        }
        MetricBackend::Matrix(_) | MetricBackend::Graph(_) | MetricBackend::Hausdorff(_) => None,
    }
}

/// Largest `d <= max_d` with a shattered `d`-subset found. Sizes with at most
/// `budget` subsets are searched exhaustively in lexicographic order, larger
/// ones by `budget` seeded random subsets.
pub fn estimate_vc(rs: &BallRangeSpace, max_d: usize, budget: u64, seed: u64) -> VcEstimate {
    let n = rs.len();
    let mut est = VcEstimate {
        d_hat: 0,
        exhaustive: true,
        bounded: false,
        witness_subset: Vec::new(),
        trace_counts_by_size: Vec::new(),
    };
    for d in 1..=max_d.min(n).min(MAX_SUBSET) {
        let total = binomial(n, d);
        let exhaustive = total <= u128::from(budget);
        let mut count = TraceCount {
            size: d,
            examined: 0,
            max_traces: 0,
        };
        let mut found: Option<Vec<usize>> = None;
        let mut visit = |subset: &[usize]| -> bool {
            let mask = subset.iter().fold(0u64, |m, &p| m | (1 << p));
            count.examined += 1;
            let traces = rs.trace_masks(mask).len();
            count.max_traces = count.max_traces.max(traces);
            if traces as u128 == 1u128 << d {
                found = Some(subset.to_vec());
                return false;
            }
            true
        };
        if exhaustive {
            for_each_combination(n, d, &mut visit);
        } else {
            for i in 0..budget {
                let mut rng = substream_with(seed, "vc-subset", &[d as u64, i]);
                let mut subset = sample_indices(&mut rng, n, d).into_vec();
                subset.sort_unstable();
                if !visit(&subset) {
                    break;
                }
            }
        }
        est.trace_counts_by_size.push(count);
        est.exhaustive &= exhaustive;
        match found {
            Some(w) => {
                est.d_hat = d;
                est.witness_subset = w;
            }
            None => {
                est.bounded = true;
                break;
            }
        }
    }
    est
}
