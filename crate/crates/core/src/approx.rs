//! Constant-factor approximate solutions: D^z seeding, single-swap local
//! search, and an exhaustive optimum for small instances.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{invalid, CoresetError, Result};
use crate::metrics::{power, PointSet};
use crate::rng::substream;
use crate::sum::compensated_sum;

/// Largest `C(n, k)` the exhaustive solver accepts.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

/// Minimum relative improvement a swap must achieve to be applied.
pub const SWAP_IMPROVEMENT: f64 = 1e-3;

/// A k-center solution together with its induced clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSolution {
    /// Center point indices, sorted ascending. Cluster `i` is served by `centers[i]`.
    pub centers: Vec<usize>,
    pub z: u32,
    /// Cluster id of every point.
    pub assignment: Vec<usize>,
    /// Unweighted `cost(p, A)` of every point.
    pub point_cost: Vec<f64>,
    /// Weighted cost of every cluster.
    pub cluster_cost: Vec<f64>,
    /// Total weight of every cluster.
    pub cluster_size: Vec<f64>,
    /// Average cost `cluster_cost / cluster_size`, zero for weightless clusters.
    pub delta: Vec<f64>,
}

impl ApproxSolution {
    /// Assigns every point to its nearest center, ties going to the lowest
    /// cluster index.
    pub fn from_centers(ps: &PointSet, centers: &[usize], z: u32) -> Result<Self> {
        if z == 0 {
            return Err(invalid("z", "must be a positive integer"));
        }
        let mut centers = centers.to_vec();
        centers.sort_unstable();
        if centers.is_empty() {
            return Err(CoresetError::InvalidSolution("no centers".into()));
        }
        if centers.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoresetError::InvalidSolution("duplicate center".into()));
        }
        for &c in &centers {
            ps.check_index(c)?;
        }
        let k = centers.len();
        let (assignment, point_cost): (Vec<usize>, Vec<f64>) = (0..ps.len())
            .into_par_iter()
            .map(|p| {
                let mut best = (0, f64::INFINITY);
                for (i, &c) in centers.iter().enumerate() {
                    let d = ps.distance(p, c);
                    if d < best.1 {
                        best = (i, d);
                    }
                }
                (best.0, power(best.1, z))
            })
            .unzip();
        let mut cluster_cost = Vec::with_capacity(k);
        let mut cluster_size = Vec::with_capacity(k);
        for i in 0..k {
            let members = || (0..ps.len()).filter(|&p| assignment[p] == i);
            cluster_cost.push(compensated_sum(
                members().map(|p| ps.weight(p) * point_cost[p]),
            ));
            cluster_size.push(compensated_sum(members().map(|p| ps.weight(p))));
        }
        let delta = cluster_cost
            .iter()
            .zip(&cluster_size)
            .map(|(&c, &s)| if s > 0.0 { c / s } else { 0.0 })
            .collect();
        Ok(Self {
            centers,
            z,
            assignment,
            point_cost,
            cluster_cost,
            cluster_size,
            delta,
        })
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn total_cost(&self) -> f64 {
        compensated_sum(self.cluster_cost.iter().copied())
    }

    /// Clusters whose every point sits on the center (`Δ = 0`).
    pub fn is_degenerate(&self, cluster: usize) -> bool {
        self.delta[cluster] == 0.0
    }

    pub fn center_of(&self, p: usize) -> usize {
        self.centers[self.assignment[p]]
    }
}

fn check_k(ps: &PointSet, k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if k > ps.len() {
        return Err(invalid(
            "k",
            format!("k = {k} exceeds the number of points {}", ps.len()),
        ));
    }
    Ok(())
}

/// D^z seeding with an explicit RNG.
pub fn dz_seed_with<R: Rng + ?Sized>(
    ps: &PointSet,
    k: usize,
    z: u32,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_k(ps, k)?;
    if z == 0 {
        return Err(invalid("z", "must be a positive integer"));
    }
    let n = ps.len();
    let first = WeightedIndex::new(ps.weights())
        .map_err(|_| CoresetError::ZeroTotalWeight)?
        .sample(rng);
    let mut centers = vec![first];
    let mut is_center = vec![false; n];
    is_center[first] = true;
    let mut nearest: Vec<f64> = (0..n).map(|p| ps.distance(p, first)).collect();
    while centers.len() < k {
        let scores: Vec<f64> = (0..n)
            .map(|p| {
                if is_center[p] {
                    0.0
                } else {
                    ps.weight(p) * power(nearest[p], z)
                }
            })
            .collect();
        let next = match WeightedIndex::new(&scores) {
            Ok(dist) => dist.sample(rng),
            // Every remaining point coincides with a center or has no weight.
            Err(_) => {
                let free: Vec<usize> = (0..n).filter(|&p| !is_center[p]).collect();
                let free_weights: Vec<f64> = free.iter().map(|&p| ps.weight(p)).collect();
                match WeightedIndex::new(&free_weights) {
                    Ok(dist) => free[dist.sample(rng)],
                    Err(_) => free[rng.random_range(0..free.len())],
                }
            }
        };
        is_center[next] = true;
        centers.push(next);
        for (p, d) in nearest.iter_mut().enumerate() {
            *d = d.min(ps.distance(p, next));
        }
    }
    Ok(centers)
}

/// D^z seeding: the first center is drawn proportionally to weight, each
/// further one proportionally to `w_p * cost(p, chosen)`.
pub fn dz_seed(ps: &PointSet, k: usize, z: u32, seed: u64) -> Result<Vec<usize>> {
    dz_seed_with(ps, k, z, &mut substream(seed, "dz-seed"))
}

/// Outcome of [`local_search`].
#[derive(Debug, Clone)]
pub struct LocalSearch {
    pub solution: ApproxSolution,
    pub swaps: usize,
    /// Total cost before the first swap and after each applied swap.
    pub cost_trace: Vec<f64>,
}

struct SwapState {
    slot: Vec<usize>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

fn swap_state(ps: &PointSet, centers: &[usize], z: u32) -> SwapState {
    let n = ps.len();
    let mut state = SwapState {
        slot: vec![0; n],
        d1: vec![f64::INFINITY; n],
        d2: vec![f64::INFINITY; n],
    };
    for p in 0..n {
        for (i, &c) in centers.iter().enumerate() {
            let d = power(ps.distance(p, c), z);
            if d < state.d1[p] {
                state.d2[p] = state.d1[p];
                state.d1[p] = d;
                state.slot[p] = i;
            } else if d < state.d2[p] {
                state.d2[p] = d;
            }
        }
    }
    state
}

/// Best-improvement single-swap local search.
///
/// Each round evaluates every (center out, non-center in) pair and applies the
/// best one if it lowers the cost by at least [`SWAP_IMPROVEMENT`] relative.
pub fn local_search(
    ps: &PointSet,
    centers: &[usize],
    z: u32,
    max_swaps: usize,
) -> Result<LocalSearch> {
    let initial = ApproxSolution::from_centers(ps, centers, z)?;
    let mut centers = initial.centers.clone();
    let k = centers.len();
    let n = ps.len();
    let mut current = initial.total_cost();
    let mut cost_trace = vec![current];
    let mut swaps = 0;
    ps.backend().prepare();

    while swaps < max_swaps && current > 0.0 && k < n {
        let state = swap_state(ps, &centers, z);
        let is_center = {
            let mut v = vec![false; n];
            centers.iter().for_each(|&c| v[c] = true);
            v
        };
        // (delta, candidate, slot); min over a total order is reduction-order independent.
        let best = (0..n)
            .into_par_iter()
            .filter(|&q| !is_center[q])
            .map(|q| {
                let mut common = 0.0;
                let mut per_slot = vec![0.0; k];
                for p in 0..n {
                    let w = ps.weight(p);
                    if w == 0.0 {
                        continue;
                    }
                    let dq = power(ps.distance(p, q), z);
                    let kept = dq.min(state.d1[p]);
                    common += w * (kept - state.d1[p]);
                    per_slot[state.slot[p]] += w * (dq.min(state.d2[p]) - kept);
                }
                let (slot, extra) = per_slot
                    .iter()
                    .copied()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                    .expect("k >= 1");
                (common + extra, q, slot)
            })
            .min_by(|a, b| {
                a.0.total_cmp(&b.0)
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
        let Some((delta, q, slot)) = best else { break };
        if !(delta < 0.0 && -delta >= SWAP_IMPROVEMENT * current) {
            break;
        }
        centers[slot] = q;
        let recomputed = ApproxSolution::from_centers(ps, &centers, z)?;
        // Guard against the incremental delta disagreeing with the exact cost.
        if recomputed.total_cost() >= current {
            break;
        }
        centers = recomputed.centers.clone();
        current = recomputed.total_cost();
        cost_trace.push(current);
        swaps += 1;
    }
    Ok(LocalSearch {
        solution: ApproxSolution::from_centers(ps, &centers, z)?,
        swaps,
        cost_trace,
    })
}

/// Local search returning only the refined solution.
pub fn local_search_refine(
    ps: &PointSet,
    centers: &[usize],
    z: u32,
    max_swaps: usize,
) -> Result<ApproxSolution> {
    local_search(ps, centers, z, max_swaps).map(|ls| ls.solution)
}

/// Default swap budget `50 k`.
pub fn default_max_swaps(k: usize) -> usize {
    50 * k
}

/// D^z seeding followed by local search with the default budget.
pub fn approximate(ps: &PointSet, k: usize, z: u32, seed: u64) -> Result<ApproxSolution> {
    let seeds = dz_seed(ps, k, z, seed)?;
    local_search_refine(ps, &seeds, z, default_max_swaps(k))
}

/// The best k-subset of the points as centers, by exhaustive enumeration.
pub fn exact_kmedian(ps: &PointSet, k: usize, z: u32) -> Result<ApproxSolution> {
    check_k(ps, k)?;
    if z == 0 {
        return Err(invalid("z", "must be a positive integer"));
    }
    let count = binomial(ps.len(), k);
    if count > EXHAUSTIVE_LIMIT {
        return Err(CoresetError::TooLarge(format!(
            "C({}, {k}) = {count} exceeds {EXHAUSTIVE_LIMIT}",
            ps.len()
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_combination(ps.len(), k, |combo| {
        let cost = crate::metrics::weighted_cost(ps, 0..ps.len(), combo, z);
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, combo.to_vec()));
        }
        true
    });
    let (_, centers) = best.expect("at least one combination");
    ApproxSolution::from_centers(ps, &centers, z)
}
