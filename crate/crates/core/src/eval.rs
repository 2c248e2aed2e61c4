//! Empirical checks of the coreset guarantee: distortion over candidate
//! solution families, baseline samplers, and the power triangle inequality.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{approximate, ApproxSolution};
use crate::combinatorics::{binomial, for_each_combination};
use crate::error::{invalid, CoresetError, Result};
use crate::metrics::{power, CandidateSolution, PointSet};
use crate::partition::PartitionParams;
use crate::rng::{substream, substream_with};
use crate::sampler::{recommended_sample_size, Coreset, GroupMode, LayeredSampler, Source};
use crate::sum::compensated_sum;

/// Largest family the exhaustive mode enumerates.
pub const EXHAUSTIVE_FAMILY_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub max: f64,
    pub p99: f64,
    pub mean: f64,
}

impl Summary {
    /// Nearest-rank statistics; all zero for an empty slice.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                count: 0,
                max: 0.0,
                p99: 0.0,
                mean: 0.0,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        Self {
            count: sorted.len(),
            max: *sorted.last().unwrap(),
            p99: sorted[rank - 1],
            mean: compensated_sum(sorted.iter().copied()) / sorted.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionError {
    pub solution_id: usize,
    pub centers: Vec<usize>,
    pub full_cost: f64,
    pub coreset_cost: f64,
    pub error: f64,
}

/// Relative errors of a coreset over a solution family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub family: String,
    pub coreset_size: usize,
    pub coreset_weight: f64,
    pub summary: Summary,
    /// Ids of solutions with zero full cost, which have no relative error.
    pub skipped: Vec<usize>,
    pub errors: Vec<SolutionError>,
}

impl DistortionReport {
    /// Long-form CSV `solution_id,error`.
    pub fn errors_csv(&self) -> String {
        let mut out = String::from("solution_id,error\n");
        for e in &self.errors {
            out.push_str(&format!("{},{:?}\n", e.solution_id, e.error));
        }
        out
    }
}

/// A solution family with its full-data costs computed once.
#[derive(Debug, Clone)]
pub struct FamilyEvaluator<'a> {
    ps: &'a PointSet,
    z: u32,
    descriptor: String,
    solutions: Vec<CandidateSolution>,
    full_costs: Vec<f64>,
}

impl<'a> FamilyEvaluator<'a> {
    pub fn new(
        ps: &'a PointSet,
        solutions: Vec<CandidateSolution>,
        z: u32,
        descriptor: impl Into<String>,
    ) -> Result<Self> {
        if z == 0 {
            return Err(invalid("z", "must be a positive integer"));
        }
        for s in &solutions {
            s.centers().iter().try_for_each(|&c| ps.check_index(c))?;
        }
        ps.backend().prepare();
        let full_costs = solutions
            .par_iter()
            .map(|s| crate::metrics::weighted_cost(ps, 0..ps.len(), s.centers(), z))
            .collect();
        Ok(Self {
            ps,
            z,
            descriptor: descriptor.into(),
            solutions,
            full_costs,
        })
    }

    pub fn solutions(&self) -> &[CandidateSolution] {
        &self.solutions
    }

    pub fn full_costs(&self) -> &[f64] {
        &self.full_costs
    }

    pub fn evaluate(&self, coreset: &Coreset) -> Result<DistortionReport> {
        if let Some(e) = coreset.entries.iter().find(|e| e.index >= self.ps.len()) {
            return Err(CoresetError::IndexOutOfRange {
                index: e.index,
                len: self.ps.len(),
            });
        }
        let coreset_costs: Vec<f64> = self
            .solutions
            .par_iter()
            .map(|s| coreset.cost(self.ps, s.centers(), self.z))
            .collect();
        let mut errors = Vec::new();
        let mut skipped = Vec::new();
        for (id, s) in self.solutions.iter().enumerate() {
            let full = self.full_costs[id];
            if full <= 0.0 {
                skipped.push(id);
                continue;
            }
            let approx = coreset_costs[id];
            errors.push(SolutionError {
                solution_id: id,
                centers: s.centers().to_vec(),
                full_cost: full,
                coreset_cost: approx,
                error: (approx - full).abs() / full,
            });
        }
        let values: Vec<f64> = errors.iter().map(|e| e.error).collect();
        Ok(DistortionReport {
            family: self.descriptor.clone(),
            coreset_size: coreset.len(),
            coreset_weight: coreset.total_weight(),
            summary: Summary::of(&values),
            skipped,
            errors,
        })
    }
}

/// Relative cost error of `coreset` for every solution.
pub fn distortion(
    ps: &PointSet,
    coreset: &Coreset,
    solutions: &[CandidateSolution],
    z: u32,
) -> Result<DistortionReport> {
    FamilyEvaluator::new(ps, solutions.to_vec(), z, "custom")?.evaluate(coreset)
}

/// Which candidate solutions to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    RandomSubsets { count: usize, seed: u64 },
    Exhaustive,
    /// The given centers followed by `count - 1` copies with one or two
    /// centers swapped for random non-centers.
    PerturbedA {
        centers: Vec<usize>,
        count: usize,
        seed: u64,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::RandomSubsets { count, seed } => write!(f, "random(count={count};seed={seed})"),
            Family::Exhaustive => write!(f, "exhaustive"),
            Family::PerturbedA { count, seed, .. } => {
                write!(f, "perturbed(count={count};seed={seed})")
            }
        }
    }
}

/// Builds a family of k-center solutions drawn from the point set.
pub fn solution_family(ps: &PointSet, k: usize, family: &Family) -> Result<Vec<CandidateSolution>> {
    let n = ps.len();
    if k == 0 || k > n {
        return Err(invalid("k", format!("k = {k} with {n} points")));
    }
    match family {
        Family::Exhaustive => {
            let count = binomial(n, k);
            if count > EXHAUSTIVE_FAMILY_LIMIT {
                return Err(CoresetError::TooLarge(format!(
                    "C({n}, {k}) = {count} solutions"
                )));
            }
            let mut out = Vec::with_capacity(count as usize);
            for_each_combination(n, k, |c| {
                out.push(CandidateSolution::new(c.to_vec(), n).expect("valid combination"));
                true
            });
            Ok(out)
        }
        Family::RandomSubsets { count, seed } => (0..*count)
            .map(|i| {
                let mut rng = substream_with(*seed, "family-random", &[i as u64]);
                CandidateSolution::new(sample_indices(&mut rng, n, k).into_vec(), n)
            })
            .collect(),
        Family::PerturbedA {
            centers,
            count,
            seed,
        } => {
            let base = CandidateSolution::new(centers.clone(), n)?;
            if base.len() != k {
                return Err(invalid("centers", "perturbation base must have k centers"));
            }
            let outside: Vec<usize> = (0..n).filter(|p| !base.contains(*p)).collect();
            let mut out = vec![base.clone()];
            for i in 1..*count {
                if outside.is_empty() {
                    out.push(base.clone());
                    continue;
                }
                let mut rng = substream_with(*seed, "family-perturbed", &[i as u64]);
                let swaps = rng.random_range(1..=2usize).min(k).min(outside.len());
                let drop = sample_indices(&mut rng, k, swaps).into_vec();
                let add = sample_indices(&mut rng, outside.len(), swaps).into_vec();
                let mut c = base.centers().to_vec();
                for (d, a) in drop.into_iter().zip(add) {
                    c[d] = outside[a];
                }
                out.push(CandidateSolution::new(c, n)?);
            }
            Ok(out)
        }
    }
}

/// `m` draws proportional to weight, each carrying `W / m`.
pub fn baseline_uniform(ps: &PointSet, m: usize, seed: u64) -> Result<Coreset> {
    if m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    let mut rng = substream(seed, "uniform");
    let dist = WeightedIndex::new(ps.weights()).map_err(|_| CoresetError::ZeroTotalWeight)?;
    let w = ps.total_weight() / m as f64;
    Ok(Coreset::from_contributions(
        (0..m).map(|_| (dist.sample(&mut rng), w, Source::Uniform)),
    ))
}

/// Unnormalized sensitivity scores `w_p (cost(p,A)/cost(P,A) + 1/(k |C(p)|))`.
pub fn sensitivity_scores(ps: &PointSet, a: &ApproxSolution) -> Vec<f64> {
    let total = a.total_cost();
    let k = a.k() as f64;
    (0..ps.len())
        .map(|p| {
            let w = ps.weight(p);
            if w == 0.0 {
                return 0.0;
            }
            let share = if total > 0.0 {
                a.point_cost[p] / total
            } else {
                0.0
            };
            w * (share + 1.0 / (k * a.cluster_size[a.assignment[p]]))
        })
        .collect()
}

/// Sensitivity sampling against the approximate solution `a`.
pub fn baseline_sensitivity(
    ps: &PointSet,
    a: &ApproxSolution,
    m: usize,
    seed: u64,
    z: u32,
) -> Result<Coreset> {
    if m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    if z != a.z {
        return Err(invalid("z", "does not match the approximate solution"));
    }
    let scores = sensitivity_scores(ps, a);
    let total = compensated_sum(scores.iter().copied());
    let dist = WeightedIndex::new(&scores).map_err(|_| CoresetError::ZeroTotalWeight)?;
    let mut rng = substream(seed, "sensitivity");
    Ok(Coreset::from_contributions((0..m).map(|_| {
        let p = dist.sample(&mut rng);
        let prob = scores[p] / total;
        (p, ps.weight(p) / (m as f64 * prob), Source::Sensitivity)
    })))
}

/// Both power triangle inequalities for raw distances:
/// `d_ab^z <= (1+β)^(z-1) d_ac^z + (1+1/β)^(z-1) d_bc^z` and
/// `|d_ac^z - d_bc^z| <= β d_ac^z + (1+2z/β)^(z-1) d_ab^z`.
pub fn power_triangle_holds(d_ab: f64, d_ac: f64, d_bc: f64, z: u32, beta: f64) -> bool {
    let e = z as i32 - 1;
    let (ab, ac, bc) = (power(d_ab, z), power(d_ac, z), power(d_bc, z));
    let first = ab <= (1.0 + beta).powi(e) * ac + (1.0 + 1.0 / beta).powi(e) * bc;
    let second = (ac - bc).abs() <= beta * ac + (1.0 + 2.0 * f64::from(z) / beta).powi(e) * ab;
    first && second
}

/// The power triangle inequalities for points `a, b, c`, with `{c}` as the
/// solution in the second one.
pub fn check_power_triangle(ps: &PointSet, a: usize, b: usize, c: usize, z: u32, beta: f64) -> Result<bool> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(invalid("beta", "must be positive"));
    }
    if z == 0 {
        return Err(invalid("z", "must be a positive integer"));
    }
    Ok(power_triangle_holds(ps.dist(a, b)?, ps.dist(a, c)?, ps.dist(b, c)?, z, beta))
}

/// Coreset constructions compared by the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lgs,
    Uniform,
    Sensitivity,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Lgs => "lgs",
            Method::Uniform => "uniform",
            Method::Sensitivity => "sensitivity",
        }
    }
}

impl FromStr for Method {
    type Err = CoresetError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lgs" => Ok(Method::Lgs),
            "uniform" => Ok(Method::Uniform),
            "sensitivity" => Ok(Method::Sensitivity),
            other => Err(invalid("method", format!("unknown method `{other}`"))),
        }
    }
}

/// Per-group sample count that puts a layered coreset near `target` entries.
pub fn lgs_m_for_target(target: usize, sampled_groups: usize) -> usize {
    target.div_ceil(sampled_groups.max(1)).max(1)
}

/// Smallest per-group sample count whose layered coreset, drawn with `seed`,
/// has at least `target` distinct entries. Duplicate draws and whole-group
/// shortcuts make the realized size lag `m` times the group count, so the
/// count is found by bisection on the realized size.
pub fn lgs_m_for_size(sampler: &LayeredSampler<'_>, target: usize, seed: u64) -> Result<usize> {
    let size = |m: usize| sampler.sample(m, seed, GroupMode::Auto).map(|c| c.len());
    let mut lo = 1;
    let mut hi = lgs_m_for_target(target, sampler.sampled_group_count());
    let cap = sampler.approx().assignment.len().max(1);
    while size(hi)? < target {
        if hi >= cap {
            return Ok(cap);
        }
        lo = hi + 1;
        hi = (hi * 2).min(cap);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if size(mid)? >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}

/// Draws one coreset of roughly `target` entries with the given method.
pub fn coreset_for_method(
    method: Method,
    sampler: &LayeredSampler<'_>,
    ps: &PointSet,
    target: usize,
    seed: u64,
) -> Result<Coreset> {
    match method {
        Method::Lgs => sampler.sample(lgs_m_for_size(sampler, target, seed)?, seed, GroupMode::Auto),
        Method::Uniform => baseline_uniform(ps, target, seed),
        Method::Sensitivity => {
            let a = sampler.approx();
            baseline_sensitivity(ps, a, target, seed, a.z)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: &'static str,
    pub target_size: usize,
    pub seed: u64,
    pub coreset_size: usize,
    pub max: f64,
    pub p99: f64,
    pub mean: f64,
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("method,target_size,seed,coreset_size,max,p99,mean\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:?},{:?},{:?}\n",
            r.method, r.target_size, r.seed, r.coreset_size, r.max, r.p99, r.mean
        ));
    }
    out
}

/// One row per (method, size, seed): the distortion of a fresh coreset.
pub fn compare_methods(
    sampler: &LayeredSampler<'_>,
    ps: &PointSet,
    evaluator: &FamilyEvaluator<'_>,
    methods: &[Method],
    sizes: &[usize],
    seeds: &[u64],
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(methods.len() * sizes.len() * seeds.len());
    for &method in methods {
        for &size in sizes {
            for &seed in seeds {
                let coreset = coreset_for_method(method, sampler, ps, size, seed)?;
                let report = evaluator.evaluate(&coreset)?;
                rows.push(BenchRow {
                    method: method.name(),
                    target_size: size,
                    seed,
                    coreset_size: coreset.len(),
                    max: report.summary.max,
                    p99: report.summary.p99,
                    mean: report.summary.mean,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub seed: u64,
    pub m: usize,
    pub coreset_size: usize,
    pub max_distortion: f64,
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("epsilon,seed,m,coreset_size,max_distortion\n");
    for r in rows {
        out.push_str(&format!(
            "{:?},{},{},{},{:?}\n",
            r.epsilon, r.seed, r.m, r.coreset_size, r.max_distortion
        ));
    }
    out
}

/// Coreset size and worst distortion for every `(ε, seed)` at the
/// recommended sample count.
#[allow(clippy::too_many_arguments)]
pub fn scaling_experiment(
    ps: &PointSet,
    k: usize,
    z: u32,
    d_vc: usize,
    c0: f64,
    epsilons: &[f64],
    seeds: &[u64],
    evaluator: &FamilyEvaluator<'_>,
) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for &seed in seeds {
        let approx = approximate(ps, k, z, seed)?;
        for &epsilon in epsilons {
            let params = PartitionParams::new(k, z, epsilon)?;
            let m = recommended_sample_size(k, epsilon, z, d_vc, c0)?;
            let sampler = LayeredSampler::new(ps, approx.clone(), params)?;
            let coreset = sampler.sample(m, seed, GroupMode::Auto)?;
            let report = evaluator.evaluate(&coreset)?;
            rows.push(ScalingRow {
                epsilon,
                seed,
                m,
                coreset_size: coreset.len(),
                max_distortion: report.summary.max,
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Median of a nonempty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
