//! Layered group sampling: importance sampling inside every main and outer
//! group, with inner and cheap points replaced by their weighted centers.

use std::collections::BTreeMap;
use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{approximate, ApproxSolution};
use crate::error::{invalid, CoresetError, Result};
use crate::metrics::PointSet;
use crate::partition::{build_partition, GroupKey, GroupPartition, GroupStats, PartitionParams};
use crate::rng::substream_with;
use crate::sum::CompensatedSum;

/// Default sample-size constant for desk-scale runs.
pub const DEFAULT_C0: f64 = 0.05;

/// A group is taken verbatim once `m >= EXACT_FACTOR * |G|`.
pub const EXACT_FACTOR: usize = 4;

/// Where a coreset entry's weight came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    /// Sampled from, or copied verbatim out of, a main or outer group.
    Group(GroupKey),
    /// Center weight standing in for inner or cheap points of this key.
    Center(GroupKey),
    Uniform,
    Sensitivity,
    Input,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Group(k) => write!(f, "{k}"),
            Source::Center(k) => write!(f, "center:{k}"),
            Source::Uniform => write!(f, "uniform"),
            Source::Sensitivity => write!(f, "sensitivity"),
            Source::Input => write!(f, "input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoresetEntry {
    pub index: usize,
    pub weight: f64,
    pub sources: Vec<Source>,
}

impl CoresetEntry {
    /// Provenance tag: the sources joined by `|`.
    pub fn tag(&self) -> String {
        self.sources
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// A weighted subset of the input, sorted by point index with no duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coreset {
    pub entries: Vec<CoresetEntry>,
}

impl Coreset {
    /// Merges contributions sharing a point index, dropping zero weights.
    pub fn from_contributions(items: impl IntoIterator<Item = (usize, f64, Source)>) -> Self {
        let mut merged: BTreeMap<usize, (CompensatedSum, Vec<Source>)> = BTreeMap::new();
        for (index, weight, source) in items {
            if weight.is_nan() || weight < 0.0 {
                continue;
            }
            let slot = merged.entry(index).or_default();
            slot.0.add(weight);
            if !slot.1.contains(&source) {
                slot.1.push(source);
            }
        }
        Self {
            entries: merged
                .into_iter()
                .filter(|(_, (w, _))| w.value() > 0.0)
                .map(|(index, (w, mut sources))| {
                    sources.sort();
                    CoresetEntry {
                        index,
                        weight: w.value(),
                        sources,
                    }
                })
                .collect(),
        }
    }

    /// The input itself with its own weights.
    pub fn full(ps: &PointSet) -> Self {
        Self::from_contributions((0..ps.len()).map(|p| (p, ps.weight(p), Source::Input)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).collect::<CompensatedSum>().value()
    }

    /// `sum_e weight_e * cost(index_e, centers)`.
    pub fn cost(&self, ps: &PointSet, centers: &[usize], z: u32) -> f64 {
        self.entries
            .iter()
            .map(|e| e.weight * ps.cost_to(e.index, centers, z))
            .collect::<CompensatedSum>()
            .value()
    }

    /// Total weight of entries with a source matching `pred`.
    pub fn weight_from(&self, pred: impl Fn(&Source) -> bool) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.sources.iter().any(&pred))
            .map(|e| e.weight)
            .sum()
    }

    /// CSV `point_index,weight,group_tag` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point_index,weight,group_tag\n");
        for e in &self.entries {
            out.push_str(&format!("{},{:?},{}\n", e.index, e.weight, e.tag()));
        }
        out
    }
}

/// Sampling probability of `p` inside a main group: the cluster's share of
/// the group cost, spread over the cluster's members by weight.
pub fn main_group_probability(
    ps: &PointSet,
    a: &ApproxSolution,
    group: &GroupStats,
    p: usize,
) -> f64 {
    assert!(group.total_cost > 0.0, "main group with zero cost");
    let share = group.clusters[&a.assignment[p]];
    (share.cost / group.total_cost) * (ps.weight(p) / share.weight)
}

/// Sampling probability of `p` inside an outer group, proportional to its
/// weighted cost.
pub fn outer_group_probability(
    ps: &PointSet,
    a: &ApproxSolution,
    group: &GroupStats,
    p: usize,
) -> f64 {
    assert!(group.total_cost > 0.0, "outer group with zero cost");
    ps.weight(p) * a.point_cost[p] / group.total_cost
}

/// Probabilities of every member of a sampled group, aligned with `members`.
pub fn group_probabilities(
    ps: &PointSet,
    a: &ApproxSolution,
    key: &GroupKey,
    group: &GroupStats,
) -> Vec<f64> {
    let rule = match key {
        GroupKey::Main { .. } => main_group_probability,
        GroupKey::Outer { .. } => outer_group_probability,
        other => panic!("group {other} is not sampled"),
    };
    group.members.iter().map(|&p| rule(ps, a, group, p)).collect()
}

/// `m` i.i.d. draws with their pre-merge weights `w_p / (m P[p])`.
pub fn draw_group<R: Rng + ?Sized>(
    ps: &PointSet,
    a: &ApproxSolution,
    key: &GroupKey,
    group: &GroupStats,
    m: usize,
    rng: &mut R,
) -> Vec<(usize, f64)> {
    assert!(m >= 1);
    let probs = group_probabilities(ps, a, key, group);
    let dist = WeightedIndex::new(&probs).expect("sampled group has positive mass");
    (0..m)
        .map(|_| {
            let slot = dist.sample(rng);
            let p = group.members[slot];
            (p, ps.weight(p) / (m as f64 * probs[slot]))
        })
        .collect()
}

/// Samples a group and merges duplicate draws.
pub fn sample_group<R: Rng + ?Sized>(
    ps: &PointSet,
    a: &ApproxSolution,
    key: &GroupKey,
    group: &GroupStats,
    m: usize,
    rng: &mut R,
) -> Vec<(usize, f64)> {
    let merged = Coreset::from_contributions(
        draw_group(ps, a, key, group, m, rng)
            .into_iter()
            .map(|(p, w)| (p, w, Source::Group(*key))),
    );
    merged.entries.into_iter().map(|e| (e.index, e.weight)).collect()
}

/// Center weights replacing inner and cheap points: every center receives
/// the total weight of its cluster's inner, main-min and outer-min points.
pub fn inner_and_cheap_weights(
    ps: &PointSet,
    partition: &GroupPartition,
    a: &ApproxSolution,
) -> Vec<(usize, f64)> {
    center_contributions(ps, partition, a)
        .into_iter()
        .map(|(c, w, _)| (c, w))
        .collect()
}

fn center_contributions(
    ps: &PointSet,
    partition: &GroupPartition,
    a: &ApproxSolution,
) -> Vec<(usize, f64, Vec<GroupKey>)> {
    let mut per_cluster: BTreeMap<usize, (CompensatedSum, Vec<GroupKey>)> = BTreeMap::new();
    for (p, key) in partition.key_of.iter().enumerate() {
        if key.is_sampled() {
            continue;
        }
        let slot = per_cluster.entry(a.assignment[p]).or_default();
        slot.0.add(ps.weight(p));
        if !slot.1.contains(key) {
            slot.1.push(*key);
        }
    }
    per_cluster
        .into_iter()
        .filter(|(_, (w, _))| w.value() > 0.0)
        .map(|(i, (w, mut keys))| {
            keys.sort();
            (a.centers[i], w.value(), keys)
        })
        .collect()
}

/// Per-group sample count `ceil(c0 k d_vc ε^-2 min(ε^(1-z), k) log2(k/ε))`.
pub fn recommended_sample_size(k: usize, epsilon: f64, z: u32, d_vc: usize, c0: f64) -> Result<usize> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if d_vc == 0 {
        return Err(invalid("d_vc", "must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid("epsilon", format!("{epsilon} not in (0, 1/2)")));
    }
    if !(z == 1 || z == 2) {
        return Err(invalid("z", "must be 1 or 2"));
    }
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(invalid("c0", "must be positive"));
    }
    let kf = k as f64;
    let min_factor = epsilon.powi(1 - z as i32).min(kf);
    let m = (c0 * kf * d_vc as f64 * epsilon.powi(-2) * min_factor * (kf / epsilon).log2()).ceil();
    if !(m.is_finite() && m < usize::MAX as f64) {
        return Err(CoresetError::TooLarge(format!("sample size {m}")));
    }
    Ok((m as usize).max(1))
}

/// How sampled groups are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupMode {
    /// Sample `m` draws, or copy the group when `m >= 4 |G|`.
    #[default]
    Auto,
    /// Copy every sampled group verbatim.
    Exact,
}

/// A prepared approximate solution and partition that can emit coresets for
/// any number of seeds.
#[derive(Debug, Clone)]
pub struct LayeredSampler<'a> {
    ps: &'a PointSet,
    approx: ApproxSolution,
    partition: GroupPartition,
}

impl<'a> LayeredSampler<'a> {
    pub fn new(ps: &'a PointSet, approx: ApproxSolution, params: PartitionParams) -> Result<Self> {
        let partition = build_partition(ps, &approx, &params)?;
        Ok(Self {
            ps,
            approx,
            partition,
        })
    }

    pub fn approx(&self) -> &ApproxSolution {
        &self.approx
    }

    pub fn partition(&self) -> &GroupPartition {
        &self.partition
    }

    /// Number of groups that are sampled (main and outer).
    pub fn sampled_group_count(&self) -> usize {
        self.partition.layered_group_count()
    }

    /// Whether a group of `members` points is copied verbatim at sample size `m`.
    pub fn takes_whole(members: usize, m: usize, mode: GroupMode) -> bool {
        mode == GroupMode::Exact || m >= EXACT_FACTOR * members
    }

    /// Draws one coreset with `m` samples per group.
    pub fn sample(&self, m: usize, seed: u64, mode: GroupMode) -> Result<Coreset> {
        if m == 0 {
            return Err(invalid("m", "must be at least 1"));
        }
        let ps = self.ps;
        let a = &self.approx;
        let sampled: Vec<(&GroupKey, &GroupStats)> = self.partition.sampled_groups().collect();
        let per_group: Vec<Vec<(usize, f64, Source)>> = sampled
            .par_iter()
            .map(|&(key, group)| {
                if Self::takes_whole(group.members.len(), m, mode) {
                    group
                        .members
                        .iter()
                        .map(|&p| (p, ps.weight(p), Source::Group(*key)))
                        .collect()
                } else {
                    let mut rng = substream_with(seed, "group", &key.labels());
                    draw_group(ps, a, key, group, m, &mut rng)
                        .into_iter()
                        .map(|(p, w)| (p, w, Source::Group(*key)))
                        .collect()
                }
            })
            .collect();
        let centers = center_contributions(ps, &self.partition, a)
            .into_iter()
            .flat_map(|(c, w, keys)| {
                // Full weight on the first key; the rest only add provenance.
                keys.into_iter()
                    .enumerate()
                    .map(move |(i, k)| (c, if i == 0 { w } else { 0.0 }, Source::Center(k)))
            });
        Ok(Coreset::from_contributions(
            per_group.into_iter().flatten().chain(centers),
        ))
    }
}

/// Run metadata written next to a coreset.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CoresetMeta {
    pub k: usize,
    pub z: u32,
    pub epsilon: f64,
    pub d_vc: usize,
    pub seed: u64,
    pub c0: f64,
    pub m: usize,
    pub n: usize,
    pub groups: usize,
    pub coreset_size: usize,
}

/// Parameters of an end-to-end coreset build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    pub k: usize,
    pub z: u32,
    pub epsilon: f64,
    pub d_vc: usize,
    pub seed: u64,
    pub c0: f64,
    /// Overrides the recommended per-group sample count.
    pub m: Option<usize>,
    pub mode: GroupMode,
}

impl BuildConfig {
    pub fn new(k: usize, z: u32, epsilon: f64, d_vc: usize, seed: u64) -> Self {
        Self {
            k,
            z,
            epsilon,
            d_vc,
            seed,
            c0: DEFAULT_C0,
            m: None,
            mode: GroupMode::Auto,
        }
    }
}

/// Everything produced by [`build_coreset`].
#[derive(Debug, Clone)]
pub struct CoresetBuild {
    pub coreset: Coreset,
    pub meta: CoresetMeta,
    pub approx: ApproxSolution,
    pub partition: GroupPartition,
}

/// Approximate solution, partition, center weights and per-group sampling.
pub fn build_coreset(ps: &PointSet, config: &BuildConfig) -> Result<CoresetBuild> {
    let params = PartitionParams::new(config.k, config.z, config.epsilon)?;
    let m = match config.m {
        Some(m) if m >= 1 => m,
        Some(_) => return Err(invalid("m", "must be at least 1")),
        None => recommended_sample_size(config.k, config.epsilon, config.z, config.d_vc, config.c0)?,
    };
    let approx = approximate(ps, config.k, config.z, config.seed)?;
    let sampler = LayeredSampler::new(ps, approx, params)?;
    let coreset = sampler.sample(m, config.seed, config.mode)?;
    let meta = CoresetMeta {
        k: config.k,
        z: config.z,
        epsilon: config.epsilon,
        d_vc: config.d_vc,
        seed: config.seed,
        c0: config.c0,
        m,
        n: ps.len(),
        groups: sampler.sampled_group_count(),
        coreset_size: coreset.len(),
    };
    let LayeredSampler {
        approx, partition, ..
    } = sampler;
    Ok(CoresetBuild {
        coreset,
        meta,
        approx,
        partition,
    })
}
