//! Decomposition of the input into rings, layers and groups.
//!
//! Every point of cluster `C_i` with cost `c = cost(p, A)` falls in ring
//! `j = floor(log2(c / Δ_i))`. Rings far below the average cost are inner,
//! rings far above are outer, the rest are main rings. Main rings sharing an
//! index `j`, a cost band `b` relative to `cost(R_j)` and a layer `ℓ` form
//! one main group; outer rings are grouped per layer in the same way. Rings
//! whose cost falls below the lowest band are cheap and get replaced by their
//! cluster center downstream.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::approx::ApproxSolution;
use crate::error::{invalid, Result};
use crate::metrics::PointSet;
use crate::sum::CompensatedSum;

/// Thresholds and scales of the ring/layer/group decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionParams {
    pub k: usize,
    pub z: u32,
    pub epsilon: f64,
    pub gamma_inner: f64,
    pub gamma_outer: f64,
    pub gamma_b: f64,
    pub gamma_phi: f64,
}

impl PartitionParams {
    pub fn new(k: usize, z: u32, epsilon: f64) -> Result<Self> {
        Self {
            k,
            z,
            epsilon,
            gamma_inner: 1.0,
            gamma_outer: 1.0,
            gamma_b: 1.0,
            gamma_phi: 1.0,
        }
        .validated()
    }

    /// Checks ranges after the constants have been adjusted by hand.
    pub fn validated(self) -> Result<Self> {
        if self.k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        if self.z == 0 {
            return Err(invalid("z", "must be a positive integer"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(invalid("epsilon", format!("{} not in (0, 1/2)", self.epsilon)));
        }
        for (name, g) in [
            ("gamma_inner", self.gamma_inner),
            ("gamma_outer", self.gamma_outer),
            ("gamma_b", self.gamma_b),
            ("gamma_phi", self.gamma_phi),
        ] {
            if !(g.is_finite() && g > 0.0) {
                return Err(invalid(name, "must be positive and finite"));
            }
        }
        if self.j_inner() >= 0 {
            return Err(invalid("gamma_inner", "inner threshold must be negative"));
        }
        if self.j_outer() <= 0 {
            return Err(invalid("gamma_outer", "outer threshold must be positive"));
        }
        if self.b_max() < 1 {
            return Err(invalid("gamma_b", "band count must be at least 1"));
        }
        Ok(self)
    }

    fn z_f(&self) -> f64 {
        f64::from(self.z)
    }

    /// `log2 φ` with `φ = 2^ceil(10 z log2(k/ε) + log2 γ_φ)`.
    pub fn phi_exponent(&self) -> u32 {
        let e = (10.0 * self.z_f() * (self.k as f64 / self.epsilon).log2() + self.gamma_phi.log2())
            .ceil();
        e.max(1.0) as u32
    }

    /// `φ` itself; may be far outside the `f64` range for large `k/ε`.
    pub fn phi(&self) -> f64 {
        2f64.powi(self.phi_exponent() as i32)
    }

    /// Rings `j <= j_inner` are inner.
    pub fn j_inner(&self) -> i32 {
        (self.z_f() * self.epsilon.log2() + self.gamma_inner.log2()).floor() as i32
    }

    /// Rings `j > j_outer` are outer.
    pub fn j_outer(&self) -> i32 {
        let k = self.k as f64;
        (self.gamma_outer * k * k * k / self.epsilon.powf(2.0 * self.z_f()))
            .log2()
            .ceil() as i32
    }

    /// Largest cost band. Ring costs never exceed `cost(R_j)`, so bands stop
    /// at `log2(k (4z/ε)^z)`.
    pub fn b_max(&self) -> i32 {
        let k = self.k as f64;
        (self.gamma_b * k * (4.0 * self.z_f() / self.epsilon).powf(self.z_f()))
            .log2()
            .ceil() as i32
    }

    /// `(ε / 4z)^z / k`: the unit the band index `b` is measured in, relative
    /// to the total cost of the rings competing for the group.
    pub fn band_unit(&self) -> f64 {
        (self.epsilon / (4.0 * self.z_f())).powf(self.z_f()) / self.k as f64
    }
}

/// Ring of a point relative to its cluster's average cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RingIndex {
    Inner,
    Main(i32),
    Outer(i32),
}

impl RingIndex {
    pub fn j(&self) -> Option<i32> {
        match *self {
            RingIndex::Inner => None,
            RingIndex::Main(j) | RingIndex::Outer(j) => Some(j),
        }
    }
}

/// `floor(log2 x)` for a positive finite `x`, exact.
pub fn floor_log2(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut e = x.log2().floor() as i32;
    while pow2(e) > x {
        e -= 1;
    }
    while pow2(e + 1) <= x {
        e += 1;
    }
    e
}

/// `2^e` without overflow to infinity in intermediate steps.
fn pow2(e: i32) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        2f64.powi(e + 64) * 2f64.powi(-64)
    } else {
        2f64.powi(e)
    }
}

/// Largest `j` with `2^j Δ <= cost`, i.e. `2^j Δ <= cost < 2^(j+1) Δ`.
fn ring_exponent(cost: f64, delta: f64) -> i32 {
    let mut j = (cost / delta).log2().floor() as i32;
    while delta * pow2(j) > cost {
        j -= 1;
    }
    while delta * pow2(j + 1) <= cost {
        j += 1;
    }
    j
}

/// Classifies a point of cost `cost` in a cluster of average cost `delta`.
/// Boundary costs `2^(j+1) Δ` belong to ring `j + 1`.
pub fn ring_of_cost(cost: f64, delta: f64, params: &PartitionParams) -> RingIndex {
    if delta <= 0.0 || cost <= 0.0 {
        return RingIndex::Inner;
    }
    let j = ring_exponent(cost, delta);
    if j <= params.j_inner() {
        RingIndex::Inner
    } else if j > params.j_outer() {
        RingIndex::Outer(j)
    } else {
        RingIndex::Main(j)
    }
}

/// Ring of point `p` under the approximate solution `a`.
pub fn ring_index(a: &ApproxSolution, p: usize, params: &PartitionParams) -> RingIndex {
    ring_of_cost(a.point_cost[p], a.delta[a.assignment[p]], params)
}

/// Position of a ring scale `2^j Δ` in the layer decomposition:
/// `2^ell φ^a <= 2^j Δ < 2^(ell+1) φ^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layer {
    pub a: i64,
    pub ell: u32,
}

/// Layer of ring `j` in a cluster of average cost `delta`, for `φ = 2^phi_exponent`.
pub fn layer_of(j: i32, delta: f64, phi_exponent: u32) -> Layer {
    assert!(delta > 0.0, "layer of a zero-cost cluster");
    assert!(phi_exponent >= 1);
    let e = i64::from(j) + i64::from(floor_log2(delta));
    let period = i64::from(phi_exponent);
    let layer = Layer {
        a: e.div_euclid(period),
        ell: e.rem_euclid(period) as u32,
    };
    debug_assert_eq!(layer.a * period + i64::from(layer.ell), e);
    layer
}

/// Group of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKey {
    Inner,
    MainMin { j: i32 },
    Main { j: i32, b: i32, ell: u32 },
    OuterMin { ell: u32 },
    Outer { b: i32, ell: u32 },
}

impl GroupKey {
    /// Main and outer groups are sampled; the rest are replaced by centers.
    pub fn is_sampled(&self) -> bool {
        matches!(self, GroupKey::Main { .. } | GroupKey::Outer { .. })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GroupKey::Inner => "inner",
            GroupKey::MainMin { .. } => "main_min",
            GroupKey::Main { .. } => "main",
            GroupKey::OuterMin { .. } => "outer_min",
            GroupKey::Outer { .. } => "outer",
        }
    }

    pub fn j(&self) -> Option<i32> {
        match *self {
            GroupKey::MainMin { j } | GroupKey::Main { j, .. } => Some(j),
            _ => None,
        }
    }

    pub fn b(&self) -> Option<i32> {
        match *self {
            GroupKey::Main { b, .. } | GroupKey::Outer { b, .. } => Some(b),
            _ => None,
        }
    }

    pub fn ell(&self) -> Option<u32> {
        match *self {
            GroupKey::Main { ell, .. } | GroupKey::OuterMin { ell } | GroupKey::Outer { ell, .. } => {
                Some(ell)
            }
            _ => None,
        }
    }

    /// Integer labels identifying the key, used to derive per-group RNG streams.
    pub fn labels(&self) -> [u64; 4] {
        let kind = match self {
            GroupKey::Inner => 0,
            GroupKey::MainMin { .. } => 1,
            GroupKey::Main { .. } => 2,
            GroupKey::OuterMin { .. } => 3,
            GroupKey::Outer { .. } => 4,
        };
        [
            kind,
            self.j().unwrap_or(0) as i64 as u64,
            self.b().unwrap_or(0) as i64 as u64,
            u64::from(self.ell().unwrap_or(0)),
        ]
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupKey::Inner => write!(f, "inner"),
            GroupKey::MainMin { j } => write!(f, "main_min/j={j}"),
            GroupKey::Main { j, b, ell } => write!(f, "main/j={j}/b={b}/l={ell}"),
            GroupKey::OuterMin { ell } => write!(f, "outer_min/l={ell}"),
            GroupKey::Outer { b, ell } => write!(f, "outer/b={b}/l={ell}"),
        }
    }
}

/// Weight and cost of one cluster's share of a group.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClusterShare {
    pub weight: f64,
    pub cost: f64,
}

/// Members and aggregates of one group.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupStats {
    /// Member point indices, ascending.
    pub members: Vec<usize>,
    /// Per-cluster weight and cost, keyed by cluster id.
    pub clusters: BTreeMap<usize, ClusterShare>,
    pub total_weight: f64,
    pub total_cost: f64,
}

/// The full group decomposition of a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPartition {
    pub params: PartitionParams,
    pub key_of: Vec<GroupKey>,
    pub ring_of: Vec<RingIndex>,
    pub groups: BTreeMap<GroupKey, GroupStats>,
}

impl GroupPartition {
    /// Number of distinct main and outer group keys (cheap and inner excluded).
    pub fn layered_group_count(&self) -> usize {
        self.groups.keys().filter(|k| k.is_sampled()).count()
    }

    pub fn sampled_groups(&self) -> impl Iterator<Item = (&GroupKey, &GroupStats)> {
        self.groups.iter().filter(|(k, _)| k.is_sampled())
    }

    pub fn group(&self, key: &GroupKey) -> Option<&GroupStats> {
        self.groups.get(key)
    }

    /// CSV rows `point_index,cluster,group_tag,j,b,ell` with a header line.
    pub fn to_csv(&self, a: &ApproxSolution) -> String {
        let mut out = String::from("point_index,cluster,group_tag,j,b,ell\n");
        let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (p, key) in self.key_of.iter().enumerate() {
            let j = key.j().or(self.ring_of[p].j());
            out.push_str(&format!(
                "{p},{},{},{},{},{}\n",
                a.assignment[p],
                key.tag(),
                opt(j.map(i64::from)),
                opt(key.b().map(i64::from)),
                opt(key.ell().map(i64::from)),
            ));
        }
        out
    }
}

/// Band of a ring of cost `ring_cost` competing against `pool_cost`: `None`
/// for the cheap regime `ring_cost < 2 · unit · pool_cost`, otherwise the
/// largest `b >= 1` with `ring_cost >= 2^b · unit · pool_cost`.
pub fn cost_band(ring_cost: f64, pool_cost: f64, params: &PartitionParams) -> Option<i32> {
    let base = params.band_unit() * pool_cost;
    if base.is_nan() || base <= 0.0 || ring_cost < 2.0 * base {
        return None;
    }
    let mut b = (ring_cost / base).log2().floor() as i32;
    while base * pow2(b) > ring_cost {
        b -= 1;
    }
    while base * pow2(b + 1) <= ring_cost {
        b += 1;
    }
    Some(b.clamp(1, params.b_max()))
}

/// Assigns every point to its group.
pub fn build_partition(
    ps: &PointSet,
    a: &ApproxSolution,
    params: &PartitionParams,
) -> Result<GroupPartition> {
    if a.assignment.len() != ps.len() {
        return Err(invalid("approx", "solution does not match the point set"));
    }
    if a.k() != params.k {
        return Err(invalid(
            "k",
            format!("partition k = {} but solution has {} centers", params.k, a.k()),
        ));
    }
    let n = ps.len();
    let phi_exp = params.phi_exponent();
    let ring_of: Vec<RingIndex> = (0..n).map(|p| ring_index(a, p, params)).collect();

    // Ring costs: main rings keyed by (j, cluster); outer rings by (layer, cluster).
    let mut main_ring_cost: BTreeMap<(i32, usize), CompensatedSum> = BTreeMap::new();
    let mut outer_ring_cost: BTreeMap<(u32, usize), CompensatedSum> = BTreeMap::new();
    let mut outer_layer: Vec<u32> = vec![0; n];
    for p in 0..n {
        let i = a.assignment[p];
        let c = ps.weight(p) * a.point_cost[p];
        match ring_of[p] {
            RingIndex::Inner => {}
            RingIndex::Main(j) => main_ring_cost.entry((j, i)).or_default().add(c),
            RingIndex::Outer(j) => {
                let ell = layer_of(j, a.delta[i], phi_exp).ell;
                outer_layer[p] = ell;
                outer_ring_cost.entry((ell, i)).or_default().add(c);
            }
        }
    }
    let mut pool_main: BTreeMap<i32, CompensatedSum> = BTreeMap::new();
    for (&(j, _), c) in &main_ring_cost {
        pool_main.entry(j).or_default().add(c.value());
    }
    let mut pool_outer: BTreeMap<u32, CompensatedSum> = BTreeMap::new();
    for (&(ell, _), c) in &outer_ring_cost {
        pool_outer.entry(ell).or_default().add(c.value());
    }

    let main_key = |j: i32, i: usize| -> GroupKey {
        let ring = main_ring_cost[&(j, i)].value();
        match cost_band(ring, pool_main[&j].value(), params) {
            None => GroupKey::MainMin { j },
            Some(b) => GroupKey::Main {
                j,
                b,
                ell: layer_of(j, a.delta[i], phi_exp).ell,
            },
        }
    };
    let outer_key = |ell: u32, i: usize| -> GroupKey {
        let ring = outer_ring_cost[&(ell, i)].value();
        match cost_band(ring, pool_outer[&ell].value(), params) {
            None => GroupKey::OuterMin { ell },
            Some(b) => GroupKey::Outer { b, ell },
        }
    };

    let key_of: Vec<GroupKey> = (0..n)
        .map(|p| {
            let i = a.assignment[p];
            match ring_of[p] {
                RingIndex::Inner => GroupKey::Inner,
                RingIndex::Main(j) => main_key(j, i),
                RingIndex::Outer(_) => outer_key(outer_layer[p], i),
            }
        })
        .collect();

    // Members and per-cluster (weight, cost) of every group.
    type Shares = BTreeMap<usize, (CompensatedSum, CompensatedSum)>;
    let mut acc: BTreeMap<GroupKey, (Vec<usize>, Shares)> = BTreeMap::new();
    for (p, key) in key_of.iter().enumerate() {
        let entry = acc.entry(*key).or_default();
        entry.0.push(p);
        let share = entry.1.entry(a.assignment[p]).or_default();
        share.0.add(ps.weight(p));
        share.1.add(ps.weight(p) * a.point_cost[p]);
    }
    let groups = acc
        .into_iter()
        .map(|(key, (members, shares))| {
            let clusters: BTreeMap<usize, ClusterShare> = shares
                .into_iter()
                .map(|(i, (w, c))| {
                    (
                        i,
                        ClusterShare {
                            weight: w.value(),
                            cost: c.value(),
                        },
                    )
                })
                .collect();
            let total_weight = clusters.values().map(|s| s.weight).collect::<CompensatedSum>();
            let total_cost = clusters.values().map(|s| s.cost).collect::<CompensatedSum>();
            (
                key,
                GroupStats {
                    members,
                    clusters,
                    total_weight: total_weight.value(),
                    total_cost: total_cost.value(),
                },
            )
        })
        .collect();

    Ok(GroupPartition {
        params: *params,
        key_of,
        ring_of,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: usize, z: u32, eps: f64) -> PartitionParams {
        PartitionParams::new(k, z, eps).unwrap()
    }

    #[test]
    fn thresholds() {
        let p = params(4, 1, 0.1);
        // log2(40) = 5.32 -> 54 after x10, ceil.
        assert_eq!(p.phi_exponent(), 54);
        assert_eq!(p.j_inner(), -4);
        // 64 / 0.01 = 6400 -> log2 = 12.64
        assert_eq!(p.j_outer(), 13);
        // 4 * 40 = 160 -> 7.32
        assert_eq!(p.b_max(), 8);
        let p2 = params(2, 2, 0.2);
        assert_eq!(p2.j_inner(), -5);
        assert!(p2.phi() >= 2.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(PartitionParams::new(0, 1, 0.1).is_err());
        assert!(PartitionParams::new(2, 0, 0.1).is_err());
        assert!(PartitionParams::new(2, 1, 0.5).is_err());
        assert!(PartitionParams::new(2, 1, 0.0).is_err());
        let mut p = params(2, 1, 0.1);
        p.gamma_inner = 1e6;
        assert!(p.validated().is_err());
    }

    #[test]
    fn floor_log2_exact_at_powers() {
        for e in -60..60 {
            let x = 2f64.powi(e);
            assert_eq!(floor_log2(x), e);
            assert_eq!(floor_log2(x * 1.5), e);
            assert_eq!(floor_log2(x.next_down()), e - 1);
        }
    }

    #[test]
    fn ring_examples() {
        let p = params(2, 1, 0.1);
        assert_eq!(ring_of_cost(3.0, 3.0, &p), RingIndex::Main(0));
        assert_eq!(ring_of_cost(5.0, 2.0, &p), RingIndex::Main(1));
        assert_eq!(ring_of_cost(4.0, 2.0, &p), RingIndex::Main(1));
        assert_eq!(ring_of_cost(0.0, 2.0, &p), RingIndex::Inner);
        assert_eq!(ring_of_cost(1.0, 0.0, &p), RingIndex::Inner);
        // 2^-4 boundary is inner (j = -4 <= j_inner).
        assert_eq!(ring_of_cost(1.0 / 16.0, 1.0, &p), RingIndex::Inner);
        assert_eq!(ring_of_cost(1.0 / 8.0, 1.0, &p), RingIndex::Main(-3));
        let j_out = p.j_outer();
        assert_eq!(
            ring_of_cost(2f64.powi(j_out + 1), 1.0, &p),
            RingIndex::Outer(j_out + 1)
        );
        assert_eq!(ring_of_cost(2f64.powi(j_out), 1.0, &p), RingIndex::Main(j_out));
    }

    #[test]
    fn layer_examples() {
        assert_eq!(layer_of(0, 40.0, 4), Layer { a: 1, ell: 1 });
        assert_eq!(layer_of(3, 5.0, 4), Layer { a: 1, ell: 1 });
        assert_eq!(layer_of(0, 1.0, 4), Layer { a: 0, ell: 0 });
        assert_eq!(layer_of(2, 4.0, 4), Layer { a: 1, ell: 0 });
        assert_eq!(layer_of(-3, 1.0, 4), Layer { a: -1, ell: 1 });
    }

    #[test]
    fn band_examples() {
        let p = params(2, 1, 0.2);
        // unit = (0.05) / 2 = 0.025.
        assert_eq!(cost_band(0.04, 1.0, &p), None);
        assert_eq!(cost_band(0.05, 1.0, &p), Some(1));
        assert_eq!(cost_band(0.1, 1.0, &p), Some(2));
        assert_eq!(cost_band(1.0, 1.0, &p), Some(5));
        assert_eq!(cost_band(0.0, 0.0, &p), None);
    }
}
