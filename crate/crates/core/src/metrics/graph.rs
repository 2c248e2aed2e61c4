use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{CoresetError, Result};

/// Shortest-path metric on a connected, positively weighted, undirected graph.
///
/// Single-source distance rows are computed on first use and cached. A pair
/// `(p, q)` is always answered from the row of `min(p, q)` so that the metric
/// is exactly symmetric even under floating-point path sums.
#[derive(Debug)]
pub struct GraphMetric {
    adjacency: Vec<Vec<(usize, f64)>>,
    rows: Vec<OnceLock<Box<[f64]>>>,
}

impl Clone for GraphMetric {
    fn clone(&self) -> Self {
        Self {
            adjacency: self.adjacency.clone(),
            rows: self
                .rows
                .iter()
                .map(|row| {
                    let cell = OnceLock::new();
                    if let Some(r) = row.get() {
                        let _ = cell.set(r.clone());
                    }
                    cell
                })
                .collect(),
        }
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    vertex: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GraphMetric {
    /// Builds the metric from an undirected edge list `(u, v, w)`.
    ///
    /// Self-loops are ignored and parallel edges keep the lightest weight.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(CoresetError::Empty("graph"));
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(CoresetError::InvalidGraph(format!(
                    "edge ({u},{v}) references a vertex outside 0..{n}"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(CoresetError::InvalidGraph(format!(
                    "edge ({u},{v}) has non-positive weight {w}"
                )));
            }
            if u == v {
                continue;
            }
            for (a, b) in [(u, v), (v, u)] {
                match adjacency[a].iter_mut().find(|(x, _)| *x == b) {
                    Some(slot) => slot.1 = slot.1.min(w),
                    None => adjacency[a].push((b, w)),
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        let graph = Self {
            adjacency,
            rows: (0..n).map(|_| OnceLock::new()).collect(),
        };
        let reach = graph.row(0);
        if let Some(v) = reach.iter().position(|d| d.is_infinite()) {
            return Err(CoresetError::InvalidGraph(format!(
                "graph is disconnected: vertex {v} unreachable from 0"
            )));
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    /// Cached single-source shortest-path distances from `source`.
    pub fn row(&self, source: usize) -> &[f64] {
        self.rows[source].get_or_init(|| self.dijkstra(source).into_boxed_slice())
    }

    #[inline]
    pub fn distance(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        let (s, t) = if p < q { (p, q) } else { (q, p) };
        self.row(s)[t]
    }

    /// Fills every cached row, in parallel.
    pub fn precompute_all(&self) {
        use rayon::prelude::*;
        (0..self.len()).into_par_iter().for_each(|s| {
            self.row(s);
        });
    }

    fn dijkstra(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(State {
            dist: 0.0,
            vertex: source,
        });
        while let Some(State { dist: d, vertex: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let candidate = d + w;
                if candidate < dist[v] {
                    dist[v] = candidate;
                    heap.push(State {
                        dist: candidate,
                        vertex: v,
                    });
                }
            }
        }
        dist
    }
}
