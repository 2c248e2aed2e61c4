#![allow(dead_code)]

use coreset_core::metrics::{Curve, CurveCollection, DistanceMatrix, EuclideanSpace, GraphMetric, MetricBackend};
use coreset_core::PointSet;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points in `dim` dimensions from `clusters` unit Gaussians with centers
/// spread uniformly over `[0, spread]^dim`.
pub fn gaussian_mixture_coords(n: usize, dim: usize, clusters: usize, spread: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let means: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dim).map(|_| r.random_range(0.0..spread)).collect())
        .collect();
    let mut coords = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let c = &means[r.random_range(0..clusters)];
        for x in c {
            coords.push(x + normal.sample(&mut r));
        }
    }
    coords
}

pub fn gaussian_mixture(n: usize, dim: usize, clusters: usize, spread: f64, seed: u64) -> PointSet {
    let coords = gaussian_mixture_coords(n, dim, clusters, spread, seed);
    PointSet::new(MetricBackend::Euclidean(EuclideanSpace::new(dim, coords).unwrap())).unwrap()
}

pub fn uniform_points(n: usize, dim: usize, seed: u64) -> PointSet {
    let mut r = rng(seed);
    let coords: Vec<f64> = (0..n * dim).map(|_| r.random_range(0.0..10.0)).collect();
    PointSet::new(MetricBackend::Euclidean(EuclideanSpace::new(dim, coords).unwrap())).unwrap()
}

/// Explicit matrix of a 3-D Gaussian mixture.
pub fn matrix_instance(n: usize, seed: u64) -> PointSet {
    let coords = gaussian_mixture_coords(n, 3, 4, 20.0, seed);
    let space = EuclideanSpace::new(3, coords).unwrap();
    let m = DistanceMatrix::tabulate(n, |i, j| space.distance(i, j)).unwrap();
    PointSet::new(MetricBackend::Matrix(m)).unwrap()
}

/// A random metric: shortest-path closure of random integer weights.
pub fn random_metric_matrix(n: usize, seed: u64) -> DistanceMatrix {
    let mut r = rng(seed);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = f64::from(r.random_range(1..=20u32));
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + m] + d[m * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    DistanceMatrix::new(n, d).unwrap()
}

/// Connected graph: a random spanning tree plus extra edges, integer weights.
pub fn graph_edges(n: usize, extra: usize, seed: u64) -> Vec<(usize, usize, f64)> {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = r.random_range(0..v);
        edges.push((u, v, f64::from(r.random_range(1..=20u32))));
    }
    for _ in 0..extra {
        let u = r.random_range(0..n);
        let v = r.random_range(0..n);
        edges.push((u, v, f64::from(r.random_range(1..=20u32))));
    }
    edges
}

pub fn graph_instance(n: usize, seed: u64) -> PointSet {
    let g = GraphMetric::from_edges(n, &graph_edges(n, n, seed)).unwrap();
    PointSet::new(MetricBackend::Graph(g)).unwrap()
}

/// Random-walk curve in the plane starting near `origin`.
pub fn random_curve(r: &mut ChaCha8Rng, vertices: usize, origin: (f64, f64)) -> Curve {
    let mut x = origin.0 + r.random_range(-1.0..1.0);
    let mut y = origin.1 + r.random_range(-1.0..1.0);
    let mut v = Vec::with_capacity(vertices);
    for _ in 0..vertices {
        v.push([x, y]);
        x += r.random_range(-1.0..1.0);
        y += r.random_range(-1.0..1.0);
    }
    Curve::from_vertices(&v).unwrap()
}

fn curve_collection(n: usize, seed: u64) -> CurveCollection {
    let mut r = rng(seed);
    let origins: Vec<(f64, f64)> = (0..4)
        .map(|_| (r.random_range(0.0..30.0), r.random_range(0.0..30.0)))
        .collect();
    let curves = (0..n)
        .map(|_| {
            let o = origins[r.random_range(0..origins.len())];
            let len = r.random_range(2..=8);
            random_curve(&mut r, len, o)
        })
        .collect();
    CurveCollection::new(curves).unwrap()
}

pub fn frechet_instance(n: usize, seed: u64) -> PointSet {
    PointSet::new(MetricBackend::Frechet(curve_collection(n, seed))).unwrap()
}

pub fn hausdorff_instance(n: usize, seed: u64) -> PointSet {
    PointSet::new(MetricBackend::Hausdorff(curve_collection(n, seed))).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Euclidean,
    Matrix,
    Graph,
    Frechet,
    Hausdorff,
}

pub const BACKENDS: [Backend; 5] = [
    Backend::Euclidean,
    Backend::Matrix,
    Backend::Graph,
    Backend::Frechet,
    Backend::Hausdorff,
];

/// A random instance of the backend with about `n` points.
pub fn instance(backend: Backend, n: usize, seed: u64) -> PointSet {
    match backend {
        Backend::Euclidean => gaussian_mixture(n, 2, 5, 30.0, seed),
        Backend::Matrix => matrix_instance(n, seed),
        Backend::Graph => graph_instance(n, seed),
        Backend::Frechet => frechet_instance(n, seed),
        Backend::Hausdorff => hausdorff_instance(n, seed),
    }
}

/// One heavy cluster near the origin and `k - 1` tiny clusters far away.
pub fn skew_instance(heavy: usize, tiny: usize, k: usize, seed: u64) -> PointSet {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut coords = Vec::new();
    for _ in 0..heavy {
        coords.push(normal.sample(&mut r));
        coords.push(normal.sample(&mut r));
    }
    for c in 1..k {
        let angle = c as f64 * std::f64::consts::TAU / (k - 1) as f64;
        let (cx, cy) = (200.0 * angle.cos(), 200.0 * angle.sin());
        for _ in 0..tiny {
            coords.push(cx + 0.5 * normal.sample(&mut r));
            coords.push(cy + 0.5 * normal.sample(&mut r));
        }
    }
    PointSet::new(MetricBackend::Euclidean(EuclideanSpace::new(2, coords).unwrap())).unwrap()
}
