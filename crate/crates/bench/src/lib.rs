//! Seeded instance generators shared by the benchmarks.

use coreset_core::metrics::{Curve, CurveCollection, EuclideanSpace, MetricBackend};
use coreset_core::rng::substream;
use coreset_core::PointSet;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// `n` points from `clusters` unit Gaussians whose means are uniform in
/// `[0, spread]^dim`.
pub fn gaussian_mixture(n: usize, dim: usize, clusters: usize, spread: f64, seed: u64) -> PointSet {
    let mut rng = substream(seed, "bench-mixture");
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let means: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..spread)).collect())
        .collect();
    let mut coords = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let mean = &means[rng.random_range(0..clusters)];
        coords.extend(mean.iter().map(|m| m + normal.sample(&mut rng)));
    }
    let space = EuclideanSpace::new(dim, coords).expect("well-formed coordinates");
    PointSet::new(MetricBackend::Euclidean(space)).expect("nonempty point set")
}

/// Planar random walk with `vertices` steps starting near `origin`.
pub fn random_walk(rng: &mut impl Rng, vertices: usize, origin: (f64, f64)) -> Curve {
    let (mut x, mut y) = origin;
    let walk: Vec<[f64; 2]> = (0..vertices)
        .map(|_| {
            x += rng.random_range(-1.0..1.0);
            y += rng.random_range(-1.0..1.0);
            [x, y]
        })
        .collect();
    Curve::from_vertices(&walk).expect("nonempty curve")
}

/// `n` random walks of `vertices` steps around four origins, under the
/// discrete Fréchet distance.
pub fn frechet_instance(n: usize, vertices: usize, seed: u64) -> PointSet {
    let mut rng = substream(seed, "bench-curves");
    let origins = [(0.0, 0.0), (30.0, 0.0), (0.0, 30.0), (30.0, 30.0)];
    let curves = (0..n)
        .map(|i| random_walk(&mut rng, vertices, origins[i % origins.len()]))
        .collect();
    let collection = CurveCollection::new(curves).expect("curves of one dimension");
    PointSet::new(MetricBackend::Frechet(collection)).expect("nonempty point set")
}
