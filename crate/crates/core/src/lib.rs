//! Small weighted coresets for (k,z)-clustering in general metric spaces.
//!
//! The pipeline computes a constant-factor approximate solution, splits the
//! input into rings, layers and groups relative to it, and then importance
//! samples every group independently ([`sampler::build_coreset`]). The
//! [`eval`] module measures how well a coreset preserves clustering costs,
//! and [`vcdim`] explores the range space of metric balls whose VC dimension
//! drives the sample size.
//!
//! ```
//! use coreset_core::{build_coreset, BuildConfig, PointSet};
//!
//! let xs: Vec<f64> = (0..200).map(|i| (i % 20) as f64 + 100.0 * (i / 100) as f64).collect();
//! let ps = PointSet::euclidean_line(&xs).unwrap();
//! let build = build_coreset(&ps, &BuildConfig::new(2, 1, 0.2, 2, 7)).unwrap();
//! assert!(build.coreset.len() <= ps.len());
//! assert!(build.coreset.total_weight() > 0.0);
//! ```

pub mod approx;
pub mod combinatorics;
pub mod error;
pub mod eval;
pub mod io;
pub mod metrics;
pub mod partition;
pub mod rng;
pub mod sampler;
pub mod sum;
pub mod vcdim;

pub use approx::{approximate, dz_seed, exact_kmedian, local_search_refine, ApproxSolution};
pub use error::{CoresetError, Result};
pub use eval::{distortion, solution_family, DistortionReport, Family};
pub use metrics::{
    point_cost, set_cost, CandidateSolution, Curve, CurveCollection, DistanceMatrix,
    EuclideanSpace, GraphMetric, MetricBackend, PointSet,
};
pub use partition::{build_partition, GroupKey, GroupPartition, PartitionParams};
pub use sampler::{
    build_coreset, recommended_sample_size, BuildConfig, Coreset, CoresetBuild, CoresetMeta,
    GroupMode, LayeredSampler,
};
pub use vcdim::{estimate_vc, known_vc_bound, BallRangeSpace, VcEstimate};
