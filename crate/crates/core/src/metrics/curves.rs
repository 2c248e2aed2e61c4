//! Metrics whose points are vertex sequences: discrete Fréchet between
//! polygonal curves and Hausdorff between finite point sets.

use super::euclidean::euclidean;
use crate::error::{CoresetError, Result};

/// An ordered list of vertices in `R^dim`. Used both as a polygonal curve and
/// as a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    dim: usize,
    coords: Vec<f64>,
}

impl Curve {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(CoresetError::Empty("curve"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(CoresetError::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn from_vertices<V: AsRef<[f64]>>(vertices: &[V]) -> Result<Self> {
        let first = vertices.first().ok_or(CoresetError::Empty("curve"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * vertices.len());
        for v in vertices {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(CoresetError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            coords.extend_from_slice(v);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

fn check_dims(a: &Curve, b: &Curve) -> Result<()> {
    if a.dim != b.dim {
        return Err(CoresetError::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

/// Discrete Fréchet distance: the minimum over monotone couplings of the two
/// vertex sequences of the largest coupled vertex distance.
pub fn discrete_frechet(a: &Curve, b: &Curve) -> Result<f64> {
    check_dims(a, b)?;
    Ok(frechet_dp(a, b))
}

fn frechet_dp(a: &Curve, b: &Curve) -> f64 {
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for (i, u) in a.vertices().enumerate() {
        for (j, v) in b.vertices().enumerate() {
            let d = euclidean(u, v);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => d.max(cur[j - 1]),
                (_, 0) => d.max(prev[0]),
                _ => d.max(prev[j].min(cur[j - 1]).min(prev[j - 1])),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Directed Hausdorff distance `max_{x in X} min_{y in Y} |x - y|`.
pub fn directed_hausdorff(x: &Curve, y: &Curve) -> Result<f64> {
    check_dims(x, y)?;
    Ok(directed(x, y))
}

fn directed(x: &Curve, y: &Curve) -> f64 {
    x.vertices()
        .map(|u| {
            y.vertices()
                .map(|v| euclidean(u, v))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(x: &Curve, y: &Curve) -> Result<f64> {
    check_dims(x, y)?;
    Ok(directed(x, y).max(directed(y, x)))
}

/// Which distance a [`CurveCollection`] induces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveDistance {
    DiscreteFrechet,
    Hausdorff,
}

/// A list of curves (or point sets) sharing one vertex dimension; each
/// element is one point of the metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveCollection {
    curves: Vec<Curve>,
    dim: usize,
}

impl CurveCollection {
    pub fn new(curves: Vec<Curve>) -> Result<Self> {
        let dim = curves
            .first()
            .ok_or(CoresetError::Empty("curve collection"))?
            .dim();
        if let Some(bad) = curves.iter().find(|c| c.dim() != dim) {
            return Err(CoresetError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { curves, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curve(&self, i: usize) -> &Curve {
        &self.curves[i]
    }

    pub(crate) fn distance(&self, kind: CurveDistance, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        // Argument order fixed by index so symmetry is exact.
        let (a, b) = if p < q { (p, q) } else { (q, p) };
        let (a, b) = (&self.curves[a], &self.curves[b]);
        match kind {
            CurveDistance::DiscreteFrechet => frechet_dp(a, b),
            CurveDistance::Hausdorff => directed(a, b).max(directed(b, a)),
        }
    }
}
