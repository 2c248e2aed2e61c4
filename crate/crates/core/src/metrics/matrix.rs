use crate::error::{CoresetError, Result};

/// An explicit symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry, a zero diagonal and nonnegative finite entries.
    /// The triangle inequality is not checked here, see [`DistanceMatrix::triangle_violation`].
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(CoresetError::Empty("distance matrix"));
        }
        if entries.len() != n * n {
            return Err(CoresetError::InvalidMatrix(format!(
                "expected {} entries, found {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(CoresetError::InvalidMatrix(format!(
                    "nonzero diagonal at {i}"
                )));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(CoresetError::InvalidMatrix(format!(
                        "entry ({i},{j}) = {v} is not a nonnegative finite number"
                    )));
                }
                if v != entries[j * n + i] {
                    return Err(CoresetError::InvalidMatrix(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CoresetError::InvalidMatrix(format!(
                    "row {i} has {} columns, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    /// Builds the matrix of pairwise distances of any metric on `n` points.
    pub fn tabulate(n: usize, dist: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(i, j);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Self::new(n, entries)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn distance(&self, p: usize, q: usize) -> f64 {
        self.entries[p * self.n + q]
    }

    /// First triple `(a, b, c)` with `d(a,c) > d(a,b) + d(b,c)`, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.distance(a, c) > self.distance(a, b) + self.distance(b, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}
