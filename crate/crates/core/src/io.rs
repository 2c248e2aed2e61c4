//! Text formats for inputs and coresets.
//!
//! * points: one point per line, comma-separated coordinates, optionally a
//!   trailing `weight=<w>` field;
//! * matrix: `n` lines of `n` comma-separated distances;
//! * graph: `u v w` per line, 0-based vertices, positive weights;
//! * curves / sets: one element per line, vertices `x,y;x,y;...`.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::str::FromStr;

use crate::error::{CoresetError, Result};
use crate::metrics::{
    Curve, CurveCollection, DistanceMatrix, EuclideanSpace, GraphMetric, MetricBackend, PointSet,
};
use crate::sampler::{Coreset, CoresetEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Points,
    Matrix,
    Graph,
    Curves,
    Sets,
}

impl FromStr for InputFormat {
    type Err = CoresetError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "points" => Ok(Self::Points),
            "matrix" => Ok(Self::Matrix),
            "graph" => Ok(Self::Graph),
            "curves" => Ok(Self::Curves),
            "sets" => Ok(Self::Sets),
            other => Err(crate::error::invalid(
                "format",
                format!("unknown format `{other}`"),
            )),
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> CoresetError {
    CoresetError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("`{}` is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{}` is not finite", field.trim())));
    }
    Ok(v)
}

/// Points CSV into a Euclidean point set.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut dim = None;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (line, row) in content_lines(text) {
        let mut fields: Vec<&str> = row.split(',').map(str::trim).collect();
        let weight = match fields.last().and_then(|f| f.strip_prefix("weight=")) {
            Some(w) => {
                let w = parse_f64(line, w)?;
                if w < 0.0 {
                    return Err(parse_err(line, "negative weight"));
                }
                fields.pop();
                w
            }
            None => 1.0,
        };
        if fields.is_empty() || fields.iter().any(|f| f.is_empty()) {
            return Err(parse_err(line, "empty coordinate"));
        }
        match dim {
            None => dim = Some(fields.len()),
            Some(d) if d != fields.len() => {
                return Err(parse_err(
                    line,
                    format!("expected {d} coordinates, found {}", fields.len()),
                ))
            }
            _ => {}
        }
        for f in fields {
            coords.push(parse_f64(line, f)?);
        }
        weights.push(weight);
    }
    let dim = dim.ok_or(CoresetError::Empty("points file"))?;
    PointSet::with_weights(
        MetricBackend::Euclidean(EuclideanSpace::new(dim, coords)?),
        weights,
    )
}

pub fn parse_matrix(text: &str) -> Result<DistanceMatrix> {
    let mut rows = Vec::new();
    for (line, row) in content_lines(text) {
        rows.push(
            row.split(',')
                .map(|f| parse_f64(line, f))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    if rows.is_empty() {
        return Err(CoresetError::Empty("matrix file"));
    }
    DistanceMatrix::from_rows(&rows)
}

/// Edge list; the vertex count is one more than the largest id.
pub fn parse_graph(text: &str) -> Result<GraphMetric> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (line, row) in content_lines(text) {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line, "expected `u v w`"));
        }
        let vertex = |f: &str| -> Result<usize> {
            f.parse()
                .map_err(|_| parse_err(line, format!("`{f}` is not a vertex id")))
        };
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        let w = parse_f64(line, fields[2])?;
        if w <= 0.0 {
            return Err(parse_err(line, "edge weight must be positive"));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(CoresetError::Empty("graph file"));
    }
    GraphMetric::from_edges(n, &edges)
}

/// One vertex sequence per line.
pub fn parse_curves(text: &str) -> Result<CurveCollection> {
    let mut curves = Vec::new();
    let mut dim = None;
    for (line, row) in content_lines(text) {
        let vertices = row
            .split(';')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                v.split(',')
                    .map(|f| parse_f64(line, f))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let curve = Curve::from_vertices(&vertices).map_err(|e| parse_err(line, e.to_string()))?;
        match dim {
            None => dim = Some(curve.dim()),
            Some(d) if d != curve.dim() => {
                return Err(parse_err(
                    line,
                    format!("expected dimension {d}, found {}", curve.dim()),
                ))
            }
            _ => {}
        }
        curves.push(curve);
    }
    CurveCollection::new(curves)
}

/// One nonnegative weight per line.
pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    content_lines(text)
        .map(|(line, row)| {
            let w = parse_f64(line, row)?;
            if w < 0.0 {
                return Err(parse_err(line, "negative weight"));
            }
            Ok(w)
        })
        .collect()
}

/// Parses any input format. `weights` overrides per-point weights.
pub fn parse_input(format: InputFormat, text: &str, weights: Option<Vec<f64>>) -> Result<PointSet> {
    let ps = match format {
        InputFormat::Points => parse_points(text)?,
        InputFormat::Matrix => PointSet::new(MetricBackend::Matrix(parse_matrix(text)?))?,
        InputFormat::Graph => PointSet::new(MetricBackend::Graph(parse_graph(text)?))?,
        InputFormat::Curves => PointSet::new(MetricBackend::Frechet(parse_curves(text)?))?,
        InputFormat::Sets => PointSet::new(MetricBackend::Hausdorff(parse_curves(text)?))?,
    };
    match weights {
        Some(w) => PointSet::with_weights(ps.backend().clone(), w),
        None => Ok(ps),
    }
}

/// Reads a coreset CSV written by [`Coreset::to_csv`]. Tags are not
/// interpreted.
pub fn parse_coreset(text: &str) -> Result<Coreset> {
    let mut entries: Vec<CoresetEntry> = Vec::new();
    for (line, row) in content_lines(text) {
        if row.starts_with("point_index") {
            continue;
        }
        let fields: Vec<&str> = row.splitn(3, ',').collect();
        if fields.len() < 2 {
            return Err(parse_err(line, "expected `point_index,weight[,group_tag]`"));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("`{}` is not a point index", fields[0])))?;
        let weight = parse_f64(line, fields[1])?;
        if weight <= 0.0 {
            return Err(parse_err(line, "coreset weights must be positive"));
        }
        if entries.last().is_some_and(|e| e.index >= index) {
            return Err(parse_err(line, "point indices must be strictly increasing"));
        }
        entries.push(CoresetEntry {
            index,
            weight,
            sources: Vec::new(),
        });
    }
    Ok(Coreset { entries })
}
