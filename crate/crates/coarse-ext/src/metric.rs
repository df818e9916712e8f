//! Finite metric spaces with verified axioms, metric transforms, and balls.
//!
//! A [`FiniteMetricSpace`] is an indexed point set together with a distance
//! function. Explicit constructors ([`FiniteMetricSpace::from_distance_matrix`],
//! [`FiniteMetricSpace::from_graph`]) verify all three metric axioms
//! exhaustively and reject invalid input rather than repairing it. Implicit
//! backends (integer intervals, integer grids under the sup metric, and the
//! truncation/discretization transforms) carry the axioms by construction and
//! evaluate distances in O(1) without materializing an n x n matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for real comparisons throughout the crate.
pub const TOL: f64 = 1e-9;

/// Identifier of a point: either an integer or a free-form name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointId {
    Int(i64),
    Name(String),
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointId::Int(k) => write!(f, "{k}"),
            PointId::Name(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for PointId {
    fn from(k: i64) -> Self {
        PointId::Int(k)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId::Name(s.to_owned())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is not square: row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("a metric space needs at least one point")]
    EmptySpace,
    #[error("duplicate point id {id}")]
    DuplicatePoint { id: PointId },
    #[error("asymmetric matrix: d({i},{j})={forward} but d({j},{i})={backward}")]
    AsymmetricMatrix {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("negative distance d({i},{j})={value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal entry d({i},{i})={value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("zero distance between distinct points {i} and {j}")]
    ZeroDistance { i: usize, j: usize },
    #[error("triangle inequality violated at ({i},{j},{k}): d({i},{k})={direct} > {via} = d({i},{j})+d({j},{k})")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },
    #[error("graph is disconnected: no path from {from} to {to}")]
    DisconnectedGraph { from: PointId, to: PointId },
    #[error("nonpositive edge weight {weight} on ({from}, {to})")]
    NonpositiveWeight { from: PointId, to: PointId, weight: f64 },
    #[error("unknown vertex {id} in edge list")]
    UnknownVertex { id: PointId },
    #[error("scale parameter must be positive, got {m}")]
    NonpositiveM { m: f64 },
    #[error("unknown point {id}")]
    UnknownPoint { id: PointId },
}

/// Distance backend. Explicit matrices are verified; the implicit backends
/// satisfy the metric axioms by construction.
#[derive(Clone, Debug, PartialEq)]
enum Backend {
    /// Row-major n x n matrix.
    Matrix { dist: Vec<f64>, n: usize },
    /// Points on the integer line, d(x, y) = |x - y|.
    Line { coords: Vec<i64> },
    /// Points of an integer grid under the sup metric.
    Grid { coords: Vec<(i64, i64)> },
    /// Distances truncated above `m`: d' = min(d, m).
    Capped { inner: Box<Backend>, m: f64 },
    /// Nonzero distances raised to at least `m`: d' = max(d, m) off the diagonal.
    Floored { inner: Box<Backend>, m: f64 },
}

impl Backend {
    fn eval(&self, i: usize, j: usize) -> f64 {
        match self {
            Backend::Matrix { dist, n } => dist[i * n + j],
            Backend::Line { coords } => (coords[i] - coords[j]).abs() as f64,
            Backend::Grid { coords } => {
                let (xi, yi) = coords[i];
                let (xj, yj) = coords[j];
                ((xi - xj).abs().max((yi - yj).abs())) as f64
            }
            Backend::Capped { inner, m } => inner.eval(i, j).min(*m),
            Backend::Floored { inner, m } => {
                if i == j {
                    0.0
                } else {
                    inner.eval(i, j).max(*m)
                }
            }
        }
    }

    fn restrict(&self, keep: &[usize]) -> Backend {
        match self {
            Backend::Matrix { dist, n } => {
                let k = keep.len();
                let mut sub = vec![0.0; k * k];
                for (a, &i) in keep.iter().enumerate() {
                    for (b, &j) in keep.iter().enumerate() {
                        sub[a * k + b] = dist[i * n + j];
                    }
                }
                Backend::Matrix { dist: sub, n: k }
            }
            Backend::Line { coords } => Backend::Line {
                coords: keep.iter().map(|&i| coords[i]).collect(),
            },
            Backend::Grid { coords } => Backend::Grid {
                coords: keep.iter().map(|&i| coords[i]).collect(),
            },
            Backend::Capped { inner, m } => Backend::Capped {
                inner: Box::new(inner.restrict(keep)),
                m: *m,
            },
            Backend::Floored { inner, m } => Backend::Floored {
                inner: Box::new(inner.restrict(keep)),
                m: *m,
            },
        }
    }
}

/// A finite metric space: indexed points, a verified metric, and an optional
/// basepoint. Immutable after construction; all operations are pure.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    ids: Vec<PointId>,
    index: BTreeMap<PointId, usize>,
    backend: Backend,
    basepoint: Option<usize>,
}

fn build_index(ids: &[PointId]) -> Result<BTreeMap<PointId, usize>, MetricError> {
    let mut index = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(MetricError::DuplicatePoint { id: id.clone() });
        }
    }
    Ok(index)
}

fn default_ids(n: usize) -> Vec<PointId> {
    (0..n as i64).map(PointId::Int).collect()
}

impl FiniteMetricSpace {
    /// Builds a space from an explicit square distance matrix and verifies all
    /// metric axioms exhaustively (symmetry, positivity, zero diagonal, and
    /// the triangle inequality over all ordered triples).
    pub fn from_distance_matrix(
        ids: Option<Vec<PointId>>,
        matrix: &[Vec<f64>],
    ) -> Result<Self, MetricError> {
        let n = matrix.len();
        if n == 0 {
            return Err(MetricError::EmptySpace);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), n });
            }
        }
        let ids = ids.unwrap_or_else(|| default_ids(n));
        if ids.len() != n {
            return Err(MetricError::NotSquare { row: 0, len: ids.len(), n });
        }
        let index = build_index(&ids)?;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = matrix[i][j];
            }
        }
        let space = FiniteMetricSpace {
            ids,
            index,
            backend: Backend::Matrix { dist, n },
            basepoint: None,
        };
        space.verify_metric()?;
        Ok(space)
    }

    /// Builds the shortest-path metric of a connected, positively weighted
    /// graph and verifies it like [`Self::from_distance_matrix`].
    pub fn from_graph(
        vertices: Vec<PointId>,
        edges: &[(PointId, PointId, f64)],
    ) -> Result<Self, MetricError> {
        let n = vertices.len();
        if n == 0 {
            return Err(MetricError::EmptySpace);
        }
        let index = build_index(&vertices)?;
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (u, v, w) in edges {
            let ui = *index.get(u).ok_or(MetricError::UnknownVertex { id: u.clone() })?;
            let vi = *index.get(v).ok_or(MetricError::UnknownVertex { id: v.clone() })?;
            if *w <= 0.0 {
                return Err(MetricError::NonpositiveWeight {
                    from: u.clone(),
                    to: v.clone(),
                    weight: *w,
                });
            }
            adj[ui].push((vi, *w));
            adj[vi].push((ui, *w));
        }
        let mut dist = vec![f64::INFINITY; n * n];
        for src in 0..n {
            dijkstra(&adj, src, &mut dist[src * n..(src + 1) * n]);
        }
        for i in 0..n {
            for j in 0..n {
                if !dist[i * n + j].is_finite() {
                    return Err(MetricError::DisconnectedGraph {
                        from: vertices[i].clone(),
                        to: vertices[j].clone(),
                    });
                }
            }
        }
        let space = FiniteMetricSpace {
            ids: vertices,
            index,
            backend: Backend::Matrix { dist, n },
            basepoint: None,
        };
        space.verify_metric()?;
        Ok(space)
    }

    /// The integer interval `[a, b]` with d(x, y) = |x - y|.
    pub fn interval(a: i64, b: i64) -> Result<Self, MetricError> {
        if b < a {
            return Err(MetricError::EmptySpace);
        }
        let coords: Vec<i64> = (a..=b).collect();
        let ids: Vec<PointId> = coords.iter().map(|&x| PointId::Int(x)).collect();
        let index = build_index(&ids)?;
        Ok(FiniteMetricSpace {
            ids,
            index,
            backend: Backend::Line { coords },
            basepoint: None,
        })
    }

    /// Arbitrary integer points on the line, d(x, y) = |x - y|.
    pub fn line_points(coords: Vec<i64>) -> Result<Self, MetricError> {
        if coords.is_empty() {
            return Err(MetricError::EmptySpace);
        }
        let ids: Vec<PointId> = coords.iter().map(|&x| PointId::Int(x)).collect();
        let index = build_index(&ids)?;
        Ok(FiniteMetricSpace {
            ids,
            index,
            backend: Backend::Line { coords },
            basepoint: None,
        })
    }

    /// The integer box `[x0, x1] x [y0, y1]` under the sup metric.
    pub fn grid(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<Self, MetricError> {
        if x1 < x0 || y1 < y0 {
            return Err(MetricError::EmptySpace);
        }
        let mut coords = Vec::new();
        let mut ids = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                coords.push((x, y));
                ids.push(PointId::Name(format!("{x},{y}")));
            }
        }
        let index = build_index(&ids)?;
        Ok(FiniteMetricSpace {
            ids,
            index,
            backend: Backend::Grid { coords },
            basepoint: None,
        })
    }

    /// Truncates every distance above `m` down to `m` (the micro transform).
    /// The result is a metric: min(d, m) keeps symmetry, positivity, and the
    /// triangle inequality.
    pub fn micro_version(&self, m: f64) -> Result<Self, MetricError> {
        if m <= 0.0 {
            return Err(MetricError::NonpositiveM { m });
        }
        Ok(self.transformed(|b| Backend::Capped { inner: Box::new(b), m }))
    }

    /// Raises every nonzero distance below `m` up to `m` (the macro
    /// transform, an `m`-discretization). The result is a metric with no
    /// nonzero distance below `m`, and d <= d' <= d + m on all pairs.
    pub fn macro_version(&self, m: f64) -> Result<Self, MetricError> {
        if m <= 0.0 {
            return Err(MetricError::NonpositiveM { m });
        }
        Ok(self.transformed(|b| Backend::Floored { inner: Box::new(b), m }))
    }

    fn transformed(&self, wrap: impl FnOnce(Backend) -> Backend) -> Self {
        // Explicit matrices are rewritten in place; implicit backends are
        // wrapped so large spaces stay O(n) in memory.
        match &self.backend {
            Backend::Matrix { dist, n } => {
                let wrapped = wrap(Backend::Matrix { dist: dist.clone(), n: *n });
                let mut new_dist = vec![0.0; n * n];
                for i in 0..*n {
                    for j in 0..*n {
                        new_dist[i * n + j] = wrapped.eval(i, j);
                    }
                }
                FiniteMetricSpace {
                    ids: self.ids.clone(),
                    index: self.index.clone(),
                    backend: Backend::Matrix { dist: new_dist, n: *n },
                    basepoint: self.basepoint,
                }
            }
            other => FiniteMetricSpace {
                ids: self.ids.clone(),
                index: self.index.clone(),
                backend: wrap(other.clone()),
                basepoint: self.basepoint,
            },
        }
    }

    /// Restriction of the metric to a subset of point indices (order kept).
    pub fn subspace(&self, keep: &[usize]) -> Self {
        let ids: Vec<PointId> = keep.iter().map(|&i| self.ids[i].clone()).collect();
        let index = build_index(&ids).expect("subset of unique ids stays unique");
        let basepoint = self
            .basepoint
            .and_then(|b| keep.iter().position(|&i| i == b));
        FiniteMetricSpace {
            ids,
            index,
            backend: self.backend.restrict(keep),
            basepoint,
        }
    }

    pub fn with_basepoint(mut self, id: &PointId) -> Result<Self, MetricError> {
        let i = *self
            .index
            .get(id)
            .ok_or(MetricError::UnknownPoint { id: id.clone() })?;
        self.basepoint = Some(i);
        Ok(self)
    }

    pub fn with_basepoint_index(mut self, i: usize) -> Self {
        assert!(i < self.len());
        self.basepoint = Some(i);
        self
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &PointId {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &PointId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.backend.eval(i, j)
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = 0.0f64;
                for j in (i + 1)..n {
                    best = best.max(self.dist(i, j));
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Smallest nonzero distance.
    pub fn min_positive_distance(&self) -> f64 {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = f64::INFINITY;
                for j in (i + 1)..n {
                    best = best.min(self.dist(i, j));
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// Open ball {y : d(center, y) < r}, as sorted point indices.
    pub fn ball(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.dist(center, j) < r)
            .collect()
    }

    /// Open ball around a point given by id.
    pub fn ball_by_id(&self, center: &PointId, r: f64) -> Result<Vec<usize>, MetricError> {
        let c = self
            .index_of(center)
            .ok_or(MetricError::UnknownPoint { id: center.clone() })?;
        Ok(self.ball(c, r))
    }

    /// Distance from a point to a set, `inf` over an empty set.
    pub fn dist_to_set(&self, i: usize, set: &[usize]) -> f64 {
        set.iter()
            .map(|&j| self.dist(i, j))
            .fold(f64::INFINITY, f64::min)
    }

    /// A quick lower bound on the distance between two index sets, used to
    /// skip full scans. `None` means no structural bound is available.
    pub(crate) fn set_gap_lower_bound(&self, a: &[usize], b: &[usize]) -> Option<f64> {
        fn bound(backend: &Backend, a: &[usize], b: &[usize]) -> Option<f64> {
            match backend {
                Backend::Line { coords } => {
                    let (a_min, a_max) = range(coords, a);
                    let (b_min, b_max) = range(coords, b);
                    Some(gap(a_min, a_max, b_min, b_max) as f64)
                }
                Backend::Grid { coords } => {
                    let ax = range_by(coords, a, |p| p.0);
                    let ay = range_by(coords, a, |p| p.1);
                    let bx = range_by(coords, b, |p| p.0);
                    let by = range_by(coords, b, |p| p.1);
                    let gx = gap(ax.0, ax.1, bx.0, bx.1);
                    let gy = gap(ay.0, ay.1, by.0, by.1);
                    Some(gx.max(gy) as f64)
                }
                Backend::Capped { inner, m } => bound(inner, a, b).map(|g| g.min(*m)),
                Backend::Floored { inner, m } => bound(inner, a, b).map(|g| g.max(*m)),
                Backend::Matrix { .. } => None,
            }
        }
        fn range(coords: &[i64], set: &[usize]) -> (i64, i64) {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for &i in set {
                lo = lo.min(coords[i]);
                hi = hi.max(coords[i]);
            }
            (lo, hi)
        }
        fn range_by(coords: &[(i64, i64)], set: &[usize], f: impl Fn(&(i64, i64)) -> i64) -> (i64, i64) {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for &i in set {
                lo = lo.min(f(&coords[i]));
                hi = hi.max(f(&coords[i]));
            }
            (lo, hi)
        }
        fn gap(a_lo: i64, a_hi: i64, b_lo: i64, b_hi: i64) -> i64 {
            if a_hi < b_lo {
                b_lo - a_hi
            } else if b_hi < a_lo {
                a_lo - b_hi
            } else {
                0
            }
        }
        if a.is_empty() || b.is_empty() {
            return Some(f64::INFINITY);
        }
        bound(&self.backend, a, b)
    }

    /// Integer coordinates when the space lives on the line, in point order.
    pub fn line_coords(&self) -> Option<&[i64]> {
        match &self.backend {
            Backend::Line { coords } => Some(coords),
            _ => None,
        }
    }

    /// Integer coordinates when the space is a sup-metric grid.
    pub fn grid_coords(&self) -> Option<&[(i64, i64)]> {
        match &self.backend {
            Backend::Grid { coords } => Some(coords),
            _ => None,
        }
    }

    /// Exhaustive check of all metric axioms: O(n^2) for symmetry and
    /// positivity, O(n^3) over ordered triples for the triangle inequality.
    pub fn verify_metric(&self) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            let d = self.dist(i, i);
            if d.abs() > TOL {
                return Err(MetricError::NonzeroDiagonal { i, value: d });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let f = self.dist(i, j);
                let b = self.dist(j, i);
                if f < 0.0 || b < 0.0 {
                    let (i, j, value) = if f < 0.0 { (i, j, f) } else { (j, i, b) };
                    return Err(MetricError::NegativeDistance { i, j, value });
                }
                if (f - b).abs() > TOL {
                    return Err(MetricError::AsymmetricMatrix { i, j, forward: f, backward: b });
                }
                if f <= TOL {
                    return Err(MetricError::ZeroDistance { i, j });
                }
            }
        }
        let violation = (0..n)
            .into_par_iter()
            .map(|i| {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let dij = self.dist(i, j);
                    for k in 0..n {
                        if k == i || k == j {
                            continue;
                        }
                        let direct = self.dist(i, k);
                        let via = dij + self.dist(j, k);
                        if direct > via + TOL {
                            return Some(MetricError::TriangleViolation { i, j, k, direct, via });
                        }
                    }
                }
                None
            })
            .find_first(|r| r.is_some())
            .flatten();
        match violation {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Shared handle constructor; covers and functions hold spaces by `Arc`.
    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize, out: &mut [f64]) {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            // min-heap on cost, ties on node id for determinism
            other
                .0
                .total_cmp(&self.0)
                .then_with(|| other.1.cmp(&self.1))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    for d in out.iter_mut() {
        *d = f64::INFINITY;
    }
    out[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, src));
    while let Some(Entry(cost, node)) = heap.pop() {
        if cost > out[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let nc = cost + w;
            if nc < out[next] {
                out[next] = nc;
                heap.push(Entry(nc, next));
            }
        }
    }
}

/// Two covers/functions only interoperate when built over the same space.
/// Pointer equality is the fast path; structurally equal spaces also match.
pub fn same_space(a: &Arc<FiniteMetricSpace>, b: &Arc<FiniteMetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_space() {
        let s = FiniteMetricSpace::from_distance_matrix(None, &[vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dist(0, 1), 1.0);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let err = FiniteMetricSpace::from_distance_matrix(None, &[vec![0.0, 1.0], vec![2.0, 0.0]])
            .unwrap_err();
        assert!(matches!(err, MetricError::AsymmetricMatrix { i: 0, j: 1, .. }));
    }

    #[test]
    fn triangle_violation_witness() {
        let m = [
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        let err = FiniteMetricSpace::from_distance_matrix(None, &m).unwrap_err();
        match err {
            MetricError::TriangleViolation { i, j, k, direct, via } => {
                assert_eq!((i.min(k), j, i.max(k)), (0, 1, 2));
                assert_eq!(direct, 3.0);
                assert_eq!(via, 2.0);
            }
            other => panic!("expected triangle violation, got {other:?}"),
        }
    }

    #[test]
    fn path_graph_metric() {
        let ids: Vec<PointId> = (0..3).map(PointId::Int).collect();
        let edges = vec![
            (PointId::Int(0), PointId::Int(1), 1.0),
            (PointId::Int(1), PointId::Int(2), 1.0),
        ];
        let s = FiniteMetricSpace::from_graph(ids, &edges).unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
    }

    #[test]
    fn heavy_edge_shortcut() {
        let ids: Vec<PointId> = (0..3).map(PointId::Int).collect();
        let edges = vec![
            (PointId::Int(0), PointId::Int(1), 1.0),
            (PointId::Int(1), PointId::Int(2), 1.0),
            (PointId::Int(0), PointId::Int(2), 3.0),
        ];
        let s = FiniteMetricSpace::from_graph(ids, &edges).unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
    }

    #[test]
    fn disconnected_graph_rejected() {
        let ids: Vec<PointId> = (0..3).map(PointId::Int).collect();
        let edges = vec![(PointId::Int(0), PointId::Int(1), 1.0)];
        let err = FiniteMetricSpace::from_graph(ids, &edges).unwrap_err();
        assert!(matches!(err, MetricError::DisconnectedGraph { .. }));
    }

    #[test]
    fn micro_truncates_above_m() {
        let m = [
            vec![0.0, 5.0, 2.0],
            vec![5.0, 0.0, 4.0],
            vec![2.0, 4.0, 0.0],
        ];
        let s = FiniteMetricSpace::from_distance_matrix(None, &m).unwrap();
        let micro = s.micro_version(3.0).unwrap();
        assert_eq!(micro.dist(0, 1), 3.0);
        assert_eq!(micro.dist(0, 2), 2.0);
        micro.verify_metric().unwrap();
    }

    #[test]
    fn micro_idempotent_on_distances() {
        let s = FiniteMetricSpace::interval(0, 12).unwrap();
        let once = s.micro_version(4.0).unwrap();
        let twice = once.micro_version(4.0).unwrap();
        for i in 0..s.len() {
            for j in 0..s.len() {
                assert_eq!(once.dist(i, j), twice.dist(i, j));
            }
        }
    }

    #[test]
    fn macro_discretizes_below_m() {
        let m = [vec![0.0, 0.5], vec![0.5, 0.0]];
        let s = FiniteMetricSpace::from_distance_matrix(None, &m).unwrap();
        let mac = s.macro_version(1.0).unwrap();
        assert_eq!(mac.dist(0, 1), 1.0);
        mac.verify_metric().unwrap();
        let far = [vec![0.0, 7.0], vec![7.0, 0.0]];
        let s = FiniteMetricSpace::from_distance_matrix(None, &far).unwrap();
        assert_eq!(s.macro_version(1.0).unwrap().dist(0, 1), 7.0);
    }

    #[test]
    fn macro_is_coarsely_close() {
        let s = FiniteMetricSpace::interval(0, 20).unwrap();
        let mac = s.macro_version(2.5).unwrap();
        for i in 0..s.len() {
            for j in 0..s.len() {
                let d = s.dist(i, j);
                let dm = mac.dist(i, j);
                assert!(d <= dm + TOL && dm <= d + 2.5 + TOL);
                if i != j {
                    assert!(dm >= 2.5 - TOL);
                }
            }
        }
    }

    #[test]
    fn nonpositive_scale_rejected() {
        let s = FiniteMetricSpace::interval(0, 3).unwrap();
        assert!(matches!(
            s.micro_version(0.0),
            Err(MetricError::NonpositiveM { .. })
        ));
        assert!(matches!(
            s.macro_version(-1.0),
            Err(MetricError::NonpositiveM { .. })
        ));
    }

    #[test]
    fn open_ball_convention() {
        let s = FiniteMetricSpace::interval(0, 9).unwrap();
        assert_eq!(s.ball(5, 2.0), vec![4, 5, 6]);
        assert_eq!(s.ball(5, 0.0), Vec::<usize>::new());
        assert_eq!(s.ball(5, s.diameter() + 1.0).len(), 10);
    }

    #[test]
    fn grid_sup_metric() {
        let s = FiniteMetricSpace::grid(0, 3, 0, 3).unwrap();
        let a = s.index_of(&PointId::Name("0,0".into())).unwrap();
        let b = s.index_of(&PointId::Name("3,2".into())).unwrap();
        assert_eq!(s.dist(a, b), 3.0);
    }

    #[test]
    fn subspace_preserves_distances() {
        let s = FiniteMetricSpace::interval(0, 9).unwrap();
        let sub = s.subspace(&[2, 5, 9]);
        assert_eq!(sub.len(), 3);
        assert_eq!(sub.dist(0, 2), 7.0);
        assert_eq!(sub.id(1), &PointId::Int(5));
    }
}
