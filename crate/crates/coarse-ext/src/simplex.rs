//! Barycentric coordinates on the standard simplex with the l1 metric.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("simplex point needs at least one coordinate")]
    EmptyCoords,
    #[error("coordinate {index} is negative: {value}")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("coordinates sum to {sum}, expected 1")]
    SumViolation { sum: f64 },
    #[error("dimension mismatch: {left} vs {right} coordinates")]
    DimensionMismatch { left: usize, right: usize },
}

/// A point of the standard simplex, stored as barycentric coordinates.
/// Coordinates are nonnegative and sum to 1, both within [`TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = SimplexError;
    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        SimplexPoint::new(coords)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Vec<f64> {
        p.coords
    }
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, SimplexError> {
        if coords.is_empty() {
            return Err(SimplexError::EmptyCoords);
        }
        for (index, &value) in coords.iter().enumerate() {
            if value < -TOL {
                return Err(SimplexError::NegativeCoordinate { index, value });
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(SimplexError::SumViolation { sum });
        }
        Ok(SimplexPoint { coords })
    }

    /// The k-th vertex of the simplex with `len` coordinates.
    pub fn vertex(k: usize, len: usize) -> Self {
        assert!(k < len, "vertex index out of range");
        let mut coords = vec![0.0; len];
        coords[k] = 1.0;
        SimplexPoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn min_coord(&self) -> f64 {
        self.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// A point lies on the simplex boundary exactly when some coordinate
    /// vanishes (within tolerance).
    pub fn is_boundary(&self) -> bool {
        self.min_coord() <= TOL
    }
}

/// l1 distance between two barycentric coordinate vectors.
pub fn l1_distance(p: &SimplexPoint, q: &SimplexPoint) -> Result<f64, SimplexError> {
    if p.len() != q.len() {
        return Err(SimplexError::DimensionMismatch { left: p.len(), right: q.len() });
    }
    Ok(l1_distance_raw(p.coords(), q.coords()))
}

/// l1 distance between raw coordinate slices of equal length.
pub fn l1_distance_raw(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opposite_vertices_at_distance_two() {
        let p = SimplexPoint::vertex(0, 2);
        let q = SimplexPoint::vertex(1, 2);
        assert_eq!(l1_distance(&p, &q).unwrap(), 2.0);
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn shifted_mass_distance() {
        let p = SimplexPoint::new(vec![0.5, 0.5, 0.0]).unwrap();
        let q = SimplexPoint::new(vec![0.0, 0.5, 0.5]).unwrap();
        assert!((l1_distance(&p, &q).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn rejects_bad_coordinates() {
        assert!(matches!(
            SimplexPoint::new(vec![0.7, 0.7]),
            Err(SimplexError::SumViolation { .. })
        ));
        assert!(matches!(
            SimplexPoint::new(vec![1.2, -0.2]),
            Err(SimplexError::NegativeCoordinate { .. })
        ));
        assert!(matches!(
            SimplexPoint::new(vec![]),
            Err(SimplexError::EmptyCoords)
        ));
    }

    #[test]
    fn boundary_detection() {
        assert!(SimplexPoint::new(vec![1.0, 0.0]).unwrap().is_boundary());
        assert!(!SimplexPoint::new(vec![0.4, 0.6]).unwrap().is_boundary());
        let interior = SimplexPoint::new(vec![1.0 / 3.0; 3]).unwrap();
        assert!(!interior.is_boundary());
    }

    #[test]
    fn dimension_mismatch_detected() {
        let p = SimplexPoint::vertex(0, 2);
        let q = SimplexPoint::vertex(0, 3);
        assert!(matches!(
            l1_distance(&p, &q),
            Err(SimplexError::DimensionMismatch { .. })
        ));
    }
}
