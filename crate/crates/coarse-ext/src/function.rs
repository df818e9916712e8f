//! Total maps from a finite metric space into real vectors or simplex
//! coordinates, with an explicit target metric.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::FiniteMetricSpace;
use crate::simplex::{l1_distance_raw, SimplexError, SimplexPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("function needs one value per point: got {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("value at point {point} has {got} coordinates, expected {expected}")]
    RaggedValue { point: usize, got: usize, expected: usize },
    #[error("value at point {point} is not a simplex point: {source}")]
    NotSimplex { point: usize, source: SimplexError },
}

/// Metric on the target of a [`PointFunction`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetMetric {
    L1,
    L2,
}

impl TargetMetric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            TargetMetric::L1 => l1_distance_raw(a, b),
            TargetMetric::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// A total map from the points of a space to fixed-length real vectors.
#[derive(Clone, Debug)]
pub struct PointFunction {
    space: Arc<FiniteMetricSpace>,
    values: Vec<Vec<f64>>,
    target: TargetMetric,
}

impl PointFunction {
    pub fn new(
        space: Arc<FiniteMetricSpace>,
        values: Vec<Vec<f64>>,
        target: TargetMetric,
    ) -> Result<Self, FunctionError> {
        if values.len() != space.len() {
            return Err(FunctionError::WrongLength { got: values.len(), expected: space.len() });
        }
        let dim = values.first().map(|v| v.len()).unwrap_or(0);
        for (point, v) in values.iter().enumerate() {
            if v.len() != dim {
                return Err(FunctionError::RaggedValue { point, got: v.len(), expected: dim });
            }
        }
        Ok(PointFunction { space, values, target })
    }

    /// Scalar-valued function under the absolute-value metric.
    pub fn scalar(space: Arc<FiniteMetricSpace>, values: Vec<f64>) -> Self {
        let values = values.into_iter().map(|v| vec![v]).collect();
        PointFunction { space, values, target: TargetMetric::L2 }
    }

    /// Simplex-valued function under the l1 metric.
    pub fn simplex(
        space: Arc<FiniteMetricSpace>,
        values: Vec<SimplexPoint>,
    ) -> Result<Self, FunctionError> {
        let values: Vec<Vec<f64>> = values.into_iter().map(Vec::from).collect();
        let mut f = PointFunction::new(space, values, TargetMetric::L1)?;
        f.target = TargetMetric::L1;
        Ok(f)
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn target(&self) -> TargetMetric {
        self.target
    }

    pub fn value(&self, point: usize) -> &[f64] {
        &self.values[point]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value_dim(&self) -> usize {
        self.values.first().map(|v| v.len()).unwrap_or(0)
    }

    pub fn scalar_value(&self, point: usize) -> f64 {
        debug_assert_eq!(self.value_dim(), 1);
        self.values[point][0]
    }

    pub fn simplex_value(&self, point: usize) -> Result<SimplexPoint, FunctionError> {
        SimplexPoint::new(self.values[point].clone())
            .map_err(|source| FunctionError::NotSimplex { point, source })
    }

    /// Distance between two image points in the target metric.
    pub fn target_distance(&self, i: usize, j: usize) -> f64 {
        self.target.distance(&self.values[i], &self.values[j])
    }

    /// Largest target distance over all pairs (diameter of the image).
    pub fn image_diameter(&self) -> f64 {
        let n = self.space.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.target_distance(i, j));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_distances_are_absolute_differences() {
        let space = FiniteMetricSpace::interval(0, 3).unwrap().into_arc();
        let f = PointFunction::scalar(space, vec![0.0, 1.0, 4.0, 9.0]);
        assert_eq!(f.target_distance(1, 3), 8.0);
        assert_eq!(f.image_diameter(), 9.0);
    }

    #[test]
    fn length_mismatch_rejected() {
        let space = FiniteMetricSpace::interval(0, 3).unwrap().into_arc();
        assert!(matches!(
            PointFunction::new(space, vec![vec![0.0]; 3], TargetMetric::L2),
            Err(FunctionError::WrongLength { .. })
        ));
    }

    #[test]
    fn simplex_functions_use_l1() {
        let space = FiniteMetricSpace::interval(0, 1).unwrap().into_arc();
        let f = PointFunction::simplex(
            space,
            vec![SimplexPoint::vertex(0, 2), SimplexPoint::vertex(1, 2)],
        )
        .unwrap();
        assert_eq!(f.target_distance(0, 1), 2.0);
    }
}
