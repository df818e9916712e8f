//! Nerve complexes of covers and the barycentric map into the nerve.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cover::{Cover, LebValue};
use crate::function::{FunctionError, PointFunction, TargetMetric};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NerveError {
    #[error("cover has zero Lebesgue number; barycentric weights would vanish")]
    ZeroLebesgue,
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// The simplicial complex on cover member indices whose simplices are the
/// index sets with nonempty common intersection. Downward closed; a vertex is
/// present exactly when its member is nonempty.
#[derive(Clone, Debug, Serialize)]
pub struct NerveComplex {
    pub vertices: Vec<usize>,
    pub simplices: Vec<Vec<usize>>,
    pub dimension: usize,
}

impl NerveComplex {
    pub fn contains_simplex(&self, simplex: &[usize]) -> bool {
        self.simplices.contains(&simplex.to_vec())
    }
}

/// Enumerates the nerve exactly. Every subset of a point's membership list is
/// a simplex, and all simplices arise this way, so the complex dimension
/// equals the cover dimension.
pub fn nerve_of(cover: &Cover) -> NerveComplex {
    let membership = cover.membership();
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    for list in &membership {
        // all nonempty subsets of the membership list
        let k = list.len();
        for mask in 1u64..(1 << k) {
            let simplex: Vec<usize> = (0..k)
                .filter(|&b| mask & (1 << b) != 0)
                .map(|b| list[b])
                .collect();
            simplices.insert(simplex);
        }
    }
    let vertices: Vec<usize> = (0..cover.member_count())
        .filter(|&m| !cover.member(m).is_empty())
        .collect();
    let dimension = simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0);
    NerveComplex { vertices, simplices: simplices.into_iter().collect(), dimension }
}

/// The barycentric map of a cover: normalized distance-to-complement weights
/// phi_i(x) = f_i(x) / sum_j f_j(x) with f_i(x) = dist(x, complement of U_i).
///
/// Whole-space members would give infinite weights; their distance to the
/// (empty) complement is capped at diameter + 1 so the map stays defined.
/// The support of phi(x) is always a simplex of the nerve, and the map is
/// l1-Lipschitz with constant at most 4 m^2 / Leb for finite Lebesgue number
/// Leb and multiplicity m.
pub fn barycentric_map(cover: &Cover) -> Result<PointFunction, NerveError> {
    let leb = cover.lebesgue_number();
    if let LebValue::Finite(v) = leb.value {
        if v <= 0.0 {
            return Err(NerveError::ZeroLebesgue);
        }
    }
    let space = cover.space().clone();
    let cap = space.diameter() + 1.0;
    let n = space.len();
    let k = cover.member_count();
    let complements: Vec<Vec<usize>> = (0..k)
        .map(|mi| (0..n).filter(|p| !cover.member(mi).contains(p)).collect())
        .collect();
    let values: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|x| {
                let mut weights = Vec::with_capacity(k);
                let mut total = 0.0;
                for mi in 0..k {
                    let w = if !cover.member(mi).contains(&x) {
                        0.0
                    } else if complements[mi].is_empty() {
                        cap
                    } else {
                        let mut d = cap;
                        for &y in &complements[mi] {
                            d = d.min(space.dist(x, y));
                        }
                        d
                    };
                    total += w;
                    weights.push(w);
                }
                for w in &mut weights {
                    *w /= total;
                }
                weights
            })
            .collect()
    };
    Ok(PointFunction::new(space, values, TargetMetric::L1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{FiniteMetricSpace, TOL};

    fn cover_on_interval(b: i64, members: &[(i64, i64)]) -> Cover {
        let space = FiniteMetricSpace::interval(0, b).unwrap().into_arc();
        let sets = members
            .iter()
            .map(|&(lo, hi)| (lo..=hi).map(|x| x as usize).collect())
            .collect();
        Cover::new(space, sets).unwrap()
    }

    #[test]
    fn overlapping_pair_nerve() {
        let cover = cover_on_interval(2, &[(0, 1), (1, 2)]);
        let nerve = nerve_of(&cover);
        assert_eq!(nerve.vertices, vec![0, 1]);
        assert!(nerve.contains_simplex(&[0, 1]));
        assert_eq!(nerve.dimension, 1);
    }

    #[test]
    fn disjoint_members_give_zero_dimensional_nerve() {
        let cover = cover_on_interval(3, &[(0, 1), (2, 3)]);
        let nerve = nerve_of(&cover);
        assert_eq!(nerve.dimension, 0);
        assert!(!nerve.contains_simplex(&[0, 1]));
    }

    #[test]
    fn chain_has_edges_but_no_triangle() {
        let cover = cover_on_interval(3, &[(0, 1), (1, 2), (2, 3)]);
        let nerve = nerve_of(&cover);
        assert!(nerve.contains_simplex(&[0, 1]));
        assert!(nerve.contains_simplex(&[1, 2]));
        assert!(!nerve.contains_simplex(&[0, 2]));
        assert!(!nerve.contains_simplex(&[0, 1, 2]));
        assert_eq!(nerve.dimension, cover.dimension());
    }

    #[test]
    fn barycentric_weights_at_midpoint() {
        let cover = cover_on_interval(9, &[(0, 6), (4, 9)]);
        let phi = barycentric_map(&cover).unwrap();
        // at x=5: f = (2, 2), phi = (1/2, 1/2)
        assert!((phi.value(5)[0] - 0.5).abs() < TOL);
        assert!((phi.value(5)[1] - 0.5).abs() < TOL);
        // at x=0: only member 0 contains it
        assert!((phi.value(0)[0] - 1.0).abs() < TOL);
        assert_eq!(phi.value(0)[1], 0.0);
    }

    #[test]
    fn weights_form_simplex_points_supported_on_nerve() {
        let cover = cover_on_interval(9, &[(0, 6), (4, 9), (8, 9)]);
        let phi = barycentric_map(&cover).unwrap();
        let nerve = nerve_of(&cover);
        for x in 0..10 {
            let p = phi.simplex_value(x).unwrap();
            let support: Vec<usize> = p
                .coords()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > TOL)
                .map(|(i, _)| i)
                .collect();
            assert!(nerve.contains_simplex(&support), "support {support:?} at {x}");
            for (mi, &c) in p.coords().iter().enumerate() {
                if c > TOL {
                    assert!(cover.member(mi).contains(&x));
                }
            }
        }
    }

    #[test]
    fn coordinate_weights_are_one_lipschitz() {
        let cover = cover_on_interval(9, &[(0, 6), (4, 9)]);
        let space = cover.space().clone();
        let cap = space.diameter() + 1.0;
        for mi in 0..2 {
            for i in 0..10 {
                for j in 0..10 {
                    let fi = cover.dist_to_complement(mi, i).min(cap);
                    let fj = cover.dist_to_complement(mi, j).min(cap);
                    assert!((fi - fj).abs() <= space.dist(i, j) + TOL);
                }
            }
        }
    }

    #[test]
    fn lipschitz_bound_on_small_cover() {
        let cover = cover_on_interval(9, &[(0, 6), (4, 9)]);
        let phi = barycentric_map(&cover).unwrap();
        let leb = cover.lebesgue_number().value.as_f64();
        let m = cover.multiplicity() as f64;
        let bound = 4.0 * m * m / leb;
        let n = 10;
        for i in 0..n {
            for j in (i + 1)..n {
                let ratio = phi.target_distance(i, j) / cover.space().dist(i, j);
                assert!(ratio <= bound + TOL, "ratio {ratio} exceeds {bound}");
            }
        }
    }

    #[test]
    fn whole_space_member_is_capped() {
        let cover = cover_on_interval(4, &[(0, 4), (1, 2)]);
        let phi = barycentric_map(&cover).unwrap();
        for x in 0..5 {
            let p = phi.simplex_value(x).unwrap();
            assert!(p.coords()[0] > 0.0);
        }
    }
}
