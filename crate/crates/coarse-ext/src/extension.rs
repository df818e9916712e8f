//! Lipschitz extension machinery: exhaustive Lipschitz verification, McShane
//! extension, Euclidean projection onto the simplex, simplex-valued extension
//! with an explicit constant, the boundary-valued (sphere) extension pipeline,
//! and the dual construction that refines a cover through such an extension.
//!
//! Every pipeline verifies its claimed bounds exhaustively before returning
//! and fails closed when a bound does not hold.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::asdim::RefinerOracle;
use crate::cover::{Cover, CoverError, LebValue};
use crate::function::{FunctionError, PointFunction, TargetMetric};
use crate::metric::{FiniteMetricSpace, TOL};
use crate::nerve::{barycentric_map, NerveError};
use crate::simplex::{l1_distance_raw, SimplexPoint};

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("A must be nonempty")]
    EmptyA,
    #[error("values on A are not {lambda}-Lipschitz: pair ({a}, {b}) needs {needed}")]
    NotLipschitzOnA { a: usize, b: usize, lambda: f64, needed: f64 },
    #[error("point {point} of A carries a non-boundary value")]
    InputNotBoundary { point: usize },
    #[error("space is not 1-discrete (minimum positive distance {min_dist}); apply the macro transform first")]
    NotOneDiscrete { min_dist: f64 },
    #[error("intermediate cover has Lebesgue number {actual}, below the required {required} (critical point {witness:?})")]
    LebesgueAssertionFailed { required: f64, actual: f64, witness: Option<usize> },
    #[error("refiner failed: {0}")]
    RefinerFailed(String),
    #[error("extension disagrees with the data on A at point {point} (l1 error {error})")]
    AgreementFailed { point: usize, error: f64 },
    #[error("extension value at point {point} is not on the simplex boundary (min coord {min_coord}, sum {sum})")]
    BoundaryViolation { point: usize, min_coord: f64, sum: f64 },
    #[error("Lipschitz bound {bound} violated: pair ({a}, {b}) has ratio {ratio}")]
    LipschitzBoundViolation { bound: f64, a: usize, b: usize, ratio: f64 },
    #[error("cover Lebesgue number is too small or infinite: {detail}")]
    LebesgueTooSmall { detail: String },
    #[error("extender failed: {0}")]
    ExtenderFailed(String),
    #[error("verification failed: {check}")]
    VerificationFailed { check: String },
    #[error("epsilon {epsilon} must lie strictly between 0 and the target diameter bound {m}")]
    EpsilonNotBelowM { epsilon: f64, m: f64 },
    #[error("modulus table has no sample point at or above {at}")]
    AlphaUndefined { at: f64 },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
}

/// Outcome of an exhaustive affine-Lipschitz check: whether
/// d(f(x), f(y)) <= lambda d(x, y) + c held on all pairs, with the pair
/// maximizing (d(f(x), f(y)) - c) / d(x, y).
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzReport {
    pub lambda: f64,
    pub c: f64,
    pub satisfied: bool,
    pub worst_pair: Option<(usize, usize)>,
    pub worst_ratio: f64,
}

/// Checks d(f(x), f(y)) <= lambda d(x, y) + c over all unordered pairs.
pub fn check_lipschitz(f: &PointFunction, lambda: f64, c: f64) -> LipschitzReport {
    let n = f.space().len();
    let space = f.space();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst: Option<(f64, (usize, usize), bool)> = None;
            for j in (i + 1)..n {
                let d = space.dist(i, j);
                let t = f.target_distance(i, j);
                let ratio = (t - c) / d;
                let violated = t > lambda * d + c + TOL;
                match &mut worst {
                    Some((r, pair, v)) => {
                        if ratio > *r {
                            *r = ratio;
                            *pair = (i, j);
                        }
                        *v = *v || violated;
                    }
                    None => worst = Some((ratio, (i, j), violated)),
                }
            }
            worst
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some((ra, pa, va)), Some((rb, pb, vb))) => {
                    let (r, p) = if rb > ra || (rb == ra && pb < pa) {
                        (rb, pb)
                    } else {
                        (ra, pa)
                    };
                    Some((r, p, va || vb))
                }
            },
        );
    match best {
        Some((ratio, pair, violated)) => LipschitzReport {
            lambda,
            c,
            satisfied: !violated,
            worst_pair: Some(pair),
            worst_ratio: ratio.max(0.0),
        },
        None => LipschitzReport { lambda, c, satisfied: true, worst_pair: None, worst_ratio: 0.0 },
    }
}

fn check_values_lipschitz(
    space: &FiniteMetricSpace,
    points: &[usize],
    value: impl Fn(usize) -> Vec<f64>,
    metric: TargetMetric,
    lambda: f64,
    c: f64,
) -> Result<(), ExtensionError> {
    for (ai, &a) in points.iter().enumerate() {
        let va = value(a);
        for &b in &points[ai + 1..] {
            let vb = value(b);
            let d = space.dist(a, b);
            let t = metric.distance(&va, &vb);
            if t > lambda * d + c + TOL {
                return Err(ExtensionError::NotLipschitzOnA {
                    a,
                    b,
                    lambda,
                    needed: (t - c) / d,
                });
            }
        }
    }
    Ok(())
}

/// Largest lambda-Lipschitz extension of scalar data on A, evaluated as
/// g(x) = min over a in A of (values(a) + lambda d(x, a)), then clamped.
pub fn mcshane_extend(
    space: &Arc<FiniteMetricSpace>,
    a: &BTreeSet<usize>,
    values: &BTreeMap<usize, f64>,
    lambda: f64,
    clamp: Option<(f64, f64)>,
) -> Result<PointFunction, ExtensionError> {
    if a.is_empty() {
        return Err(ExtensionError::EmptyA);
    }
    let pts: Vec<usize> = a.iter().copied().collect();
    check_values_lipschitz(
        space,
        &pts,
        |p| vec![values[&p]],
        TargetMetric::L2,
        lambda,
        0.0,
    )?;
    let out: Vec<f64> = (0..space.len())
        .map(|x| {
            let mut g = f64::INFINITY;
            for &p in &pts {
                g = g.min(values[&p] + lambda * space.dist(x, p));
            }
            match clamp {
                Some((lo, hi)) => g.clamp(lo, hi),
                None => g,
            }
        })
        .collect();
    Ok(PointFunction::scalar(space.clone(), out))
}

/// Euclidean nearest point of the standard simplex, by sorting and
/// thresholding. Idempotent on simplex points and 1-Lipschitz in l2.
pub fn project_to_simplex(v: &[f64]) -> SimplexPoint {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (i as f64 + 1.0);
        if u > candidate {
            theta = candidate;
        }
    }
    let coords: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    SimplexPoint::new(coords).expect("thresholded vector lies on the simplex")
}

/// Extends simplex-valued lambda-Lipschitz data on A to the whole space with
/// constant (m+2) lambda in l1: coordinatewise McShane extension followed by
/// Euclidean projection back onto the simplex. The bound is verified
/// exhaustively before returning.
pub fn simplex_extend(
    space: &Arc<FiniteMetricSpace>,
    a: &BTreeSet<usize>,
    f: &BTreeMap<usize, SimplexPoint>,
    lambda: f64,
) -> Result<PointFunction, ExtensionError> {
    if a.is_empty() {
        return Err(ExtensionError::EmptyA);
    }
    let pts: Vec<usize> = a.iter().copied().collect();
    let dim = f[&pts[0]].len();
    check_values_lipschitz(
        space,
        &pts,
        |p| f[&p].coords().to_vec(),
        TargetMetric::L1,
        lambda,
        0.0,
    )?;
    let n = space.len();
    let mut raw = vec![vec![0.0; dim]; n];
    for coord in 0..dim {
        for (x, row) in raw.iter_mut().enumerate() {
            let mut g = f64::INFINITY;
            for &p in &pts {
                g = g.min(f[&p].coords()[coord] + lambda * space.dist(x, p));
            }
            row[coord] = g;
        }
    }
    let values: Vec<Vec<f64>> = raw
        .into_iter()
        .map(|row| Vec::from(project_to_simplex(&row)))
        .collect();
    let g = PointFunction::new(space.clone(), values, TargetMetric::L1)?;
    for &p in &pts {
        let err = l1_distance_raw(g.value(p), f[&p].coords());
        if err > TOL {
            return Err(ExtensionError::AgreementFailed { point: p, error: err });
        }
    }
    let bound = (dim as f64) * lambda;
    let report = check_lipschitz(&g, bound, 0.0);
    if !report.satisfied {
        let (a, b) = report.worst_pair.unwrap_or((0, 0));
        return Err(ExtensionError::LipschitzBoundViolation {
            bound,
            a,
            b,
            ratio: report.worst_ratio,
        });
    }
    Ok(g)
}

/// Per-stage evidence from the boundary-extension pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct SphereCert {
    pub m: usize,
    pub delta: f64,
    pub extension_constant: f64,
    pub lip_g_measured: f64,
    pub lip_g_bound: f64,
    pub intermediate_lebesgue: f64,
    pub intermediate_lebesgue_required: f64,
    pub refiner_name: String,
    pub refiner_lebesgue: f64,
    pub refiner_multiplicity: usize,
    pub lip_phi_measured: f64,
    pub lip_h_measured: f64,
    pub lip_h_bound: f64,
    pub agreement_checked: bool,
    pub boundary_checked: bool,
}

/// Extends boundary-valued (delta, delta)-Lipschitz data on A over a
/// 1-discrete space, keeping values on the simplex boundary.
///
/// The pipeline extends into the solid simplex with constant C = m+2, builds
/// the depth function alpha from the minimum coordinate, carves the
/// intermediate cover where a coordinate exceeds the minimum, refines it to
/// multiplicity m+1 through the supplied oracle, and splices the radial
/// projection with the barycentric map of the refined cover. The intermediate
/// Lebesgue bound 1/(24 delta C (m+2)) and the final Lipschitz bound
/// (m+2)^3 (82 C + 4) delta are asserted; violations are errors, not results.
pub fn sphere_extend(
    space: &Arc<FiniteMetricSpace>,
    a: &BTreeSet<usize>,
    f: &BTreeMap<usize, SimplexPoint>,
    delta: f64,
    refiner: &RefinerOracle,
) -> Result<(PointFunction, SphereCert), ExtensionError> {
    if a.is_empty() {
        return Err(ExtensionError::EmptyA);
    }
    let pts: Vec<usize> = a.iter().copied().collect();
    let dim = f[&pts[0]].len();
    let m = dim - 2;
    let c_const = dim as f64;
    for &p in &pts {
        if !f[&p].is_boundary() {
            return Err(ExtensionError::InputNotBoundary { point: p });
        }
    }
    let min_dist = space.min_positive_distance();
    if min_dist < 1.0 - TOL {
        return Err(ExtensionError::NotOneDiscrete { min_dist });
    }
    // (delta, delta)-Lipschitz data on a 1-discrete space is 2 delta-Lipschitz.
    check_values_lipschitz(
        space,
        &pts,
        |p| f[&p].coords().to_vec(),
        TargetMetric::L1,
        delta,
        delta,
    )
    .map_err(|e| match e {
        ExtensionError::NotLipschitzOnA { a, b, needed, .. } => {
            ExtensionError::NotLipschitzOnA { a, b, lambda: delta, needed }
        }
        other => other,
    })?;
    let g = simplex_extend(space, a, f, 2.0 * delta)?;
    let lip_g_bound = 2.0 * delta * c_const;
    let lip_g_measured = check_lipschitz(&g, lip_g_bound, 0.0).worst_ratio;

    let n = space.len();
    let min_g: Vec<f64> = (0..n)
        .map(|x| g.value(x).iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let alpha: Vec<f64> = min_g.iter().map(|&v| (c_const * v).min(1.0)).collect();

    // Intermediate cover: a coordinate strictly above the minimum, or alpha
    // deep enough that every member applies.
    let mut members = vec![BTreeSet::new(); dim];
    for x in 0..n {
        for (i, member) in members.iter_mut().enumerate() {
            if g.value(x)[i] > min_g[x] || alpha[x] > 2.0 / 3.0 {
                member.insert(x);
            }
        }
    }
    let intermediate = Cover::new(space.clone(), members)?;
    let leb_required = 1.0 / (24.0 * delta * c_const * (m as f64 + 2.0));
    let leb_report = intermediate.lebesgue_number();
    if !leb_report.value.at_least(leb_required) {
        return Err(ExtensionError::LebesgueAssertionFailed {
            required: leb_required,
            actual: leb_report.value.as_f64(),
            witness: leb_report.critical_point,
        });
    }
    if refiner.t() > leb_report.value.as_f64() + TOL {
        return Err(ExtensionError::RefinerFailed(format!(
            "refiner expects Lebesgue number {} but the intermediate cover only has {}",
            refiner.t(),
            leb_report.value.as_f64()
        )));
    }
    if refiner.max_mult() > m + 1 {
        return Err(ExtensionError::RefinerFailed(format!(
            "refiner produces multiplicity up to {}, need at most {}",
            refiner.max_mult(),
            m + 1
        )));
    }
    let refined = refiner
        .refine(&intermediate)
        .map_err(|e| ExtensionError::RefinerFailed(e.to_string()))?;
    let shrunk = crate::cover::shrink_to_indexed(&refined, &intermediate)?;
    let refiner_leb = shrunk.lebesgue_number().value.as_f64();
    let refiner_mult = shrunk.multiplicity();
    let phi = barycentric_map(&shrunk)?;
    let lip_phi_measured = check_lipschitz(&phi, f64::INFINITY, 0.0).worst_ratio;

    let beta = |z: f64| -> f64 {
        if z <= 1.0 / 3.0 {
            0.0
        } else if z >= 2.0 / 3.0 {
            1.0
        } else {
            3.0 * z - 1.0
        }
    };
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let b = beta(alpha[x]);
        let row: Vec<f64> = if b >= 1.0 {
            phi.value(x).to_vec()
        } else {
            let psi: Vec<f64> = g.value(x).iter().map(|&gi| (gi - min_g[x]).max(0.0)).collect();
            let sum_psi: f64 = psi.iter().sum();
            // b < 1 forces alpha < 2/3, so sum_psi = 1 - alpha stays >= 1/3
            let scale = (1.0 - b) / sum_psi;
            psi.iter()
                .zip(phi.value(x))
                .map(|(&p, &ph)| p * scale + b * ph)
                .collect()
        };
        values.push(row);
    }
    let h = PointFunction::new(space.clone(), values, TargetMetric::L1)?;

    for &p in &pts {
        let err = l1_distance_raw(h.value(p), f[&p].coords());
        if err > TOL {
            return Err(ExtensionError::AgreementFailed { point: p, error: err });
        }
    }
    for x in 0..n {
        let min_coord = h.value(x).iter().copied().fold(f64::INFINITY, f64::min);
        let sum: f64 = h.value(x).iter().sum();
        if min_coord > TOL || (sum - 1.0).abs() > TOL {
            return Err(ExtensionError::BoundaryViolation { point: x, min_coord, sum });
        }
    }
    let lip_h_bound = (m as f64 + 2.0).powi(3) * (82.0 * c_const + 4.0) * delta;
    let h_report = check_lipschitz(&h, lip_h_bound, 0.0);
    if !h_report.satisfied {
        let (pa, pb) = h_report.worst_pair.unwrap_or((0, 0));
        return Err(ExtensionError::LipschitzBoundViolation {
            bound: lip_h_bound,
            a: pa,
            b: pb,
            ratio: h_report.worst_ratio,
        });
    }
    let cert = SphereCert {
        m,
        delta,
        extension_constant: c_const,
        lip_g_measured,
        lip_g_bound,
        intermediate_lebesgue: leb_report.value.as_f64(),
        intermediate_lebesgue_required: leb_required,
        refiner_name: refiner.name().to_owned(),
        refiner_lebesgue: refiner_leb,
        refiner_multiplicity: refiner_mult,
        lip_phi_measured,
        lip_h_measured: h_report.worst_ratio,
        lip_h_bound,
        agreement_checked: true,
        boundary_checked: true,
    };
    Ok((h, cert))
}

/// Input scale that makes the boundary-extension pipeline land inside a
/// target Lipschitz budget: data at scale `epsilon / ((m+2)^3 (82 C + 4))`
/// with C = m+2 comes out (epsilon, epsilon)-Lipschitz.
pub fn sphere_input_scale(epsilon: f64, m: usize) -> f64 {
    let c = m as f64 + 2.0;
    epsilon / (c.powi(3) * (82.0 * c + 4.0))
}

/// A capability that extends boundary-valued partial data; used as the
/// extension half of the refinement/extension duality.
pub struct SphereExtender {
    name: String,
    #[allow(clippy::type_complexity)]
    call: Box<
        dyn Fn(
                &Arc<FiniteMetricSpace>,
                &BTreeSet<usize>,
                &BTreeMap<usize, SimplexPoint>,
                f64,
            ) -> Result<PointFunction, ExtensionError>
            + Send
            + Sync,
    >,
}

impl SphereExtender {
    pub fn new(
        name: impl Into<String>,
        call: impl Fn(
                &Arc<FiniteMetricSpace>,
                &BTreeSet<usize>,
                &BTreeMap<usize, SimplexPoint>,
                f64,
            ) -> Result<PointFunction, ExtensionError>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        SphereExtender { name: name.into(), call: Box::new(call) }
    }

    /// Wraps the full boundary-extension pipeline around a refiner oracle.
    pub fn from_refiner(refiner: Arc<RefinerOracle>) -> Self {
        let name = format!("sphere-extend[{}]", refiner.name());
        SphereExtender::new(name, move |space, a, f, delta| {
            sphere_extend(space, a, f, delta, &refiner).map(|(h, _)| h)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn extend(
        &self,
        space: &Arc<FiniteMetricSpace>,
        a: &BTreeSet<usize>,
        f: &BTreeMap<usize, SimplexPoint>,
        delta: f64,
    ) -> Result<PointFunction, ExtensionError> {
        (self.call)(space, a, f, delta)
    }
}

/// Refines an (m+2)-member cover through a boundary-valued extension: the
/// barycentric map is restricted to the points it already sends to the
/// boundary, extended by the capability, and the supports of the extension
/// become the refined members. The output is verified to refine the input
/// with dimension at most m and Lebesgue number at least 1/(2 epsilon (m+1)).
pub fn refine_via_extension(
    cover: &Cover,
    extender: &SphereExtender,
    epsilon: f64,
) -> Result<Cover, ExtensionError> {
    let k = cover.member_count();
    if k < 2 {
        return Err(ExtensionError::VerificationFailed {
            check: format!("need at least 2 members, got {k}"),
        });
    }
    let m = k - 2;
    if epsilon <= 0.0 {
        return Err(ExtensionError::VerificationFailed {
            check: format!("epsilon must be positive, got {epsilon}"),
        });
    }
    let leb = cover.lebesgue_number();
    let leb_value = match leb.value {
        LebValue::Finite(v) if v > 0.0 => v,
        other => {
            return Err(ExtensionError::LebesgueTooSmall {
                detail: format!("cover Lebesgue number {:?} unusable", other),
            })
        }
    };
    let delta = 4.0 * (m as f64 + 2.0) * (m as f64 + 2.0) / leb_value;
    let s = 1.0 / (2.0 * epsilon * (m as f64 + 1.0));
    let phi = barycentric_map(cover)?;
    let space = cover.space().clone();
    let n = space.len();
    let mut a = BTreeSet::new();
    let mut f = BTreeMap::new();
    for x in 0..n {
        let p = phi
            .simplex_value(x)
            .map_err(|e| ExtensionError::VerificationFailed { check: e.to_string() })?;
        if p.is_boundary() {
            a.insert(x);
            f.insert(x, p);
        }
    }
    if a.is_empty() {
        return Err(ExtensionError::ExtenderFailed(
            "barycentric map hits no boundary point; every point lies in all members".into(),
        ));
    }
    let g = extender
        .extend(&space, &a, &f, delta)
        .map_err(|e| ExtensionError::ExtenderFailed(e.to_string()))?;
    let mut members = vec![BTreeSet::new(); k];
    for x in 0..n {
        for (i, member) in members.iter_mut().enumerate() {
            if g.value(x)[i] > TOL {
                member.insert(x);
            }
        }
    }
    let refined = Cover::new(space, members)
        .map_err(|e| ExtensionError::VerificationFailed { check: e.to_string() })?;
    for i in 0..k {
        if !refined.member(i).is_subset(cover.member(i)) {
            return Err(ExtensionError::VerificationFailed {
                check: format!("support {i} escapes its cover member"),
            });
        }
    }
    let mult = refined.multiplicity();
    if mult > m + 1 {
        return Err(ExtensionError::VerificationFailed {
            check: format!("refined multiplicity {mult} exceeds {}", m + 1),
        });
    }
    let out_leb = refined.lebesgue_number();
    if !out_leb.value.at_least(s) {
        return Err(ExtensionError::VerificationFailed {
            check: format!(
                "refined Lebesgue number {} below target {s}",
                out_leb.value.as_f64()
            ),
        });
    }
    Ok(refined)
}

/// A sampled nondecreasing modulus: `entries` are (argument, bound) pairs and
/// the value at `t` is read from the smallest sampled argument at or above
/// `t`. Each bound must dominate image distances for all pair distances up to
/// its sample point.
#[derive(Clone, Debug, Serialize)]
pub struct ModulusTable {
    entries: Vec<(f64, f64)>,
}

impl ModulusTable {
    pub fn new(mut entries: Vec<(f64, f64)>) -> Self {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        ModulusTable { entries }
    }

    /// The modulus of a function: at each sample delta, the supremum of image
    /// distances over pairs with distance at most delta.
    pub fn of_function(f: &PointFunction, samples: &[f64]) -> Self {
        let n = f.space().len();
        let entries = samples
            .iter()
            .map(|&delta| {
                let mut sup = 0.0f64;
                for i in 0..n {
                    for j in (i + 1)..n {
                        if f.space().dist(i, j) <= delta {
                            sup = sup.max(f.target_distance(i, j));
                        }
                    }
                }
                (delta, sup)
            })
            .collect();
        ModulusTable::new(entries)
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Bound valid for all pair distances <= t, if sampled.
    pub fn bound_at(&self, t: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|(arg, _)| *arg >= t - TOL)
            .map(|(_, v)| *v)
    }
}

/// Safe input scale for composing through a modulus: data that is
/// (delta, delta)-Lipschitz with delta below the returned threshold composes
/// with any alpha-Lipschitz map into an (epsilon, epsilon)-Lipschitz map,
/// provided the target has diameter at most m.
pub fn composition_threshold(
    m: f64,
    epsilon: f64,
    alpha: &ModulusTable,
) -> Result<f64, ExtensionError> {
    if epsilon <= 0.0 || epsilon >= m {
        return Err(ExtensionError::EpsilonNotBelowM { epsilon, m });
    }
    let at = (m - epsilon) / epsilon;
    let value = alpha
        .bound_at(at)
        .ok_or(ExtensionError::AlphaUndefined { at })?;
    Ok(epsilon / (value + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asdim::RefinerOracle;
    use crate::metric::FiniteMetricSpace;

    fn interval(a: i64, b: i64) -> Arc<FiniteMetricSpace> {
        FiniteMetricSpace::interval(a, b).unwrap().into_arc()
    }

    #[test]
    fn constant_function_is_lipschitz() {
        let f = PointFunction::scalar(interval(0, 9), vec![3.0; 10]);
        let report = check_lipschitz(&f, 0.5, 0.0);
        assert!(report.satisfied);
        assert_eq!(report.worst_ratio, 0.0);
    }

    #[test]
    fn identity_is_one_lipschitz() {
        let f = PointFunction::scalar(interval(0, 9), (0..10).map(|x| x as f64).collect());
        let report = check_lipschitz(&f, 1.0, 0.0);
        assert!(report.satisfied);
        assert!((report.worst_ratio - 1.0).abs() < TOL);
    }

    #[test]
    fn doubling_violates_unit_lipschitz() {
        let f = PointFunction::scalar(interval(0, 9), (0..10).map(|x| 2.0 * x as f64).collect());
        let report = check_lipschitz(&f, 1.0, 0.0);
        assert!(!report.satisfied);
        assert!((report.worst_ratio - 2.0).abs() < TOL);
    }

    #[test]
    fn mcshane_interpolates_between_anchors() {
        let space = FiniteMetricSpace::line_points(vec![0, 5, 10]).unwrap().into_arc();
        let a = BTreeSet::from([0, 2]);
        let values = BTreeMap::from([(0, 0.0), (2, 1.0)]);
        let g = mcshane_extend(&space, &a, &values, 0.1, None).unwrap();
        assert!((g.scalar_value(1) - 0.5).abs() < TOL);
        assert_eq!(g.scalar_value(0), 0.0);
        assert_eq!(g.scalar_value(2), 1.0);
    }

    #[test]
    fn mcshane_with_full_domain_is_identity() {
        let space = interval(0, 5);
        let a: BTreeSet<usize> = (0..6).collect();
        let values: BTreeMap<usize, f64> = (0..6).map(|x| (x, (x as f64).sqrt())).collect();
        let g = mcshane_extend(&space, &a, &values, 1.0, None).unwrap();
        for x in 0..6 {
            assert!((g.scalar_value(x) - values[&x]).abs() < TOL);
        }
    }

    #[test]
    fn mcshane_rejects_steep_data() {
        let space = interval(0, 5);
        let a = BTreeSet::from([0, 1]);
        let values = BTreeMap::from([(0, 0.0), (1, 5.0)]);
        assert!(matches!(
            mcshane_extend(&space, &a, &values, 1.0, None),
            Err(ExtensionError::NotLipschitzOnA { .. })
        ));
    }

    #[test]
    fn mcshane_output_is_lipschitz_and_maximal() {
        let space = interval(0, 20);
        let a = BTreeSet::from([0, 7, 20]);
        let values = BTreeMap::from([(0, 0.3), (7, 0.9), (20, 0.1)]);
        let lambda = 0.2;
        let g = mcshane_extend(&space, &a, &values, lambda, None).unwrap();
        assert!(check_lipschitz(&g, lambda, 0.0).satisfied);
        // the lower (Whitney-style) extension is dominated pointwise
        for x in 0..21 {
            let lower = a
                .iter()
                .map(|&p| values[&p] - lambda * space.dist(x, p))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(g.scalar_value(x) >= lower - TOL);
        }
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_to_simplex(&[0.5, 0.5]).coords(), &[0.5, 0.5]);
        assert_eq!(project_to_simplex(&[1.0, 1.0]).coords(), &[0.5, 0.5]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]).coords(), &[1.0, 0.0]);
    }

    #[test]
    fn projection_is_idempotent() {
        let p = project_to_simplex(&[0.3, -0.1, 0.9]);
        let q = project_to_simplex(p.coords());
        for (a, b) in p.coords().iter().zip(q.coords()) {
            assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn simplex_extension_of_constant_vertex_is_constant() {
        let space = interval(0, 9);
        let a = BTreeSet::from([0, 9]);
        let e0 = SimplexPoint::vertex(0, 3);
        let f = BTreeMap::from([(0, e0.clone()), (9, e0.clone())]);
        let g = simplex_extend(&space, &a, &f, 0.05).unwrap();
        for x in 0..10 {
            assert!(l1_distance_raw(g.value(x), e0.coords()) < TOL);
        }
    }

    #[test]
    fn simplex_extension_agrees_and_respects_constant() {
        let space = interval(0, 30);
        let a = BTreeSet::from([0, 30]);
        let f = BTreeMap::from([(0, SimplexPoint::vertex(0, 3)), (30, SimplexPoint::vertex(2, 3))]);
        let lambda = 2.0 / 30.0;
        let g = simplex_extend(&space, &a, &f, lambda).unwrap();
        assert!(l1_distance_raw(g.value(0), f[&0].coords()) < TOL);
        assert!(l1_distance_raw(g.value(30), f[&30].coords()) < TOL);
        assert!(check_lipschitz(&g, 3.0 * lambda, 0.0).satisfied);
    }

    #[test]
    fn sphere_extension_identity_when_a_is_everything() {
        let space = interval(0, 20);
        let a: BTreeSet<usize> = (0..21).collect();
        let delta = 0.02;
        let f: BTreeMap<usize, SimplexPoint> = (0..21)
            .map(|x| {
                let t = (x as f64 / 20.0) * delta * 10.0;
                (x, SimplexPoint::new(vec![1.0 - t, t, 0.0]).unwrap())
            })
            .collect();
        let refiner = RefinerOracle::search(1.0, 1.0, 2, 64, 7);
        let (h, cert) = sphere_extend(&space, &a, &f, delta, &refiner).unwrap();
        for x in 0..21 {
            assert!(l1_distance_raw(h.value(x), f[&x].coords()) < TOL);
        }
        assert!(cert.lip_h_measured <= cert.lip_h_bound + TOL);
    }

    #[test]
    fn sphere_extension_constant_vertex() {
        let space = interval(0, 40);
        let a = BTreeSet::from([0, 40]);
        let e1 = SimplexPoint::vertex(1, 3);
        let f = BTreeMap::from([(0, e1.clone()), (40, e1.clone())]);
        let refiner = RefinerOracle::search(1.0, 1.0, 2, 64, 7);
        let (h, _) = sphere_extend(&space, &a, &f, 1e-3, &refiner).unwrap();
        for x in 0..41 {
            assert!(l1_distance_raw(h.value(x), e1.coords()) < TOL);
        }
    }

    #[test]
    fn sphere_extension_deep_interior_exercises_the_splice() {
        // three anchors at three different vertices force the solid extension
        // through the interior: the intermediate cover has a finite Lebesgue
        // number and the radial/barycentric splice runs through all regimes
        let delta = 0.05;
        let space = interval(0, 100);
        let a = BTreeSet::from([0usize, 50, 100]);
        let f = BTreeMap::from([
            (0usize, SimplexPoint::vertex(1, 3)),
            (50, SimplexPoint::vertex(2, 3)),
            (100, SimplexPoint::vertex(0, 3)),
        ]);
        let t = 1.0 / (24.0 * delta * 3.0 * 3.0);
        let refiner = RefinerOracle::search(1.0, t, 2, 16, 7);
        let (h, cert) = sphere_extend(&space, &a, &f, delta, &refiner).unwrap();
        assert!(cert.intermediate_lebesgue.is_finite());
        assert!(cert.intermediate_lebesgue >= cert.intermediate_lebesgue_required - TOL);
        assert!(cert.lip_h_measured <= cert.lip_h_bound + TOL);
        for &p in a.iter() {
            assert!(l1_distance_raw(h.value(p), f[&p].coords()) < TOL);
        }
        // the depth profile passes through all three splice regimes
        let g = simplex_extend(&space, &a, &f, 2.0 * delta).unwrap();
        let alpha = |x: usize| 3.0 * g.value(x).iter().copied().fold(f64::INFINITY, f64::min);
        let max_alpha = (0..=100).map(alpha).fold(0.0f64, f64::max);
        assert!(max_alpha >= 2.0 / 3.0, "deep interior never reached: {max_alpha}");
        assert!((0..=100).any(|x| alpha(x) > 1.0 / 3.0 && alpha(x) < 2.0 / 3.0));
        assert!((0..=100).any(|x| alpha(x) < 1.0 / 3.0));
    }

    #[test]
    fn sphere_extension_requires_discreteness() {
        let m = [vec![0.0, 0.25], vec![0.25, 0.0]];
        let space = FiniteMetricSpace::from_distance_matrix(None, &m).unwrap().into_arc();
        let a = BTreeSet::from([0]);
        let f = BTreeMap::from([(0, SimplexPoint::vertex(0, 2))]);
        let refiner = RefinerOracle::search(1.0, 1.0, 1, 64, 7);
        assert!(matches!(
            sphere_extend(&space, &a, &f, 0.1, &refiner),
            Err(ExtensionError::NotOneDiscrete { .. })
        ));
    }

    #[test]
    fn refine_via_extension_keeps_already_thin_covers() {
        // multiplicity <= m+1 puts every barycentric value on the boundary,
        // so the data is total and the supports reproduce the cover
        let space = interval(0, 60);
        let members: Vec<BTreeSet<usize>> = [(0i64, 30i64), (20, 50), (40, 60)]
            .iter()
            .map(|&(lo, hi)| (lo..=hi).map(|x| x as usize).collect())
            .collect();
        let cover = Cover::new(space, members).unwrap();
        assert_eq!(cover.multiplicity(), 2);
        let refiner = Arc::new(RefinerOracle::search(1.0, 1e-3, 2, 16, 5));
        let extender = SphereExtender::from_refiner(refiner);
        let refined = refine_via_extension(&cover, &extender, 0.25).unwrap();
        assert_eq!(refined.members(), cover.members());
    }

    #[test]
    fn input_scale_inverts_the_output_bound() {
        for m in 0..3 {
            let epsilon = 0.25;
            let delta = sphere_input_scale(epsilon, m);
            let c = m as f64 + 2.0;
            let bound = c.powi(3) * (82.0 * c + 4.0) * delta;
            assert!((bound - epsilon).abs() < TOL);
        }
    }

    #[test]
    fn threshold_formula() {
        let alpha = ModulusTable::new(vec![(1.0, 1.0), (2.0, 2.0)]);
        let t = composition_threshold(2.0, 1.0, &alpha).unwrap();
        assert!((t - 0.5).abs() < TOL);
        assert!(matches!(
            composition_threshold(2.0, 2.0, &alpha),
            Err(ExtensionError::EpsilonNotBelowM { .. })
        ));
    }

    #[test]
    fn affine_lipschitz_gives_continuity() {
        // (delta, delta)-Lipschitz data is (mu, s)-continuous when
        // delta (s + 1) <= mu
        let space = interval(0, 30);
        let delta = 0.05;
        let f = PointFunction::scalar(space, (0..31).map(|x| delta * x as f64).collect());
        let s = 4.0;
        let mu = delta * (s + 1.0);
        for i in 0..31 {
            for j in 0..31 {
                if i != j && f.space().dist(i, j) <= s {
                    assert!(f.target_distance(i, j) <= mu + TOL);
                }
            }
        }
    }
}
