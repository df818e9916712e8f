//! Finite-scale certificates of slow oscillation: continuity checks, moduli,
//! variation profiles over annuli, the squares-of-integers counterexample
//! instance with its two built-in extenders, and the annulus-pasting
//! extension for bounded targets.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::extension::{mcshane_extend, ModulusTable};
use crate::function::{FunctionError, PointFunction};
use crate::metric::{FiniteMetricSpace, PointId, TOL};

#[derive(Debug, Error)]
pub enum OscillationError {
    #[error("space has no basepoint; annulus constructions need one")]
    NoBasepoint,
    #[error("instance size {got} too small, need at least {required}")]
    NmaxTooSmall { got: usize, required: usize },
    #[error("precondition violated: {detail}")]
    PreconditionViolated { detail: String },
    #[error("bounded extender failed: {0}")]
    ExtenderFailed(String),
    #[error("pasted extension disagrees with the data at point {point}")]
    AgreementFailed { point: usize },
    #[error("pasted extension fails the continuity check at pair ({x}, {y})")]
    PastingVerificationFailed { x: usize, y: usize },
    #[error(transparent)]
    Function(#[from] FunctionError),
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    pub epsilon: f64,
    pub delta: f64,
    pub continuous: bool,
    /// First violating pair in lexicographic order, if any.
    pub witness: Option<(usize, usize)>,
}

/// Checks that pairs strictly closer than `delta` map to values strictly
/// closer than `epsilon`.
pub fn continuity_check(f: &PointFunction, epsilon: f64, delta: f64) -> ContinuityReport {
    let n = f.space().len();
    for i in 0..n {
        for j in (i + 1)..n {
            if f.space().dist(i, j) < delta && f.target_distance(i, j) >= epsilon {
                return ContinuityReport {
                    epsilon,
                    delta,
                    continuous: false,
                    witness: Some((i, j)),
                };
            }
        }
    }
    ContinuityReport { epsilon, delta, continuous: true, witness: None }
}

/// The continuity modulus of `f` sampled at the given scales: at each delta,
/// the supremum of image distances over pairs strictly closer than delta.
/// `f` is then (modulus(delta) + eta, delta)-continuous for every eta > 0;
/// the table is nondecreasing and 0 at 0.
pub fn modulus(f: &PointFunction, deltas: &[f64]) -> ModulusTable {
    let n = f.space().len();
    let mut entries: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for &delta in deltas {
        if delta <= 0.0 {
            continue;
        }
        let mut sup = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                if f.space().dist(i, j) < delta {
                    sup = sup.max(f.target_distance(i, j));
                }
            }
        }
        entries.push((delta, sup));
    }
    ModulusTable::new(entries)
}

/// Supremum of image distances over pairs within `r` of each other, both at
/// distance at least N from the basepoint, sampled over the given Ns.
/// Entries shrink as N grows; a function is certified slowly oscillating at
/// scale (epsilon, r) beyond N when the entry at N is below epsilon.
#[derive(Clone, Debug, Serialize)]
pub struct VariationProfile {
    pub r: f64,
    pub entries: Vec<(f64, f64)>,
}

impl VariationProfile {
    pub fn entry_at(&self, n: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|(en, _)| (*en - n).abs() <= TOL)
            .map(|(_, v)| *v)
    }

    pub fn certifies(&self, epsilon: f64, n: f64) -> bool {
        self.entry_at(n).map(|v| v < epsilon).unwrap_or(false)
    }
}

pub fn variation_profile(
    f: &PointFunction,
    r: f64,
    ns: &[f64],
) -> Result<VariationProfile, OscillationError> {
    let space = f.space();
    let x0 = space.basepoint().ok_or(OscillationError::NoBasepoint)?;
    let n_pts = space.len();
    // gather (min basepoint distance, image distance) for pairs within r
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for i in 0..n_pts {
        for j in (i + 1)..n_pts {
            if space.dist(i, j) <= r {
                let reach = space.dist(x0, i).min(space.dist(x0, j));
                pairs.push((reach, f.target_distance(i, j)));
            }
        }
    }
    let mut ns_sorted: Vec<f64> = ns.to_vec();
    ns_sorted.sort_by(|a, b| a.total_cmp(b));
    let entries = ns_sorted
        .into_iter()
        .map(|n| {
            let sup = pairs
                .iter()
                .filter(|(reach, _)| *reach >= n)
                .map(|(_, v)| *v)
                .fold(0.0f64, f64::max);
            (n, sup)
        })
        .collect();
    Ok(VariationProfile { r, entries })
}

/// The squares-of-integers instance: the integer interval [0, nmax^2] with
/// basepoint 0, the subset of perfect squares, and the inclusion into the
/// reals restricted to that subset.
#[derive(Clone, Debug)]
pub struct SquaresInstance {
    pub space: Arc<FiniteMetricSpace>,
    pub anchors: BTreeSet<usize>,
    pub values: BTreeMap<usize, f64>,
    pub nmax: usize,
}

pub fn squares_instance(nmax: usize) -> Result<SquaresInstance, OscillationError> {
    if nmax < 2 {
        return Err(OscillationError::NmaxTooSmall { got: nmax, required: 2 });
    }
    let top = (nmax * nmax) as i64;
    let space = FiniteMetricSpace::interval(0, top)
        .expect("nonempty interval")
        .with_basepoint(&PointId::Int(0))
        .expect("0 is in the interval")
        .into_arc();
    let mut anchors = BTreeSet::new();
    let mut values = BTreeMap::new();
    for k in 0..=nmax {
        let sq = k * k;
        anchors.insert(sq);
        values.insert(sq, sq as f64);
    }
    Ok(SquaresInstance { space, anchors, values, nmax })
}

impl SquaresInstance {
    /// The inclusion as a total function on the subspace of squares, keeping
    /// the ambient distances and the basepoint.
    pub fn inclusion_on_anchors(&self) -> PointFunction {
        let keep: Vec<usize> = self.anchors.iter().copied().collect();
        let sub = Arc::new(self.space.subspace(&keep));
        let values = keep.iter().map(|&p| self.values[&p]).collect();
        PointFunction::scalar(sub, values)
    }

    /// Extension by straight-line interpolation between consecutive squares.
    pub fn extend_linear(&self) -> PointFunction {
        let n = self.space.len();
        let anchors: Vec<usize> = self.anchors.iter().copied().collect();
        let values = (0..n)
            .map(|x| {
                let next = anchors.partition_point(|&a| a < x);
                if next == 0 {
                    self.values[&anchors[0]]
                } else if next == anchors.len() {
                    self.values[&anchors[anchors.len() - 1]]
                } else {
                    let lo = anchors[next - 1];
                    let hi = anchors[next];
                    let t = (x - lo) as f64 / (hi - lo) as f64;
                    self.values[&lo] * (1.0 - t) + self.values[&hi] * t
                }
            })
            .collect();
        PointFunction::scalar(self.space.clone(), values)
    }

    /// Extension by the value at the nearest square, lower square on ties.
    pub fn extend_nearest(&self) -> PointFunction {
        let n = self.space.len();
        let anchors: Vec<usize> = self.anchors.iter().copied().collect();
        let values = (0..n)
            .map(|x| {
                let mut best = anchors[0];
                let mut best_d = usize::MAX;
                for &a in &anchors {
                    let d = a.abs_diff(x);
                    if d < best_d {
                        best_d = d;
                        best = a;
                    }
                }
                self.values[&best]
            })
            .collect();
        PointFunction::scalar(self.space.clone(), values)
    }
}

/// First pair (in lexicographic order) within `r` of each other, both at
/// distance at least `n` from the basepoint, whose images are at least
/// `epsilon` apart. `None` when no such pair exists.
pub fn oscillation_witness(
    g: &PointFunction,
    epsilon: f64,
    r: f64,
    n: f64,
) -> Result<Option<(usize, usize)>, OscillationError> {
    let space = g.space();
    let x0 = space.basepoint().ok_or(OscillationError::NoBasepoint)?;
    let n_pts = space.len();
    for i in 0..n_pts {
        for j in (i + 1)..n_pts {
            if space.dist(i, j) <= r
                && space.dist(x0, i).min(space.dist(x0, j)) >= n
                && g.target_distance(i, j) >= epsilon
            {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Turns partial data on a bounded piece of the space into a total function
/// on that piece, verified to satisfy the requested continuity. The domain is
/// given as ambient point indices; the returned map is keyed the same way.
pub struct BoundedExtender {
    name: String,
    #[allow(clippy::type_complexity)]
    call: Box<
        dyn Fn(
                &Arc<FiniteMetricSpace>,
                &[usize],
                &BTreeMap<usize, f64>,
                f64,
                f64,
            ) -> Result<BTreeMap<usize, f64>, String>
            + Send
            + Sync,
    >,
}

impl BoundedExtender {
    pub fn new(
        name: impl Into<String>,
        call: impl Fn(
                &Arc<FiniteMetricSpace>,
                &[usize],
                &BTreeMap<usize, f64>,
                f64,
                f64,
            ) -> Result<BTreeMap<usize, f64>, String>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        BoundedExtender { name: name.into(), call: Box::new(call) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn extend(
        &self,
        space: &Arc<FiniteMetricSpace>,
        domain: &[usize],
        partial: &BTreeMap<usize, f64>,
        epsilon: f64,
        m: f64,
    ) -> Result<BTreeMap<usize, f64>, String> {
        (self.call)(space, domain, partial, epsilon, m)
    }

    /// Default capability for the unit-interval target: largest-Lipschitz
    /// extension at the measured slope of the data, clamped to [0, 1], with
    /// the requested continuity verified on the piece before returning.
    pub fn mcshane_unit_interval() -> Self {
        BoundedExtender::new("mcshane", |space, domain, partial, epsilon, m| {
            if domain.is_empty() {
                return Ok(BTreeMap::new());
            }
            if partial.is_empty() {
                return Ok(domain.iter().map(|&p| (p, 0.0)).collect());
            }
            let sub = Arc::new(space.subspace(domain));
            let local_of: BTreeMap<usize, usize> =
                domain.iter().enumerate().map(|(l, &p)| (p, l)).collect();
            let mut a = BTreeSet::new();
            let mut values = BTreeMap::new();
            for (&p, &v) in partial {
                let l = *local_of
                    .get(&p)
                    .ok_or_else(|| format!("partial data at {p} outside the domain"))?;
                a.insert(l);
                values.insert(l, v);
            }
            // measured slope of the data
            let pts: Vec<usize> = a.iter().copied().collect();
            let mut lambda = 0.0f64;
            for (ai, &x) in pts.iter().enumerate() {
                for &y in &pts[ai + 1..] {
                    lambda = lambda.max((values[&x] - values[&y]).abs() / sub.dist(x, y));
                }
            }
            let g = mcshane_extend(&sub, &a, &values, lambda, Some((0.0, 1.0)))
                .map_err(|e| e.to_string())?;
            let report = continuity_check(&g, epsilon, m);
            if !report.continuous {
                let (x, y) = report.witness.expect("witness accompanies failure");
                return Err(format!(
                    "extension is not ({epsilon}, {m})-continuous at local pair ({x}, {y})"
                ));
            }
            Ok(domain
                .iter()
                .enumerate()
                .map(|(l, &p)| (p, g.scalar_value(l)))
                .collect())
        })
    }
}

/// Extends partial data over the whole space by covering it with annuli
/// around the basepoint, extending on each annulus, and pasting overlaps
/// zone by zone. The result agrees with the data and is verified
/// (epsilon, m)-continuous.
#[allow(clippy::too_many_arguments)]
pub fn annulus_extend(
    space: &Arc<FiniteMetricSpace>,
    a: &BTreeSet<usize>,
    values: &BTreeMap<usize, f64>,
    r: f64,
    mu: f64,
    s: f64,
    epsilon: f64,
    m: f64,
    extender: &BoundedExtender,
) -> Result<PointFunction, OscillationError> {
    let x0 = space.basepoint().ok_or(OscillationError::NoBasepoint)?;
    if r <= 0.0 {
        return Err(OscillationError::PreconditionViolated {
            detail: format!("annulus width must be positive, got {r}"),
        });
    }
    // the data must be (mu, 4r)-continuous
    let pts: Vec<usize> = a.iter().copied().collect();
    for (ai, &x) in pts.iter().enumerate() {
        for &y in &pts[ai + 1..] {
            if space.dist(x, y) < 4.0 * r && (values[&x] - values[&y]).abs() >= mu {
                return Err(OscillationError::PreconditionViolated {
                    detail: format!(
                        "data is not ({mu}, {}4r)-continuous at pair ({x}, {y})",
                        ""
                    ),
                });
            }
        }
    }
    let n = space.len();
    let reach: Vec<f64> = (0..n).map(|x| space.dist(x0, x)).collect();
    let d_max = reach.iter().copied().fold(0.0f64, f64::max);
    let k_max = (0..).find(|k| (2 * k + 1) as f64 * r > d_max).unwrap_or(0);

    // An annulus that misses the data entirely may be sent anywhere that is
    // suitably continuous; borrowing the nearest anchor keeps the pasting
    // conservative.
    let nearest_anchor_value = |domain: &[usize]| -> f64 {
        let mut best = (f64::INFINITY, pts[0]);
        for &p in &pts {
            let d = domain
                .iter()
                .map(|&x| space.dist(x, p))
                .fold(f64::INFINITY, f64::min);
            if d < best.0 {
                best = (d, p);
            }
        }
        values[&best.1]
    };

    // stage 1: extend on each annulus C_k = B((2k+2)r) \ B((2k-1)r)
    let mut stage1: Vec<BTreeMap<usize, f64>> = Vec::new();
    for k in 0..=k_max {
        let lo = (2.0 * k as f64 - 1.0) * r;
        let hi = (2.0 * k as f64 + 2.0) * r;
        let domain: Vec<usize> = (0..n).filter(|&x| reach[x] < hi && reach[x] >= lo).collect();
        let partial: BTreeMap<usize, f64> = if domain.iter().any(|p| a.contains(p)) {
            domain
                .iter()
                .filter(|p| a.contains(p))
                .map(|&p| (p, values[&p]))
                .collect()
        } else if domain.is_empty() {
            BTreeMap::new()
        } else {
            let v = nearest_anchor_value(&domain);
            BTreeMap::from([(domain[0], v)])
        };
        let g = extender
            .extend(space, &domain, &partial, mu, s)
            .map_err(OscillationError::ExtenderFailed)?;
        stage1.push(g);
    }

    // stage 2: paste zone restrictions and re-extend on
    // D_k = B((2k+3)r) \ B(2kr)
    let mut stage2: Vec<BTreeMap<usize, f64>> = Vec::new();
    for k in 0..=k_max {
        let lo = 2.0 * k as f64 * r;
        let hi = (2.0 * k as f64 + 3.0) * r;
        let domain: Vec<usize> = (0..n).filter(|&x| reach[x] < hi && reach[x] >= lo).collect();
        let mut pasted: BTreeMap<usize, f64> = BTreeMap::new();
        for &x in &domain {
            // zone of g_k: [2kr, (2k+1)r)
            if reach[x] >= lo && reach[x] < (2.0 * k as f64 + 1.0) * r {
                if let Some(v) = stage1[k].get(&x) {
                    pasted.insert(x, *v);
                }
            }
            // zone of g_{k+1}: [(2k+2)r, (2k+3)r)
            if k < k_max && reach[x] >= (2.0 * k as f64 + 2.0) * r {
                if let Some(v) = stage1[k + 1].get(&x) {
                    pasted.insert(x, *v);
                }
            }
            if a.contains(&x) {
                pasted.insert(x, values[&x]);
            }
        }
        let h = extender
            .extend(space, &domain, &pasted, epsilon, m)
            .map_err(OscillationError::ExtenderFailed)?;
        stage2.push(h);
    }

    // paste the stage-2 pieces: the zone [(2k+1)r, (2k+3)r) reads from h_k
    let mut out = vec![0.0; n];
    for x in 0..n {
        let k = if reach[x] < r {
            0
        } else {
            (((reach[x] - r) / (2.0 * r)).floor() as usize).min(k_max)
        };
        out[x] = *stage2[k].get(&x).ok_or_else(|| {
            OscillationError::ExtenderFailed(format!(
                "stage-2 extension on annulus {k} is missing point {x}"
            ))
        })?;
    }
    let result = PointFunction::scalar(space.clone(), out);
    for &p in &pts {
        if (result.scalar_value(p) - values[&p]).abs() > TOL {
            return Err(OscillationError::AgreementFailed { point: p });
        }
    }
    let report = continuity_check(&result, epsilon, m);
    if !report.continuous {
        let (x, y) = report.witness.expect("witness accompanies failure");
        return Err(OscillationError::PastingVerificationFailed { x, y });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_fn(b: i64, f: impl Fn(i64) -> f64) -> PointFunction {
        let space = FiniteMetricSpace::interval(0, b)
            .unwrap()
            .with_basepoint(&PointId::Int(0))
            .unwrap()
            .into_arc();
        let values = (0..=b).map(f).collect();
        PointFunction::scalar(space, values)
    }

    #[test]
    fn constant_function_is_always_continuous() {
        let f = interval_fn(9, |_| 2.5);
        assert!(continuity_check(&f, 0.1, 100.0).continuous);
    }

    #[test]
    fn identity_is_two_two_continuous() {
        let f = interval_fn(9, |x| x as f64);
        assert!(continuity_check(&f, 2.0, 2.0).continuous);
    }

    #[test]
    fn squares_violate_three_two_continuity() {
        let f = interval_fn(9, |x| (x * x) as f64);
        let report = continuity_check(&f, 3.0, 2.0);
        assert!(!report.continuous);
        // first violating pair in lexicographic order: |1 - 4| = 3 >= 3
        assert_eq!(report.witness, Some((1, 2)));
    }

    #[test]
    fn modulus_of_identity_and_constant() {
        let id = interval_fn(9, |x| x as f64);
        let table = modulus(&id, &[0.5, 1.5, 3.5]);
        // largest realized distance strictly below each delta
        assert_eq!(table.entries(), &[(0.0, 0.0), (0.5, 0.0), (1.5, 1.0), (3.5, 3.0)]);
        let constant = interval_fn(9, |_| 1.0);
        let table = modulus(&constant, &[1.0, 5.0]);
        assert!(table.entries().iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn modulus_recheck_gives_continuity() {
        let f = interval_fn(20, |x| (x as f64).sqrt());
        let deltas = [1.0, 2.0, 5.0];
        let table = modulus(&f, &deltas);
        for &(delta, alpha) in table.entries() {
            if delta == 0.0 {
                continue;
            }
            assert!(continuity_check(&f, alpha + TOL, delta).continuous);
        }
    }

    #[test]
    fn profile_of_identity_is_constant() {
        let f = interval_fn(1000, |x| x as f64);
        let profile = variation_profile(&f, 1.0, &[0.0, 100.0, 500.0]).unwrap();
        for (_, v) in &profile.entries {
            assert_eq!(*v, 1.0);
        }
    }

    #[test]
    fn profile_of_sqrt_decreases() {
        let f = interval_fn(2000, |x| (x as f64).sqrt());
        let profile = variation_profile(&f, 1.0, &[0.0, 10.0, 100.0, 1000.0]).unwrap();
        let vals: Vec<f64> = profile.entries.iter().map(|(_, v)| *v).collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + TOL);
        }
        // entry at N is sqrt(N+1) - sqrt(N) for the unit-radius profile
        let expected = (101.0f64).sqrt() - 100.0f64.sqrt();
        assert!((profile.entry_at(100.0).unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn bounded_support_profile_vanishes() {
        let f = interval_fn(500, |x| if x < 50 { 1.0 } else { 0.0 });
        let profile = variation_profile(&f, 2.0, &[0.0, 60.0]).unwrap();
        assert!(profile.entry_at(60.0).unwrap() == 0.0);
        assert!(profile.certifies(0.5, 60.0));
    }

    #[test]
    fn squares_instance_shape() {
        let inst = squares_instance(20).unwrap();
        assert_eq!(inst.anchors.len(), 21);
        assert_eq!(*inst.anchors.iter().max().unwrap(), 400);
        assert!(matches!(squares_instance(1), Err(OscillationError::NmaxTooSmall { .. })));
    }

    #[test]
    fn inclusion_on_anchors_is_slowly_oscillating_at_unit_scale() {
        let inst = squares_instance(20).unwrap();
        let f = inst.inclusion_on_anchors();
        let profile = variation_profile(&f, 1.0, &[0.0, 1.0, 10.0]).unwrap();
        // the only unit-distance anchor pair (0, 1) sits at the basepoint
        assert_eq!(profile.entry_at(1.0).unwrap(), 0.0);
        assert_eq!(profile.entry_at(10.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_extension_always_witnesses() {
        let inst = squares_instance(20).unwrap();
        let g = inst.extend_linear();
        for n in [0.0, 100.0, 360.0] {
            let w = oscillation_witness(&g, 1.0, 1.0, n).unwrap();
            assert!(w.is_some(), "no witness beyond {n}");
        }
    }

    #[test]
    fn nearest_extension_jumps_at_midpoints() {
        let inst = squares_instance(20).unwrap();
        let g = inst.extend_nearest();
        let w = oscillation_witness(&g, 1.0, 1.0, 360.0).unwrap();
        let (x, y) = w.unwrap();
        // the jump across the last midpoint has height 39
        assert!(g.target_distance(x, y) >= 39.0 - TOL);
    }

    #[test]
    fn witness_none_when_threshold_unreachable() {
        let inst = squares_instance(10).unwrap();
        let g = inst.extend_linear();
        let diam = g.image_diameter();
        assert!(oscillation_witness(&g, diam + 1.0, 1.0, 0.0).unwrap().is_none());
    }

    #[test]
    fn annulus_extension_is_identity_when_total() {
        let space = FiniteMetricSpace::interval(0, 120)
            .unwrap()
            .with_basepoint(&PointId::Int(0))
            .unwrap()
            .into_arc();
        let a: BTreeSet<usize> = (0..=120).collect();
        let values: BTreeMap<usize, f64> =
            (0..=120).map(|x| (x, (x as f64 / 120.0).sin().abs())).collect();
        let ext = BoundedExtender::mcshane_unit_interval();
        let out = annulus_extend(&space, &a, &values, 5.0, 0.2, 10.0, 0.5, 20.0, &ext).unwrap();
        for x in 0..=120 {
            assert!((out.scalar_value(x) - values[&x]).abs() < TOL);
        }
    }

    #[test]
    fn annulus_extension_of_constant_is_constant() {
        let space = FiniteMetricSpace::interval(0, 200)
            .unwrap()
            .with_basepoint(&PointId::Int(0))
            .unwrap()
            .into_arc();
        let a: BTreeSet<usize> = [0, 50, 121, 200].into_iter().collect();
        let values: BTreeMap<usize, f64> = a.iter().map(|&p| (p, 0.25)).collect();
        let ext = BoundedExtender::mcshane_unit_interval();
        let out = annulus_extend(&space, &a, &values, 6.0, 0.1, 12.0, 0.4, 24.0, &ext).unwrap();
        for x in 0..=200 {
            assert!((out.scalar_value(x) - 0.25).abs() < TOL);
        }
    }
}
