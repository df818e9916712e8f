//! Covers of finite metric spaces and their statistics: Lebesgue number,
//! multiplicity, mesh, r-disjointness, refinement, indexed shrinking, and the
//! canonical brick witnesses on integer intervals and grids.
//!
//! Brick generators re-verify every claimed bound with the generic checkers
//! before returning; a cover that fails its own contract is an error, never a
//! return value.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{same_space, FiniteMetricSpace, TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("member {member} refers to point index {point} outside the space")]
    PointOutOfRange { member: usize, point: usize },
    #[error("point {point} is not covered by any member")]
    UncoveredPoint { point: usize },
    #[error("covers are defined over different spaces")]
    SpaceMismatch,
    #[error("member {member} of the finer cover is not contained in any coarser member")]
    NotARefinement { member: usize },
    #[error("family index {family} lists member {member} more than once or out of range")]
    BadFamily { family: usize, member: usize },
    #[error("member {member} belongs to no family")]
    UnassignedMember { member: usize },
    #[error("family {family} is not {r}-disjoint: members {member_a} and {member_b} at distance {distance}")]
    FamilyNotDisjoint {
        family: usize,
        r: f64,
        member_a: usize,
        member_b: usize,
        distance: f64,
    },
    #[error("window of length {length} is too small, need at least {required}")]
    WindowTooSmall { length: i64, required: i64 },
    #[error("brick construction failed verification: {check}")]
    ConstructionInvalid { check: String },
    #[error("scale parameter must be positive, got {value}")]
    NonpositiveScale { value: f64 },
}

/// Lebesgue number value: finite, or infinite when some member is the whole
/// space. Serialized as a number or the string "inf".
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LebValue {
    Finite(f64),
    Infinite,
}

impl LebValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            LebValue::Finite(v) => *v,
            LebValue::Infinite => f64::INFINITY,
        }
    }

    pub fn at_least(&self, r: f64) -> bool {
        self.as_f64() >= r - TOL
    }
}

impl Serialize for LebValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LebValue::Finite(v) => s.serialize_f64(*v),
            LebValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LebValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) if s == "inf" => Ok(LebValue::Infinite),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(LebValue::Finite)
                .ok_or_else(|| D::Error::custom("bad number")),
            other => Err(D::Error::custom(format!("bad Lebesgue value: {other}"))),
        }
    }
}

/// Lebesgue number together with the point attaining it.
#[derive(Clone, Debug, Serialize)]
pub struct LebesgueReport {
    pub value: LebValue,
    /// Point minimizing the deepest-member distance; `None` when infinite.
    pub critical_point: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessViolation {
    pub member_a: usize,
    pub member_b: usize,
    pub point_a: usize,
    pub point_b: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessReport {
    pub r: f64,
    pub disjoint: bool,
    pub violation: Option<DisjointnessViolation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementReport {
    pub refines: bool,
    /// For each finer member, the lowest coarser member containing it.
    /// Empty members map to `None`.
    pub assignment: Vec<Option<usize>>,
    pub failing_member: Option<usize>,
}

/// An indexed family of point subsets whose union is the whole space.
/// Empty members are permitted and do not affect any statistic.
#[derive(Clone, Debug)]
pub struct Cover {
    space: Arc<FiniteMetricSpace>,
    members: Vec<BTreeSet<usize>>,
}

impl Cover {
    pub fn new(
        space: Arc<FiniteMetricSpace>,
        members: Vec<BTreeSet<usize>>,
    ) -> Result<Self, CoverError> {
        let n = space.len();
        let mut covered = vec![false; n];
        for (mi, m) in members.iter().enumerate() {
            for &p in m {
                if p >= n {
                    return Err(CoverError::PointOutOfRange { member: mi, point: p });
                }
                covered[p] = true;
            }
        }
        if let Some(point) = covered.iter().position(|c| !c) {
            return Err(CoverError::UncoveredPoint { point });
        }
        Ok(Cover { space, members })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn members(&self) -> &[BTreeSet<usize>] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &BTreeSet<usize> {
        &self.members[i]
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    /// For each point, the sorted list of members containing it.
    pub fn membership(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.space.len()];
        for (mi, m) in self.members.iter().enumerate() {
            for &p in m {
                lists[p].push(mi);
            }
        }
        lists
    }

    /// Maximum number of members containing a single point.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity_witness().0
    }

    /// Multiplicity together with the first point attaining it.
    pub fn multiplicity_witness(&self) -> (usize, usize) {
        let mut counts = vec![0usize; self.space.len()];
        for m in &self.members {
            for &p in m {
                counts[p] += 1;
            }
        }
        let mut best = (0, 0);
        for (p, &c) in counts.iter().enumerate() {
            if c > best.0 {
                best = (c, p);
            }
        }
        best
    }

    /// Dimension of the cover: multiplicity minus one.
    pub fn dimension(&self) -> usize {
        self.multiplicity().saturating_sub(1)
    }

    /// Largest in-member distance; 0 for singleton or empty members.
    pub fn mesh(&self) -> f64 {
        self.members
            .par_iter()
            .map(|m| {
                let pts: Vec<usize> = m.iter().copied().collect();
                let mut best = 0.0f64;
                for (a, &i) in pts.iter().enumerate() {
                    for &j in &pts[a + 1..] {
                        best = best.max(self.space.dist(i, j));
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Distance from point `x` to the complement of member `mi`; infinite
    /// when the member is the whole space, 0 when `x` lies outside it.
    pub fn dist_to_complement(&self, mi: usize, x: usize) -> f64 {
        let m = &self.members[mi];
        if !m.contains(&x) {
            return 0.0;
        }
        let n = self.space.len();
        if m.len() == n {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        for y in 0..n {
            if !m.contains(&y) {
                best = best.min(self.space.dist(x, y));
            }
        }
        best
    }

    /// Largest r such that every open r-ball lies inside some member,
    /// computed as min over points of the deepest containing member.
    pub fn lebesgue_number(&self) -> LebesgueReport {
        let n = self.space.len();
        let complements: Vec<Vec<usize>> = self
            .members
            .iter()
            .map(|m| (0..n).filter(|p| !m.contains(p)).collect())
            .collect();
        if complements.iter().any(|c| c.is_empty()) {
            return LebesgueReport { value: LebValue::Infinite, critical_point: None };
        }
        let membership = self.membership();
        let per_point: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut best = 0.0f64;
                for &mi in &membership[x] {
                    let mut d = f64::INFINITY;
                    for &y in &complements[mi] {
                        d = d.min(self.space.dist(x, y));
                    }
                    best = best.max(d);
                }
                best
            })
            .collect();
        let mut critical = 0usize;
        for x in 1..n {
            if per_point[x] < per_point[critical] {
                critical = x;
            }
        }
        LebesgueReport {
            value: LebValue::Finite(per_point[critical]),
            critical_point: Some(critical),
        }
    }

    /// Removes empty members, returning the kept original indices.
    pub fn without_empty_members(&self) -> (Cover, Vec<usize>) {
        let mut kept = Vec::new();
        let mut members = Vec::new();
        for (i, m) in self.members.iter().enumerate() {
            if !m.is_empty() {
                kept.push(i);
                members.push(m.clone());
            }
        }
        (
            Cover { space: self.space.clone(), members },
            kept,
        )
    }
}

/// True iff every nonempty member of `fine` is contained in some member of
/// `coarse`; the witness maps each fine member to the lowest containing index.
pub fn is_refinement(fine: &Cover, coarse: &Cover) -> Result<RefinementReport, CoverError> {
    if !same_space(&fine.space, &coarse.space) {
        return Err(CoverError::SpaceMismatch);
    }
    let mut assignment = Vec::with_capacity(fine.members.len());
    let mut failing = None;
    for (fi, fm) in fine.members.iter().enumerate() {
        if fm.is_empty() {
            assignment.push(None);
            continue;
        }
        let home = coarse
            .members
            .iter()
            .position(|cm| fm.is_subset(cm));
        if home.is_none() && failing.is_none() {
            failing = Some(fi);
        }
        assignment.push(home);
    }
    Ok(RefinementReport { refines: failing.is_none(), assignment, failing_member: failing })
}

/// True iff every pair of distinct nonempty sets in `family` is at distance
/// strictly greater than `r`.
pub fn is_r_disjoint(
    space: &FiniteMetricSpace,
    family: &[BTreeSet<usize>],
    r: f64,
) -> DisjointnessReport {
    let sets: Vec<Vec<usize>> = family.iter().map(|s| s.iter().copied().collect()).collect();
    for a in 0..sets.len() {
        if sets[a].is_empty() {
            continue;
        }
        for b in (a + 1)..sets.len() {
            if sets[b].is_empty() {
                continue;
            }
            if let Some(bound) = space.set_gap_lower_bound(&sets[a], &sets[b]) {
                if bound > r {
                    continue;
                }
            }
            for &p in &sets[a] {
                for &q in &sets[b] {
                    let d = space.dist(p, q);
                    if d <= r {
                        return DisjointnessReport {
                            r,
                            disjoint: false,
                            violation: Some(DisjointnessViolation {
                                member_a: a,
                                member_b: b,
                                point_a: p,
                                point_b: q,
                                distance: d,
                            }),
                        };
                    }
                }
            }
        }
    }
    DisjointnessReport { r, disjoint: true, violation: None }
}

/// Reassembles a refinement on the index set of the original cover: each
/// refinement member joins the lowest-indexed original member containing it.
/// The result W satisfies W_i subset of U_i, covers the space, and has
/// multiplicity at most that of the refinement and Lebesgue number at least
/// that of the refinement.
pub fn shrink_to_indexed(refinement: &Cover, original: &Cover) -> Result<Cover, CoverError> {
    let report = is_refinement(refinement, original)?;
    if !report.refines {
        return Err(CoverError::NotARefinement {
            member: report.failing_member.unwrap_or_default(),
        });
    }
    let mut members = vec![BTreeSet::new(); original.members.len()];
    for (fi, fm) in refinement.members.iter().enumerate() {
        if let Some(home) = report.assignment[fi] {
            members[home].extend(fm.iter().copied());
        }
    }
    Cover::new(original.space.clone(), members)
}

/// A cover split into disjointness classes: each family is r-disjoint and the
/// flattened members form a cover.
#[derive(Clone, Debug)]
pub struct ColoredCover {
    cover: Cover,
    families: Vec<Vec<usize>>,
    r: f64,
}

impl ColoredCover {
    pub fn new(cover: Cover, families: Vec<Vec<usize>>, r: f64) -> Result<Self, CoverError> {
        if r <= 0.0 {
            return Err(CoverError::NonpositiveScale { value: r });
        }
        let mut seen = vec![false; cover.member_count()];
        for (fi, fam) in families.iter().enumerate() {
            for &m in fam {
                if m >= cover.member_count() || seen[m] {
                    return Err(CoverError::BadFamily { family: fi, member: m });
                }
                seen[m] = true;
            }
        }
        if let Some(member) = seen.iter().position(|s| !s) {
            return Err(CoverError::UnassignedMember { member });
        }
        for (fi, fam) in families.iter().enumerate() {
            let sets: Vec<BTreeSet<usize>> =
                fam.iter().map(|&m| cover.member(m).clone()).collect();
            let report = is_r_disjoint(cover.space(), &sets, r);
            if let Some(v) = report.violation {
                return Err(CoverError::FamilyNotDisjoint {
                    family: fi,
                    r,
                    member_a: fam[v.member_a],
                    member_b: fam[v.member_b],
                    distance: v.distance,
                });
            }
        }
        Ok(ColoredCover { cover, families, r })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn families(&self) -> &[Vec<usize>] {
        &self.families
    }

    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn family_members(&self, fi: usize) -> Vec<BTreeSet<usize>> {
        self.families[fi]
            .iter()
            .map(|&m| self.cover.member(m).clone())
            .collect()
    }
}

fn interval_member(space_start: i64, space_end: i64, lo: i64, hi: i64) -> BTreeSet<usize> {
    // points of [lo, hi) clipped to [space_start, space_end], as indices
    let lo = lo.max(space_start);
    let hi = (hi - 1).min(space_end);
    (lo..=hi).map(|x| (x - space_start) as usize).collect()
}

/// Two families of length-5L interval bricks on a 6L period, offset by 3L.
/// Consecutive bricks of one family sit L+1 apart, so each family is
/// L-disjoint; the deep cores of the bricks tile the line, so the Lebesgue
/// number is at least L. Mesh is 5L - 1 and multiplicity 2.
pub fn brick_cover_line(window: (i64, i64), l: i64) -> Result<ColoredCover, CoverError> {
    let (a, b) = window;
    if l < 1 {
        return Err(CoverError::NonpositiveScale { value: l as f64 });
    }
    let length = b - a + 1;
    if length < 8 * l {
        return Err(CoverError::WindowTooSmall { length, required: 8 * l });
    }
    let space = FiniteMetricSpace::interval(a, b)
        .expect("window validated nonempty")
        .into_arc();
    let period = 6 * l;
    let brick = 5 * l;
    let mut members = Vec::new();
    let mut families = vec![Vec::new(), Vec::new()];
    for (fi, offset) in [(0i64, 0i64), (1, 3 * l)].map(|(f, o)| (f as usize, o)) {
        let k_lo = (a - offset - brick).div_euclid(period);
        let k_hi = (b - offset).div_euclid(period) + 1;
        for k in k_lo..=k_hi {
            let lo = period * k + offset;
            let m = interval_member(a, b, lo, lo + brick);
            if !m.is_empty() {
                families[fi].push(members.len());
                members.push(m);
            }
        }
    }
    let cover = Cover::new(space, members)?;
    let colored = ColoredCover::new(cover, families, l as f64)?;
    verify_brick_contract(&colored, l as f64, 5.0 * l as f64, 2)?;
    Ok(colored)
}

/// Three families of enlarged wall bricks on the square integer window under
/// the sup metric. Base bricks are 8L x 4L with alternate rows offset 4L;
/// each is enlarged by a margin of L and colored by (k + 2 (j mod 2)) mod 3.
/// Same-color bricks stay at least 2L+1 apart, the base partition keeps the
/// Lebesgue number at least L, multiplicity is at most 3, and mesh is at most
/// 20L.
pub fn brick_cover_grid(window: (i64, i64), l: i64) -> Result<ColoredCover, CoverError> {
    let (a, b) = window;
    if l < 1 {
        return Err(CoverError::NonpositiveScale { value: l as f64 });
    }
    let side = b - a + 1;
    if side < 16 * l {
        return Err(CoverError::WindowTooSmall { length: side, required: 16 * l });
    }
    let space = FiniteMetricSpace::grid(a, b, a, b)
        .expect("window validated nonempty")
        .into_arc();
    let width = 8 * l;
    let height = 4 * l;
    let side_u = side as usize;
    let mut members: Vec<BTreeSet<usize>> = Vec::new();
    let mut families = vec![Vec::new(), Vec::new(), Vec::new()];
    let j_lo = (a - l).div_euclid(height);
    let j_hi = (b + l).div_euclid(height);
    for j in j_lo..=j_hi {
        let offset = if j.rem_euclid(2) == 1 { 4 * l } else { 0 };
        let k_lo = (a - l - offset - width).div_euclid(width);
        let k_hi = (b + l - offset).div_euclid(width);
        for k in k_lo..=k_hi {
            let x_lo = (width * k + offset - l).max(a);
            let x_hi = (width * k + offset + width + l - 1).min(b);
            let y_lo = (height * j - l).max(a);
            let y_hi = (height * j + height + l - 1).min(b);
            if x_lo > x_hi || y_lo > y_hi {
                continue;
            }
            let mut m = BTreeSet::new();
            for y in y_lo..=y_hi {
                for x in x_lo..=x_hi {
                    m.insert((y - a) as usize * side_u + (x - a) as usize);
                }
            }
            let color = (k + 2 * j.rem_euclid(2)).rem_euclid(3) as usize;
            families[color].push(members.len());
            members.push(m);
        }
    }
    let cover = Cover::new(space, members)?;
    let colored = ColoredCover::new(cover, families, l as f64)?;
    verify_brick_contract(&colored, l as f64, 20.0 * l as f64, 3)?;
    Ok(colored)
}

/// Generic re-verification of a brick contract; constructions are never
/// trusted.
fn verify_brick_contract(
    colored: &ColoredCover,
    l: f64,
    max_mesh: f64,
    max_mult: usize,
) -> Result<(), CoverError> {
    for (fi, _) in colored.families().iter().enumerate() {
        let sets = colored.family_members(fi);
        let report = is_r_disjoint(colored.cover().space(), &sets, l);
        if !report.disjoint {
            return Err(CoverError::ConstructionInvalid {
                check: format!("family {fi} is not {l}-disjoint: {:?}", report.violation),
            });
        }
    }
    let leb = colored.cover().lebesgue_number();
    if !leb.value.at_least(l) {
        return Err(CoverError::ConstructionInvalid {
            check: format!(
                "Lebesgue number {} below {l} at point {:?}",
                leb.value.as_f64(),
                leb.critical_point
            ),
        });
    }
    let mesh = colored.cover().mesh();
    if mesh > max_mesh + TOL {
        return Err(CoverError::ConstructionInvalid {
            check: format!("mesh {mesh} exceeds {max_mesh}"),
        });
    }
    let (mult, witness) = colored.cover().multiplicity_witness();
    if mult > max_mult {
        return Err(CoverError::ConstructionInvalid {
            check: format!("multiplicity {mult} exceeds {max_mult} at point {witness}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::PointId;

    fn interval_cover(a: i64, b: i64, members: &[(i64, i64)]) -> Cover {
        let space = FiniteMetricSpace::interval(a, b).unwrap().into_arc();
        let sets = members
            .iter()
            .map(|&(lo, hi)| ((lo - a)..=(hi - a)).map(|x| x as usize).collect())
            .collect();
        Cover::new(space, sets).unwrap()
    }

    #[test]
    fn lebesgue_of_two_interval_cover() {
        let cover = interval_cover(0, 9, &[(0, 6), (4, 9)]);
        let report = cover.lebesgue_number();
        assert_eq!(report.value, LebValue::Finite(2.0));
        assert_eq!(report.critical_point, Some(5));
    }

    #[test]
    fn whole_space_member_gives_infinite() {
        let cover = interval_cover(0, 9, &[(0, 9), (2, 5)]);
        let report = cover.lebesgue_number();
        assert_eq!(report.value, LebValue::Infinite);
        assert!(report.critical_point.is_none());
    }

    #[test]
    fn singleton_cover_has_unit_lebesgue() {
        let space = FiniteMetricSpace::interval(0, 9).unwrap().into_arc();
        let members = (0..10).map(|p| BTreeSet::from([p])).collect();
        let cover = Cover::new(space, members).unwrap();
        assert_eq!(cover.lebesgue_number().value, LebValue::Finite(1.0));
        assert_eq!(cover.mesh(), 0.0);
        assert_eq!(cover.multiplicity(), 1);
    }

    #[test]
    fn multiplicity_counts_overlaps() {
        let space = FiniteMetricSpace::interval(0, 3).unwrap().into_arc();
        let members = vec![
            BTreeSet::from([0, 1]),
            BTreeSet::from([1, 2]),
            BTreeSet::from([2, 3]),
        ];
        let cover = Cover::new(space, members).unwrap();
        assert_eq!(cover.multiplicity(), 2);
        assert_eq!(cover.dimension(), 1);
        let whole = interval_cover(0, 9, &[(0, 9)]);
        assert_eq!(whole.multiplicity(), 1);
        assert_eq!(whole.dimension(), 0);
    }

    #[test]
    fn mesh_is_max_member_diameter() {
        let cover = interval_cover(0, 9, &[(0, 6), (4, 9)]);
        assert_eq!(cover.mesh(), 6.0);
    }

    #[test]
    fn refinement_checks() {
        let coarse = interval_cover(0, 9, &[(0, 3), (4, 9)]);
        let fine = interval_cover(0, 9, &[(0, 2), (3, 3), (4, 7), (8, 9)]);
        let report = is_refinement(&fine, &coarse).unwrap();
        assert!(report.refines);
        assert_eq!(report.assignment, vec![Some(0), Some(0), Some(1), Some(1)]);

        let self_report = is_refinement(&coarse, &coarse).unwrap();
        assert!(self_report.refines);
        assert_eq!(self_report.assignment, vec![Some(0), Some(1)]);

        let space = coarse.space().clone();
        let straddler = Cover::new(
            space.clone(),
            vec![BTreeSet::from([0, 5]), (0..10).collect()],
        )
        .unwrap();
        let report = is_refinement(&straddler, &coarse).unwrap();
        assert!(!report.refines);
        assert_eq!(report.failing_member, Some(0));
    }

    #[test]
    fn refinement_requires_same_space() {
        let a = interval_cover(0, 5, &[(0, 5)]);
        let b = interval_cover(0, 6, &[(0, 6)]);
        assert!(matches!(
            is_refinement(&a, &b),
            Err(CoverError::SpaceMismatch)
        ));
    }

    #[test]
    fn r_disjointness_is_strict() {
        let space = FiniteMetricSpace::line_points(vec![0, 100]).unwrap();
        let family = vec![BTreeSet::from([0]), BTreeSet::from([1])];
        assert!(is_r_disjoint(&space, &family, 50.0).disjoint);
        let at_bound = is_r_disjoint(&space, &family, 100.0);
        assert!(!at_bound.disjoint);
        let v = at_bound.violation.unwrap();
        assert_eq!(v.distance, 100.0);
    }

    #[test]
    fn shrink_to_indexed_identity_and_partition() {
        let original = interval_cover(0, 9, &[(0, 6), (4, 9)]);
        let again = shrink_to_indexed(&original, &original).unwrap();
        assert_eq!(again.members(), original.members());

        let space = original.space().clone();
        let singletons = Cover::new(
            space,
            (0..10).map(|p| BTreeSet::from([p])).collect(),
        )
        .unwrap();
        let shrunk = shrink_to_indexed(&singletons, &original).unwrap();
        assert_eq!(shrunk.multiplicity(), 1);
        assert_eq!(shrunk.member(0), &(0..=6).collect::<BTreeSet<_>>());
        assert_eq!(shrunk.member(1), &(7..=9).collect::<BTreeSet<_>>());
        // postconditions: subsets, covering, multiplicity, Lebesgue
        for i in 0..2 {
            assert!(shrunk.member(i).is_subset(original.member(i)));
        }
        assert!(
            shrunk.lebesgue_number().value.as_f64()
                >= singletons.lebesgue_number().value.as_f64()
        );
    }

    #[test]
    fn shrink_rejects_non_refinement() {
        let original = interval_cover(0, 9, &[(0, 3), (4, 9)]);
        let bad = interval_cover(0, 9, &[(0, 5), (4, 9)]);
        assert!(matches!(
            shrink_to_indexed(&bad, &original),
            Err(CoverError::NotARefinement { member: 0 })
        ));
    }

    #[test]
    fn brick_line_contract_at_scale_ten() {
        let colored = brick_cover_line((0, 200), 10).unwrap();
        for fi in 0..2 {
            let sets = colored.family_members(fi);
            assert!(is_r_disjoint(colored.cover().space(), &sets, 10.0).disjoint);
            // gap is exactly 11, so 11-disjointness fails
            assert!(!is_r_disjoint(colored.cover().space(), &sets, 11.0).disjoint);
        }
        assert!(colored.cover().lebesgue_number().value.at_least(10.0));
        assert!(colored.cover().mesh() <= 50.0);
        assert_eq!(colored.cover().multiplicity(), 2);
    }

    #[test]
    fn brick_line_unit_scale() {
        let colored = brick_cover_line((0, 40), 1).unwrap();
        assert!(colored.cover().lebesgue_number().value.at_least(1.0));
        assert!(colored.cover().mesh() <= 5.0);
        assert!(colored.cover().multiplicity() <= 2);
    }

    #[test]
    fn brick_line_window_too_small() {
        assert!(matches!(
            brick_cover_line((0, 50), 10),
            Err(CoverError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn brick_grid_small_contract() {
        let colored = brick_cover_grid((0, 32), 1).unwrap();
        assert_eq!(colored.family_count(), 3);
        assert!(colored.cover().lebesgue_number().value.at_least(1.0));
        assert!(colored.cover().mesh() <= 20.0);
        assert!(colored.cover().multiplicity() <= 3);
    }

    #[test]
    fn brick_grid_window_too_small() {
        assert!(matches!(
            brick_cover_grid((0, 10), 1),
            Err(CoverError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn statistics_ignore_empty_members_and_order() {
        let space = FiniteMetricSpace::interval(0, 9).unwrap().into_arc();
        let base = vec![
            (0..=6).collect::<BTreeSet<usize>>(),
            (4..=9).collect(),
        ];
        let shuffled = vec![
            (4..=9).collect::<BTreeSet<usize>>(),
            BTreeSet::new(),
            (0..=6).collect(),
        ];
        let a = Cover::new(space.clone(), base).unwrap();
        let b = Cover::new(space, shuffled).unwrap();
        assert_eq!(
            a.lebesgue_number().value.as_f64(),
            b.lebesgue_number().value.as_f64()
        );
        assert_eq!(a.mesh(), b.mesh());
        assert_eq!(a.multiplicity(), b.multiplicity());
    }

    #[test]
    fn cover_must_cover() {
        let space = FiniteMetricSpace::interval(0, 3).unwrap().into_arc();
        let err = Cover::new(space, vec![BTreeSet::from([0, 1])]).unwrap_err();
        assert!(matches!(err, CoverError::UncoveredPoint { point: 2 }));
    }

    #[test]
    fn refinement_lowers_lebesgue() {
        // property: a refinement never has a larger Lebesgue number
        let coarse = interval_cover(0, 30, &[(0, 20), (12, 30)]);
        let fine = interval_cover(0, 30, &[(0, 10), (8, 20), (12, 30)]);
        let rep = is_refinement(&fine, &coarse).unwrap();
        assert!(rep.refines);
        assert!(
            fine.lebesgue_number().value.as_f64()
                <= coarse.lebesgue_number().value.as_f64() + TOL
        );
    }

    #[test]
    fn brick_line_points_have_ids() {
        let colored = brick_cover_line((0, 80), 10).unwrap();
        let space = colored.cover().space();
        assert_eq!(space.id(0), &PointId::Int(0));
    }
}
