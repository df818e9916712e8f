//! Finite-scale asymptotic-dimension witnesses: verification of r-disjoint
//! family covers, conversion of colored covers to plain ones, dimension
//! reduction through intersection with disjoint families, promotion of a
//! refiner to one more member, and a search-based refiner oracle.
//!
//! Every refiner output passing through this module is re-verified with the
//! generic cover checkers; no construction is trusted.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cover::{
    is_r_disjoint, is_refinement, shrink_to_indexed, ColoredCover, Cover, CoverError,
    DisjointnessViolation, LebValue,
};
use crate::metric::TOL;

#[derive(Debug, Error)]
pub enum AsdimError {
    #[error("colored cover has {got} families, expected {expected}")]
    FamilyCountMismatch { got: usize, expected: usize },
    #[error("Ostrand verification failed at scale {r}: {detail}")]
    OstrandFailed { r: f64, detail: String },
    #[error("refiner failed: {0}")]
    RefinerFailed(String),
    #[error("input cover rejected: Lebesgue number {actual} below required {required}")]
    LebesgueTooSmall { required: f64, actual: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("verification failed: {check}")]
    VerificationFailed { check: String },
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyCheck {
    pub family: usize,
    pub disjoint: bool,
    pub violation: Option<DisjointnessViolation>,
}

/// Result of checking an Ostrand-style witness: n+1 r-disjoint families whose
/// flattened members form a cover with Lebesgue number at least r.
#[derive(Clone, Debug, Serialize)]
pub struct OstrandReport {
    pub families_checked: usize,
    pub r: f64,
    pub disjointness: Vec<FamilyCheck>,
    pub lebesgue: LebValue,
    pub mesh: f64,
    pub verdict: bool,
}

/// Checks the finite-scale witness condition at scale `r` with `n + 1`
/// families.
pub fn verify_ostrand(
    colored: &ColoredCover,
    r: f64,
    n: usize,
) -> Result<OstrandReport, AsdimError> {
    if colored.family_count() != n + 1 {
        return Err(AsdimError::FamilyCountMismatch {
            got: colored.family_count(),
            expected: n + 1,
        });
    }
    let mut disjointness = Vec::new();
    let mut all_disjoint = true;
    for fi in 0..colored.family_count() {
        let sets = colored.family_members(fi);
        let report = is_r_disjoint(colored.cover().space(), &sets, r);
        all_disjoint &= report.disjoint;
        disjointness.push(FamilyCheck {
            family: fi,
            disjoint: report.disjoint,
            violation: report.violation,
        });
    }
    let leb = colored.cover().lebesgue_number();
    let mesh = colored.cover().mesh();
    let verdict = all_disjoint && leb.value.at_least(r) && mesh.is_finite();
    Ok(OstrandReport {
        families_checked: colored.family_count(),
        r,
        disjointness,
        lebesgue: leb.value,
        mesh,
        verdict,
    })
}

/// Collapses each family to the union of its members, giving a cover with one
/// member per family. Multiplicity is bounded by the family count and the
/// Lebesgue number can only grow.
pub fn colored_to_plain(colored: &ColoredCover) -> Cover {
    let members: Vec<BTreeSet<usize>> = colored
        .families()
        .iter()
        .map(|fam| {
            let mut u = BTreeSet::new();
            for &mi in fam {
                u.extend(colored.cover().member(mi).iter().copied());
            }
            u
        })
        .collect();
    Cover::new(colored.cover().space().clone(), members)
        .expect("union of a cover still covers")
}

/// A capability producing verified refinements: covers with Lebesgue number
/// at least `t` go in, refinements with Lebesgue number at least `s` and
/// multiplicity at most `max_mult` come out. [`RefinerOracle::refine`]
/// re-checks all three properties on every call.
pub struct RefinerOracle {
    name: String,
    s: f64,
    t: f64,
    max_mult: usize,
    #[allow(clippy::type_complexity)]
    call: Box<dyn Fn(&Cover) -> Result<Cover, AsdimError> + Send + Sync>,
}

impl RefinerOracle {
    pub fn new(
        name: impl Into<String>,
        s: f64,
        t: f64,
        max_mult: usize,
        call: impl Fn(&Cover) -> Result<Cover, AsdimError> + Send + Sync + 'static,
    ) -> Self {
        RefinerOracle { name: name.into(), s, t, max_mult, call: Box::new(call) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn max_mult(&self) -> usize {
        self.max_mult
    }

    /// Runs the capability and verifies its contract: the output refines the
    /// input, has multiplicity at most `max_mult`, and Lebesgue number at
    /// least `s`.
    pub fn refine(&self, cover: &Cover) -> Result<Cover, AsdimError> {
        let refined = (self.call)(cover)?;
        let report = is_refinement(&refined, cover)?;
        if !report.refines {
            return Err(AsdimError::RefinerFailed(format!(
                "output member {:?} is not contained in any input member",
                report.failing_member
            )));
        }
        let mult = refined.multiplicity();
        if mult > self.max_mult {
            return Err(AsdimError::RefinerFailed(format!(
                "output multiplicity {mult} exceeds {}",
                self.max_mult
            )));
        }
        let leb = refined.lebesgue_number();
        if !leb.value.at_least(self.s) {
            return Err(AsdimError::RefinerFailed(format!(
                "output Lebesgue number {} below {}",
                leb.value.as_f64(),
                self.s
            )));
        }
        Ok(refined)
    }

    /// Search-backed oracle; see [`search_refinement`].
    pub fn search(s: f64, t: f64, target_mult: usize, budget: usize, seed: u64) -> Self {
        RefinerOracle::new("search", s, t, target_mult, move |cover: &Cover| {
            search_refinement(cover, s, target_mult, budget, seed).ok_or_else(|| {
                AsdimError::RefinerFailed(format!(
                    "search exhausted without a multiplicity-{target_mult} refinement at Lebesgue {s}"
                ))
            })
        })
    }

    /// Brick-backed oracle for spaces on the integer line: any cover with
    /// Lebesgue number at least 5 ceil(s) is refined by interval bricks at
    /// scale ceil(s), which have multiplicity 2.
    pub fn brick_line(s: f64, t: f64) -> Result<Self, AsdimError> {
        let l = s.ceil().max(1.0) as i64;
        if t < 5.0 * l as f64 {
            return Err(AsdimError::InvalidParameters(format!(
                "brick refiner needs t >= 5 ceil(s) = {}, got t = {t}",
                5 * l
            )));
        }
        Ok(RefinerOracle::new("brick", s, t, 2, move |cover: &Cover| {
            let space = cover.space();
            let coords = space.line_coords().ok_or_else(|| {
                AsdimError::RefinerFailed("brick refiner only applies to line spaces".into())
            })?;
            let lo = *coords.iter().min().expect("nonempty space");
            let hi = *coords.iter().max().expect("nonempty space");
            let period = 6 * l;
            let brick = 5 * l;
            let mut members = Vec::new();
            for offset in [0, 3 * l] {
                let k_lo = (lo - offset - brick).div_euclid(period);
                let k_hi = (hi - offset).div_euclid(period) + 1;
                for k in k_lo..=k_hi {
                    let start = period * k + offset;
                    let member: BTreeSet<usize> = coords
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x >= start && x < start + brick)
                        .map(|(i, _)| i)
                        .collect();
                    if !member.is_empty() {
                        members.push(member);
                    }
                }
            }
            Cover::new(space.clone(), members).map_err(AsdimError::from)
        }))
    }
}

/// Searches for a refinement of `cover` with multiplicity at most
/// `target_mult` and Lebesgue number at least `target_leb`.
///
/// A cover already meeting the targets is returned unchanged. For
/// `target_mult == 1` the problem is decided exactly: a valid partition must
/// be constant on chain components of the relation d(x, y) < target_leb, so
/// one exists precisely when every component fits inside some member. For
/// larger multiplicities, points are greedily removed from their shallowest
/// members (depth measured in the input cover, ties broken by neighborhood
/// depth mass) followed by budgeted local repair; `seed` controls the
/// deterministic retry jitter. `None` signals exhaustion, not nonexistence,
/// except in the exact multiplicity-1 case.
pub fn search_refinement(
    cover: &Cover,
    target_leb: f64,
    target_mult: usize,
    budget: usize,
    seed: u64,
) -> Option<Cover> {
    assert!(target_mult >= 1, "target multiplicity must be at least 1");
    if cover.multiplicity() <= target_mult && cover.lebesgue_number().value.at_least(target_leb) {
        return Some(cover.clone());
    }
    if target_mult == 1 {
        return exact_partition_refinement(cover, target_leb);
    }
    let attempts = 3usize;
    for attempt in 0..attempts {
        if let Some(found) = greedy_attempt(cover, target_leb, target_mult, budget, seed, attempt) {
            return Some(found);
        }
    }
    None
}

/// Exact decision procedure for partition refinements: merge points at
/// distance below `r` into components, then place each component into the
/// lowest member containing it.
fn exact_partition_refinement(cover: &Cover, r: f64) -> Option<Cover> {
    let space = cover.space();
    let n = space.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if space.dist(i, j) < r {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = b.min(a);
                }
            }
        }
    }
    let mut members = vec![BTreeSet::new(); cover.member_count()];
    let mut component_home: Vec<Option<usize>> = vec![None; n];
    for x in 0..n {
        let root = find(&mut parent, x);
        if component_home[root].is_none() {
            let component: Vec<usize> =
                (0..n).filter(|&y| find(&mut parent, y) == root).collect();
            let home = (0..cover.member_count())
                .find(|&mi| component.iter().all(|y| cover.member(mi).contains(y)))?;
            component_home[root] = Some(home);
        }
        members[component_home[root].expect("assigned above")].insert(x);
    }
    let refined = Cover::new(space.clone(), members).ok()?;
    debug_assert!(refined.lebesgue_number().value.at_least(r));
    Some(refined)
}

/// Working state of a greedy attempt: current members plus, per member, the
/// input points removed from it. Since the output only shrinks the input,
/// depth in a current member is the input depth capped by the distance to the
/// removed points, which keeps re-verification passes cheap.
struct GreedyState<'a> {
    cover: &'a Cover,
    members: Vec<BTreeSet<usize>>,
    removed: Vec<BTreeSet<usize>>,
    depth: Vec<Vec<f64>>,
}

impl GreedyState<'_> {
    fn current_depth(&self, x: usize) -> f64 {
        let space = self.cover.space();
        let mut best = 0.0f64;
        for (mi, m) in self.members.iter().enumerate() {
            if !m.contains(&x) {
                continue;
            }
            let mut d = self.depth[mi][x];
            for &y in &self.removed[mi] {
                d = d.min(space.dist(x, y));
            }
            best = best.max(d);
        }
        best
    }

    fn failing_points(&self, target_leb: f64) -> Vec<usize> {
        (0..self.cover.space().len())
            .into_par_iter()
            .filter(|&x| self.current_depth(x) < target_leb - TOL)
            .collect()
    }

    fn remove(&mut self, x: usize, mi: usize) {
        self.members[mi].remove(&x);
        self.removed[mi].insert(x);
    }

    fn add_back(&mut self, x: usize, mi: usize) {
        self.members[mi].insert(x);
        self.removed[mi].remove(&x);
    }
}

fn greedy_attempt(
    cover: &Cover,
    target_leb: f64,
    target_mult: usize,
    budget: usize,
    seed: u64,
    attempt: usize,
) -> Option<Cover> {
    let space = cover.space();
    let n = space.len();
    let k = cover.member_count();
    // depths in the input cover, capped so whole-space members stay finite
    let cap = space.diameter() + 1.0;
    let complements: Vec<Vec<usize>> = (0..k)
        .into_par_iter()
        .map(|mi| (0..n).filter(|p| !cover.member(mi).contains(p)).collect())
        .collect();
    let depth: Vec<Vec<f64>> = (0..k)
        .map(|mi| {
            (0..n)
                .into_par_iter()
                .map(|x| {
                    if !cover.member(mi).contains(&x) {
                        return 0.0;
                    }
                    let mut d = cap;
                    for &y in &complements[mi] {
                        d = d.min(space.dist(x, y));
                    }
                    d
                })
                .collect()
        })
        .collect();
    let score_radius = target_leb + 1.0;
    let balls: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|x| space.ball(x, score_radius))
        .collect();
    let mut score: Vec<Vec<f64>> = (0..k)
        .map(|mi| {
            (0..n)
                .into_par_iter()
                .map(|x| balls[x].iter().map(|&y| depth[mi][y]).sum())
                .collect()
        })
        .collect();
    if attempt > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        for row in score.iter_mut() {
            for v in row.iter_mut() {
                *v *= 1.0 + 0.05 * rng.random::<f64>();
            }
        }
    }

    let mut state = GreedyState {
        cover,
        members: cover.members().to_vec(),
        removed: vec![BTreeSet::new(); k],
        depth,
    };
    // trim over-covered points, shallowest member first
    for x in 0..n {
        let mut owners: Vec<usize> =
            (0..k).filter(|&mi| state.members[mi].contains(&x)).collect();
        if owners.len() <= target_mult {
            continue;
        }
        owners.sort_by(|&a, &b| {
            state.depth[a][x]
                .total_cmp(&state.depth[b][x])
                .then(score[a][x].total_cmp(&score[b][x]))
                .then(a.cmp(&b))
        });
        let excess = owners.len() - target_mult;
        for &mi in owners.iter().take(excess) {
            state.remove(x, mi);
        }
    }

    let debug = std::env::var("COARSE_SEARCH_DEBUG").is_ok();
    let rounds = budget.clamp(1, 32);
    // ball/member pairs committed by repair; never removed again
    let mut pinned: BTreeSet<(usize, usize)> = BTreeSet::new();
    for round in 0..rounds {
        let failing = state.failing_points(target_leb);
        if debug {
            eprintln!(
                "attempt {attempt} round {round}: {} failing, {} pinned",
                failing.len(),
                pinned.len()
            );
        }
        if failing.is_empty() {
            let refined = Cover::new(space.clone(), state.members.clone()).ok()?;
            if refined.multiplicity() <= target_mult
                && refined.lebesgue_number().value.at_least(target_leb)
                && is_refinement(&refined, cover).ok()?.refines
            {
                return Some(refined);
            }
            return None;
        }
        for &x in &failing {
            if state.current_depth(x) >= target_leb - TOL {
                continue; // fixed while repairing an earlier point
            }
            if !repair_point(&mut state, x, target_leb, target_mult, &score, &mut pinned) {
                if debug {
                    eprintln!("attempt {attempt}: unrepairable point {x}");
                }
                return None;
            }
        }
    }
    None
}

/// Repairs one shallow point by forcing its whole ball into some input member
/// deep enough to hold it. Hosts are tried deepest-first; displaced points
/// are removed from their shallowest other member, and the whole edit rolls
/// back when pinned commitments block it.
fn repair_point(
    state: &mut GreedyState<'_>,
    x: usize,
    target_leb: f64,
    target_mult: usize,
    score: &[Vec<f64>],
    pinned: &mut BTreeSet<(usize, usize)>,
) -> bool {
    let space = state.cover.space().clone();
    let k = state.cover.member_count();
    let ball = space.ball(x, target_leb);
    let mut candidates: Vec<(usize, f64)> = (0..k)
        .filter_map(|mi| {
            let dmin = ball
                .iter()
                .map(|&y| state.depth[mi][y])
                .fold(f64::INFINITY, f64::min);
            (dmin > 0.0).then_some((mi, dmin))
        })
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    'host: for &(host, _) in &candidates {
        enum Op {
            Added(usize, usize),
            Dropped(usize, usize),
        }
        let mut log: Vec<Op> = Vec::new();
        let rollback = |state: &mut GreedyState<'_>, log: Vec<Op>| {
            for op in log.into_iter().rev() {
                match op {
                    Op::Added(y, mi) => state.remove(y, mi),
                    Op::Dropped(y, mi) => state.add_back(y, mi),
                }
            }
        };
        for &y in &ball {
            if !state.members[host].contains(&y) {
                state.add_back(y, host);
                log.push(Op::Added(y, host));
            }
            let mut owners: Vec<usize> =
                (0..k).filter(|&mi| state.members[mi].contains(&y)).collect();
            if owners.len() <= target_mult {
                continue;
            }
            owners.sort_by(|&a, &b| {
                state.depth[a][y]
                    .total_cmp(&state.depth[b][y])
                    .then(score[a][y].total_cmp(&score[b][y]))
                    .then(a.cmp(&b))
            });
            let mut excess = owners.len() - target_mult;
            for &mi in &owners {
                if excess == 0 {
                    break;
                }
                if mi != host && !pinned.contains(&(y, mi)) {
                    state.remove(y, mi);
                    log.push(Op::Dropped(y, mi));
                    excess -= 1;
                }
            }
            if excess > 0 {
                rollback(state, log);
                continue 'host;
            }
        }
        for &y in &ball {
            pinned.insert((y, host));
        }
        return true;
    }
    false
}

/// Dimension reduction through a colored cover: refine the family-union cover
/// to multiplicity n+1, then intersect each refined member with the members
/// of the disjoint family it lives in. Verified output: mesh at most the
/// colored mesh, dimension at most n, Lebesgue number at least min(s, t/2).
pub fn reduce_dimension(
    colored: &ColoredCover,
    n: usize,
    refiner: &RefinerOracle,
) -> Result<Cover, AsdimError> {
    let t = colored.r();
    let s = refiner.s();
    if s > t / 2.0 + TOL {
        return Err(AsdimError::InvalidParameters(format!(
            "need s <= t/2 so that balls meet one family member; got s = {s}, t = {t}"
        )));
    }
    if refiner.max_mult() > n + 1 {
        return Err(AsdimError::InvalidParameters(format!(
            "refiner multiplicity bound {} exceeds n + 1 = {}",
            refiner.max_mult(),
            n + 1
        )));
    }
    let ostrand = verify_ostrand(colored, t, n + 1)?;
    if !ostrand.verdict {
        return Err(AsdimError::OstrandFailed {
            r: t,
            detail: format!(
                "lebesgue {:?}, disjoint families {}",
                ostrand.lebesgue,
                ostrand.disjointness.iter().filter(|d| d.disjoint).count()
            ),
        });
    }
    let plain = colored_to_plain(colored);
    let refined = refiner.refine(&plain)?;
    let assignment = is_refinement(&refined, &plain)?.assignment;
    let mut members: Vec<BTreeSet<usize>> = Vec::new();
    for (vi, v) in refined.members().iter().enumerate() {
        let Some(home) = assignment[vi] else { continue };
        for &mi in &colored.families()[home] {
            let piece: BTreeSet<usize> = v
                .intersection(colored.cover().member(mi))
                .copied()
                .collect();
            if !piece.is_empty() {
                members.push(piece);
            }
        }
    }
    let out = Cover::new(colored.cover().space().clone(), members)
        .map_err(|e| AsdimError::VerificationFailed { check: format!("output not a cover: {e}") })?;
    let colored_mesh = colored.cover().mesh();
    let out_mesh = out.mesh();
    if out_mesh > colored_mesh + TOL {
        return Err(AsdimError::VerificationFailed {
            check: format!("output mesh {out_mesh} exceeds colored mesh {colored_mesh}"),
        });
    }
    let mult = out.multiplicity();
    if mult > n + 1 {
        return Err(AsdimError::VerificationFailed {
            check: format!("output multiplicity {mult} exceeds {}", n + 1),
        });
    }
    let required = s.min(t / 2.0);
    let leb = out.lebesgue_number();
    if !leb.value.at_least(required) {
        return Err(AsdimError::VerificationFailed {
            check: format!(
                "output Lebesgue number {} below min(s, t/2) = {required}",
                leb.value.as_f64()
            ),
        });
    }
    Ok(out)
}

/// Promotes a refiner for (n+2)-member covers at scales (s, t) to one for
/// (n+3)-member covers at scales (q, 4t) with q = min(s, 2t): the region
/// where the last member is not locally everything is carved out, covered by
/// the first n+2 members extended across the rest of the space, refined by
/// the inner oracle, and restricted back.
pub fn promote_refiner(inner: Arc<RefinerOracle>, n: usize) -> Result<RefinerOracle, AsdimError> {
    if inner.max_mult() > n + 1 {
        return Err(AsdimError::InvalidParameters(format!(
            "inner refiner multiplicity bound {} exceeds n + 1 = {}",
            inner.max_mult(),
            n + 1
        )));
    }
    let t = inner.t();
    let s = inner.s();
    let q = s.min(2.0 * t);
    let r = 4.0 * t;
    let name = format!("promoted:{}", inner.name());
    let oracle_inner = inner.clone();
    Ok(RefinerOracle::new(name, q, r, n + 2, move |cover: &Cover| {
        let k = cover.member_count();
        if k != n + 3 {
            return Err(AsdimError::InvalidParameters(format!(
                "promoted refiner expects {} members, got {k}",
                n + 3
            )));
        }
        let leb = cover.lebesgue_number();
        if !leb.value.at_least(r) {
            return Err(AsdimError::LebesgueTooSmall { required: r, actual: leb.value.as_f64() });
        }
        let space = cover.space();
        let np = space.len();
        let last = k - 1;
        let w_last = cover.member(last);
        // points whose 4t-ball escapes the last member
        let bad: Vec<usize> = (0..np)
            .into_par_iter()
            .filter(|&x| space.ball(x, 4.0 * t).iter().any(|y| !w_last.contains(y)))
            .collect();
        let mut a_set: BTreeSet<usize> = BTreeSet::new();
        for &x in &bad {
            a_set.extend(space.ball(x, 2.0 * t));
        }
        if a_set.is_empty() {
            // the last member locally swallows every ball, hence equals X
            let mut members = vec![BTreeSet::new(); k - 1];
            members.push(w_last.clone());
            return Cover::new(space.clone(), members).map_err(AsdimError::from);
        }
        let a_vec: Vec<usize> = a_set.iter().copied().collect();
        // lemma check: the first n+2 members restricted to A cover it with
        // Lebesgue number at least 2t in the subspace metric
        let sub = Arc::new(space.subspace(&a_vec));
        let restricted: Vec<BTreeSet<usize>> = (0..k - 1)
            .map(|mi| {
                a_vec
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| cover.member(mi).contains(&p))
                    .map(|(local, _)| local)
                    .collect()
            })
            .collect();
        let restricted_cover = Cover::new(sub, restricted).map_err(|e| {
            AsdimError::VerificationFailed {
                check: format!("restriction of the leading members does not cover A: {e}"),
            }
        })?;
        let leb_a = restricted_cover.lebesgue_number();
        if !leb_a.value.at_least(2.0 * t) {
            return Err(AsdimError::VerificationFailed {
                check: format!(
                    "restricted cover has Lebesgue number {} below 2t = {}",
                    leb_a.value.as_f64(),
                    2.0 * t
                ),
            });
        }
        // extend each restricted member across the complement of A
        let complement: BTreeSet<usize> =
            (0..np).filter(|p| !a_set.contains(p)).collect();
        let extended: Vec<BTreeSet<usize>> = (0..k - 1)
            .map(|mi| {
                let mut m: BTreeSet<usize> = cover
                    .member(mi)
                    .intersection(&a_set)
                    .copied()
                    .collect();
                m.extend(complement.iter().copied());
                m
            })
            .collect();
        let extended_cover = Cover::new(space.clone(), extended)?;
        let leb_ext = extended_cover.lebesgue_number();
        if !leb_ext.value.at_least(t) {
            return Err(AsdimError::VerificationFailed {
                check: format!(
                    "extended cover has Lebesgue number {} below t = {t}",
                    leb_ext.value.as_f64()
                ),
            });
        }
        let refined = oracle_inner.refine(&extended_cover)?;
        let shrunk = shrink_to_indexed(&refined, &extended_cover)?;
        let mut members: Vec<BTreeSet<usize>> = (0..k - 1)
            .map(|mi| shrunk.member(mi).intersection(&a_set).copied().collect())
            .collect();
        members.push(w_last.clone());
        Cover::new(space.clone(), members).map_err(|e| AsdimError::VerificationFailed {
            check: format!("promoted output is not a cover: {e}"),
        })
    }))
}
