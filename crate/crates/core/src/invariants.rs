//! Counting invariants `J^alpha`, `Jhat^alpha` and the pipelines that check
//! chamber constancy, wall-crossing invariance and the large-volume limit.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{Complex, QuadExt, Q};
use crate::charge::{central_charge, p_equality_test, ChargeError, ChargeMap, KCharge, StabilityPoint};
use crate::enumeration::{
    effective_candidates, effective_from_pool, enumerate_bounded, enumerate_on_ray, ordered_decompositions, ray_closure,
    Decomposition, EnumerationBudget, EnumerationError,
};
use crate::hall::{
    delta_to_epsilon_over, epsilon_invariance_check, transform_delta_across_wall, FormalPoly, HallError,
    ITable, PhaseContext, RatFunc, RayScope,
};
use crate::lattice::{MukaiVector, NsLattice, RationalDivisor};
use crate::walls::{classify_point, default_min_step, find_crossing, CrossingSite, SliceRegion, Wall, WallError, WallSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("points lie in different chambers or on a wall")]
    ChamberMismatch,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("tables disagree on {0}")]
    TableMismatch(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Hall(#[from] HallError),
    #[error(transparent)]
    Wall(#[from] WallError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Charge(#[from] ChargeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contribution {
    pub parts: Vec<MukaiVector>,
    pub weight: FormalPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub alpha: MukaiVector,
    pub decomposition_count: usize,
    pub j: FormalPoly,
    pub provenance: Vec<Contribution>,
}

/// `q^{-sum_{j>i} chi(a_j, a_i)} (-1)^{n-1} (q-1)/n prod I^{a_i}`.
pub fn j_weight(lattice: &NsLattice, parts: &[MukaiVector], itable: &ITable) -> FormalPoly {
    let n = parts.len() as i64;
    let mut exp = 0i64;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            exp -= lattice.chi_int(&parts[j], &parts[i]);
        }
    }
    let sign = if n % 2 == 1 { 1 } else { -1 };
    let coef = RatFunc::q_pow(exp)
        .mul(&RatFunc::q_pow(1).sub(&RatFunc::one()))
        .scale(&Q::new(BigInt::from(sign), BigInt::from(n)));
    let mut w = FormalPoly::lambda(coef);
    for p in parts {
        w = w.mul(&itable.get(p));
        if w.is_zero() {
            break;
        }
    }
    w
}

/// `J^alpha` over the given decompositions, checked against `(q-1)` times the
/// `c_alpha` coefficient of the logarithm.
pub fn j_over(
    lattice: &NsLattice,
    decomps: &[Decomposition],
    itable: &ITable,
    alpha: &MukaiVector,
) -> Result<InvariantReport, InvariantError> {
    let mut j = FormalPoly::zero();
    let mut provenance = Vec::with_capacity(decomps.len());
    for d in decomps {
        let w = j_weight(lattice, d.parts(), itable);
        j = j.add(&w);
        provenance.push(Contribution { parts: d.parts().to_vec(), weight: w });
    }
    let eps = delta_to_epsilon_over(lattice, decomps, itable, alpha).coefficient(alpha);
    let qm1 = RatFunc::q_pow(1).sub(&RatFunc::one());
    if eps.scale(&qm1) != j {
        return Err(InvariantError::Inconsistent(format!("J^{alpha} differs from (q-1) eps_bar")));
    }
    Ok(InvariantReport { alpha: alpha.clone(), decomposition_count: decomps.len(), j, provenance })
}

pub fn j_alpha(p: &StabilityPoint, alpha: &MukaiVector, itable: &ITable) -> Result<InvariantReport, InvariantError> {
    if central_charge(p, alpha).is_zero() {
        return Ok(InvariantReport { alpha: alpha.clone(), decomposition_count: 0, j: FormalPoly::zero(), provenance: vec![] });
    }
    let cands = effective_candidates(p, alpha)?;
    let decomps = ordered_decompositions(&cands, |v| central_charge(p, v), alpha, None);
    j_over(p.lattice(), &decomps, itable, alpha)
}

/// Sheaf-class surrogate: `r > 0`, or `r = 0` with `l.omega > 0`, or
/// `r = l = 0` with `s > 0`.
pub fn sheaf_surrogate(lattice: &NsLattice, omega: &RationalDivisor, v: &MukaiVector) -> bool {
    if v.r != 0 {
        return v.r > 0;
    }
    if v.l.iter().any(|x| *x != 0) {
        return lattice.dot_q(&v.ns_class(), &omega.0) > Q::zero();
    }
    v.s > 0
}

fn untwisted(lattice: &NsLattice, omega: &RationalDivisor) -> Result<StabilityPoint, InvariantError> {
    Ok(StabilityPoint::new(lattice, RationalDivisor::zero(lattice.rank()), omega.clone())?)
}

/// Classes entering `Jhat^alpha`: sheaf surrogates with `v^2 >= -2` and the
/// reduced Hilbert polynomial of `alpha`, no longer than `alpha` at `(0, omega)`,
/// closed under sums within that bound.
pub fn jhat_candidates(lattice: &NsLattice, omega: &RationalDivisor, alpha: &MukaiVector) -> Result<Vec<MukaiVector>, InvariantError> {
    let p = untwisted(lattice, omega)?;
    let za = central_charge(&p, alpha);
    if za.is_zero() {
        return Ok(Vec::new());
    }
    let zero = RationalDivisor::zero(lattice.rank());
    let mut base = Vec::new();
    for v in enumerate_on_ray(&p, alpha)? {
        if sheaf_surrogate(lattice, omega, &v) && p_equality_test(lattice, &zero, omega, &v, alpha)? {
            base.push(v);
        }
    }
    Ok(ray_closure(&base, |v| central_charge(&p, v), &za))
}

pub fn jhat_alpha(
    lattice: &NsLattice,
    omega: &RationalDivisor,
    alpha: &MukaiVector,
    ihat: &ITable,
) -> Result<InvariantReport, InvariantError> {
    let p = untwisted(lattice, omega)?;
    let cands = jhat_candidates(lattice, omega, alpha)?;
    let decomps = ordered_decompositions(&cands, |v| central_charge(&p, v), alpha, None);
    j_over(lattice, &decomps, ihat, alpha)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberReport {
    pub constant: bool,
    pub j0: InvariantReport,
    pub j1: InvariantReport,
    pub same_candidates: bool,
    pub aligned_pairs_proportional: bool,
}

/// Recomputes `J^alpha` at two points of one chamber and compares.
pub fn chamber_constancy_check(
    lattice: &NsLattice,
    region: &SliceRegion,
    walls: &[Wall],
    p0: &(Q, Q),
    p1: &(Q, Q),
    alpha: &MukaiVector,
    itable: &ITable,
) -> Result<ChamberReport, InvariantError> {
    let f0 = classify_point(walls, &p0.0, &p0.1);
    let f1 = classify_point(walls, &p1.0, &p1.1);
    if f0 != f1 || !f0.off_walls() {
        return Err(InvariantError::ChamberMismatch);
    }
    let s0 = region.point(lattice, &p0.0, &p0.1)?;
    let s1 = region.point(lattice, &p1.0, &p1.1)?;
    let c0 = effective_candidates(&s0, alpha)?;
    let c1 = effective_candidates(&s1, alpha)?;
    let mut proportional = true;
    for (s, c) in [(&s0, &c0), (&s1, &c1)] {
        for a in c {
            for b in c {
                if central_charge(s, a).same_ray(&central_charge(s, b)) && !a.proportional(b) {
                    proportional = false;
                }
            }
        }
    }
    let d0: BTreeSet<Decomposition> = ordered_decompositions(&c0, |v| central_charge(&s0, v), alpha, None).into_iter().collect();
    let d1: BTreeSet<Decomposition> = ordered_decompositions(&c1, |v| central_charge(&s1, v), alpha, None).into_iter().collect();
    let j0 = j_alpha(&s0, alpha, itable)?;
    let j1 = j_alpha(&s1, alpha, itable)?;
    let same = c0 == c1 && d0 == d1;
    Ok(ChamberReport { constant: same && proportional && j0.j == j1.j, j0, j1, same_candidates: same, aligned_pairs_proportional: proportional })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossReport {
    pub wall: (MukaiVector, MukaiVector),
    pub site: CrossingSite,
    /// `Z(alpha)` vanishes at the wall point.
    pub degenerate: bool,
    pub scope: Vec<MukaiVector>,
    pub epsilon_invariant: bool,
    pub j_left: FormalPoly,
    pub j_right: FormalPoly,
    pub equal: bool,
    pub left: Option<InvariantReport>,
    pub right: Option<InvariantReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossOptions {
    pub max_len: Option<usize>,
    pub min_step: Q,
}

impl Default for CrossOptions {
    fn default() -> Self {
        CrossOptions { max_len: None, min_step: default_min_step() }
    }
}

/// Crosses wall `index` of `ws`: transforms the table from the left point to
/// the wall point and on to the right point, checks invariance of
/// `eps_bar^alpha` on the way, and compares `J^alpha` on both sides. With no
/// table given, every class in play gets a formal symbol.
pub fn wall_cross_check(
    lattice: &NsLattice,
    ws: &WallSet,
    index: usize,
    itable: Option<&ITable>,
    opts: &CrossOptions,
) -> Result<CrossReport, InvariantError> {
    let region = &ws.region;
    let alpha = &ws.alpha;
    let wall = &ws.walls[index];
    let site = find_crossing(index, &ws.walls, region, &opts.min_step)?;
    let on: ChargeMap<QuadExt> = region.charge_map(lattice, &site.point.b, &site.point.t)?;
    let left = region.point(lattice, &site.left.0, &site.left.1)?;
    let right = region.point(lattice, &site.right.0, &site.right.1)?;
    let pair = (wall.vi.clone(), wall.vj.clone());
    if on.charge(alpha).is_zero() {
        return Ok(CrossReport {
            wall: pair,
            site,
            degenerate: true,
            scope: vec![],
            epsilon_invariant: true,
            j_left: FormalPoly::zero(),
            j_right: FormalPoly::zero(),
            equal: true,
            left: None,
            right: None,
        });
    }
    let mut pool: Vec<MukaiVector> = wall.members.iter().chain(&ws.parallel).cloned().collect();
    pool.push(alpha.clone());
    let scope_classes = effective_from_pool(lattice, &pool, |v| on.charge(v), alpha)?;
    let cands_left = effective_candidates(&left, alpha)?;
    let cands_right = effective_candidates(&right, alpha)?;
    let mut symbols: BTreeSet<MukaiVector> = scope_classes.iter().cloned().collect();
    symbols.extend(cands_left.iter().cloned());
    let symbols: Vec<MukaiVector> = symbols.into_iter().collect();
    let table0 = match itable {
        Some(t) => t.clone(),
        None => ITable::formal(&symbols),
    };
    let scope = RayScope::new(&on, &scope_classes, opts.max_len);
    let decomps_left = ordered_decompositions(&cands_left, |v| central_charge(&left, v), alpha, opts.max_len);
    let ctx = PhaseContext::across(&left, &on, (&wall.vi, &wall.vj))?;
    let inv = epsilon_invariance_check(lattice, &ctx, &scope, &table0, &decomps_left, alpha)?;
    let ctx2 = PhaseContext::new(&on, &right);
    let table2 = transform_delta_across_wall(lattice, &ctx2, &scope, &inv.table1, &cands_right)?;
    let decomps_right = ordered_decompositions(&cands_right, |v| central_charge(&right, v), alpha, opts.max_len);
    let jl = j_over(lattice, &decomps_left, &table0, alpha)?;
    let jr = j_over(lattice, &decomps_right, &table2, alpha)?;
    Ok(CrossReport {
        wall: pair,
        site,
        degenerate: false,
        scope: scope_classes,
        epsilon_invariant: inv.equal,
        equal: inv.equal && jl.j == jr.j,
        j_left: jl.j.clone(),
        j_right: jr.j.clone(),
        left: Some(jl),
        right: Some(jr),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVerdict {
    pub vi: MukaiVector,
    pub vj: MukaiVector,
    /// `Im(Z_k(vj) conj Z_k(vi))` in `k`.
    pub poly: crate::arith::Poly,
    pub p_equal: bool,
    /// Alignment at each sampled `k`.
    pub aligned: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeVolumeReport {
    pub alpha: MukaiVector,
    pub omega: RationalDivisor,
    pub threshold: Q,
    pub samples: Vec<Q>,
    pub verdicts: Vec<PairVerdict>,
    pub consistent: bool,
}

/// Sheaf-surrogate classes with `v^2 >= -2`, `omega.l > 0` unless `r = l = 0`,
/// and `|Z_{(0, omega)}|` at most that of `alpha`.
pub fn large_volume_candidates(lattice: &NsLattice, omega: &RationalDivisor, alpha: &MukaiVector) -> Result<Vec<MukaiVector>, InvariantError> {
    let p = untwisted(lattice, omega)?;
    let m = central_charge(&p, alpha).abs_squared();
    if m.is_zero() {
        return Ok(vec![alpha.clone()]);
    }
    let mut out: Vec<MukaiVector> = enumerate_bounded(&p, &EnumerationBudget::new(m))?
        .classes
        .into_iter()
        .filter(|v| sheaf_surrogate(lattice, omega, v) && positivity_holds(lattice, omega, v))
        .collect();
    if !out.contains(alpha) {
        out.push(alpha.clone());
        out.sort();
    }
    Ok(out)
}

fn positivity_holds(lattice: &NsLattice, omega: &RationalDivisor, v: &MukaiVector) -> bool {
    let lw = lattice.dot_q(&v.ns_class(), &omega.0);
    lw > Q::zero() || (v.r == 0 && v.l.iter().all(|x| *x == 0))
}

/// Threshold `N` beyond which alignment along `(0, k omega)` and equality of
/// reduced Hilbert polynomials agree on every candidate pair, verified at
/// `k = N, ..., N + 10`.
pub fn large_volume_threshold(
    lattice: &NsLattice,
    alpha: &MukaiVector,
    omega: &RationalDivisor,
    candidates: &[MukaiVector],
) -> Result<LargeVolumeReport, InvariantError> {
    if !positivity_holds(lattice, omega, alpha) {
        return Err(InvariantError::HypothesisViolated(format!("{alpha} has omega.l <= 0 and is not a point class")));
    }
    if let Some(v) = candidates.iter().find(|v| !positivity_holds(lattice, omega, v)) {
        return Err(InvariantError::HypothesisViolated(format!("candidate {v} has omega.l <= 0 and is not a point class")));
    }
    let zero = RationalDivisor::zero(lattice.rank());
    let mut cands = candidates.to_vec();
    if !cands.contains(alpha) {
        cands.push(alpha.clone());
    }
    cands.sort();
    cands.dedup();
    let kc: Vec<KCharge> = cands.iter().map(|v| KCharge::new(lattice, &zero, omega, v)).collect();
    let mut pairs = Vec::new();
    let mut threshold = Q::one();
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            let poly = kc[i].cross_poly(&kc[j]);
            if !poly.is_zero() {
                let b = poly.cauchy_bound();
                if b > threshold {
                    threshold = b;
                }
            }
            pairs.push((i, j, poly));
        }
    }
    let samples: Vec<Q> = (0..=10).map(|d| &threshold + Q::from_integer(BigInt::from(d))).collect();
    let mut verdicts = Vec::with_capacity(pairs.len());
    let mut consistent = true;
    for (i, j, poly) in pairs {
        let p_equal = p_equality_test(lattice, &zero, omega, &cands[i], &cands[j])?;
        let aligned: Vec<bool> = samples
            .iter()
            .map(|k| {
                let (a, b): (Complex<Q>, Complex<Q>) = (kc[i].at(k), kc[j].at(k));
                a.same_ray(&b)
            })
            .collect();
        if aligned.iter().any(|a| *a != p_equal) {
            consistent = false;
        }
        verdicts.push(PairVerdict { vi: cands[i].clone(), vj: cands[j].clone(), poly, p_equal, aligned });
    }
    Ok(LargeVolumeReport { alpha: alpha.clone(), omega: omega.clone(), threshold, samples, verdicts, consistent })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub k: Q,
    pub j: InvariantReport,
    pub jhat: InvariantReport,
    /// Both sums run over the same ordered decompositions.
    pub same_decompositions: bool,
    pub equal: bool,
}

/// `J^alpha` at `(0, k omega)` against `Jhat^alpha` at `omega`.
pub fn compare_j_jhat(
    lattice: &NsLattice,
    omega: &RationalDivisor,
    alpha: &MukaiVector,
    itable: &ITable,
    ihat: &ITable,
    k: &Q,
) -> Result<CompareReport, InvariantError> {
    let pk = untwisted(lattice, &omega.scale(k))?;
    let cj = if central_charge(&pk, alpha).is_zero() { vec![] } else { effective_candidates(&pk, alpha)? };
    let ch = jhat_candidates(lattice, omega, alpha)?;
    for v in cj.iter().filter(|v| ch.contains(v)) {
        if itable.get(v) != ihat.get(v) {
            return Err(InvariantError::TableMismatch(v.to_string()));
        }
    }
    let dj: BTreeSet<Decomposition> = ordered_decompositions(&cj, |v| central_charge(&pk, v), alpha, None).into_iter().collect();
    let ph = untwisted(lattice, omega)?;
    let dh: BTreeSet<Decomposition> = ordered_decompositions(&ch, |v| central_charge(&ph, v), alpha, None).into_iter().collect();
    let j = j_alpha(&pk, alpha, itable)?;
    let jhat = jhat_alpha(lattice, omega, alpha, ihat)?;
    let equal = j.j == jhat.j;
    Ok(CompareReport { k: k.clone(), j, jhat, same_decompositions: dj == dh, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qi};
    use crate::hall::parse_value;

    fn k3() -> NsLattice {
        NsLattice::rank_one(2, 1).unwrap()
    }
    fn mv(r: i64, l: i64, s: i64) -> MukaiVector {
        MukaiVector::new(r, vec![l], s)
    }
    fn pt(b: Q, w: Q) -> StabilityPoint {
        StabilityPoint::new(&k3(), RationalDivisor::new(vec![b]), RationalDivisor::new(vec![w])).unwrap()
    }
    fn val(s: &str) -> FormalPoly {
        parse_value(s).unwrap()
    }

    #[test]
    fn sole_decomposition() {
        let p = pt(q(1, 2), qi(2));
        let a = mv(1, 0, -1);
        let t: ITable = [(a.clone(), val("q^2+1"))].into_iter().collect();
        let r = j_alpha(&p, &a, &t).unwrap();
        assert_eq!(r.decomposition_count, 1);
        assert_eq!(r.j, val("(q-1)*(q^2+1)"));
    }

    #[test]
    fn zero_charge_gives_zero() {
        let p = pt(qi(0), qi(1));
        let r = j_alpha(&p, &mv(1, 0, 1), &ITable::formal(&[mv(1, 0, 1)])).unwrap();
        assert!(r.j.is_zero());
    }

    #[test]
    fn doubled_class() {
        let p = pt(qi(0), qi(2));
        let v0 = mv(0, 0, -1);
        let a = v0.scale(2);
        let t = ITable::formal(&[v0.clone(), a.clone()]);
        let r = j_alpha(&p, &a, &t).unwrap();
        // chi(v0, v0) = 0 here
        assert_eq!(r.j, val("(q-1)*(I[0,0,-2] - 1/2*I[0,0,-1]^2)"));
    }

    #[test]
    fn hypothesis_and_twist() {
        let h = RationalDivisor::from_ints(&[1]);
        let a = mv(1, 0, -1);
        assert!(matches!(large_volume_threshold(&k3(), &a, &h, std::slice::from_ref(&a)), Err(InvariantError::HypothesisViolated(_))));
        let t = k3().twist(&a, &[1]).unwrap();
        assert_eq!(t, mv(1, 1, 0));
        let c = large_volume_candidates(&k3(), &h, &t).unwrap();
        let r = large_volume_threshold(&k3(), &t, &h, &c).unwrap();
        assert!(r.consistent);
        assert!(r.threshold >= qi(1));
    }

    #[test]
    fn torsion_pair() {
        let h = RationalDivisor::from_ints(&[1]);
        let r = large_volume_threshold(&k3(), &mv(0, 1, 0), &h, &[mv(0, 1, 3)]).unwrap();
        assert!(r.consistent);
        assert!(r.verdicts.iter().all(|v| !v.p_equal));
    }

    #[test]
    fn compare_trivial() {
        let h = RationalDivisor::from_ints(&[1]);
        let a = mv(1, 1, 0);
        let t = ITable::formal(std::slice::from_ref(&a));
        let r = compare_j_jhat(&k3(), &h, &a, &t, &t, &qi(5)).unwrap();
        assert!(r.equal && r.same_decompositions);
        let bad: ITable = [(a.clone(), val("2"))].into_iter().collect();
        assert!(matches!(compare_j_jhat(&k3(), &h, &a, &t, &bad, &qi(5)), Err(InvariantError::TableMismatch(_))));
    }
}
