//! Bounded enumeration of Mukai vectors and of ray-aligned decompositions.
//!
//! Box derivation. Put `d = l - r beta`, `W = omega^2`, `M = max |Z|^2`.
//! `Im Z = d.omega` and, for `r != 0`, `d^2 = v^2 + r^2 W - 2 r Re Z`.
//! With `v^2 >= -2` and the Hodge index theorem (`d^2 W <= (d.omega)^2`):
//!
//! * `W r^2 - 2 sqrt(M) |r| - (M/W + 2) <= 0`, which bounds `|r|`;
//! * the positive definite form `Q(d) = 2 (d.omega)^2 / W - d^2` satisfies
//!   `Q(d) <= 2M/W + 2 + 2|r| sqrt(M) - r^2 W`, which bounds each coordinate
//!   of `d` through the diagonal of `Q^{-1}`;
//! * `Re Z = -s + l.beta - r(beta^2 - W)/2` then confines `s` to a window of
//!   width `2 sqrt(M - (Im Z)^2)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::rational::{ceil_int, ceil_sqrt, floor_int};
use crate::arith::{Complex, Scalar, Q};
use crate::charge::{central_charge, ChargeError, StabilityPoint};
use crate::lattice::{MukaiVector, NsLattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("budget must be positive")]
    InvalidBudget,
    #[error("central charge of the target class vanishes")]
    ZeroCharge,
    #[error("enumeration box too large ({0} rank values)")]
    TooLarge(String),
    #[error(transparent)]
    Charge(#[from] ChargeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_abs_squared: Q,
    pub max_rank: Option<i64>,
    pub max_s: Option<i64>,
    pub max_ns: Option<i64>,
}

impl EnumerationBudget {
    pub fn new(max_abs_squared: Q) -> Self {
        EnumerationBudget { max_abs_squared, max_rank: None, max_s: None, max_ns: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Canonically sorted.
    pub classes: Vec<MukaiVector>,
    /// Set when a hard cap cut the analytic box; the result may then be incomplete.
    pub truncated: bool,
}

fn qint(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn to_i64(x: &BigInt) -> Result<i64, EnumerationError> {
    x.to_i64().ok_or_else(|| EnumerationError::TooLarge(x.to_string()))
}

/// Inverse of a square rational matrix by Gauss–Jordan elimination.
pub(crate) fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        let d = a[k][k].clone();
        for x in a[k].iter_mut() {
            *x /= &d;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in 0..2 * n {
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Hodge-index bounds shared by point and region enumeration.
#[derive(Debug, Clone)]
pub(crate) struct HodgeBox {
    m: Q,
    sqrt_m: Q,
    w_min: Q,
    q_inv_diag: Vec<Q>,
    pub r_max: i64,
}

impl HodgeBox {
    /// `w_dir` gives the direction of omega; `w_min` bounds `omega^2` from below.
    pub(crate) fn new(lattice: &NsLattice, w_dir: &[Q], w_min: &Q, m: &Q) -> Result<Self, EnumerationError> {
        let gw = lattice.apply_q(w_dir);
        let w2 = lattice.dot_q(w_dir, w_dir);
        let n = lattice.rank();
        let form: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                (0..n).map(|j| qint(2) * &gw[i] * &gw[j] / &w2 - qint(lattice.gram()[i][j])).collect()
            })
            .collect();
        let inv = invert(&form).expect("Hodge form is definite");
        let q_inv_diag = (0..n).map(|i| inv[i][i].clone()).collect();
        let sqrt_m = Q::from_integer(ceil_sqrt(m));
        let disc = qint(2) * m + qint(2) * w_min;
        let r_bound = (&sqrt_m + Q::from_integer(ceil_sqrt(&disc))) / w_min;
        let r_max = to_i64(&floor_int(&r_bound))?;
        Ok(HodgeBox { m: m.clone(), sqrt_m, w_min: w_min.clone(), q_inv_diag, r_max })
    }

    /// Integer radii `U_i` with `|d_i| <= U_i`, or `None` when no `d` fits.
    pub(crate) fn d_radius(&self, r: i64) -> Option<Vec<BigInt>> {
        let ra = qint(r.abs());
        let b = qint(2) * &self.m / &self.w_min + qint(2) + qint(2) * &ra * &self.sqrt_m - &ra * &ra * &self.w_min;
        if b.is_negative() {
            return None;
        }
        Some(self.q_inv_diag.iter().map(|c| ceil_sqrt(&(&b * c))).collect())
    }
}

/// Cartesian product of inclusive integer ranges.
pub(crate) fn for_each_lattice_point(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|(a, b)| a > b) {
        return;
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == cur.len() {
                return;
            }
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
            i += 1;
        }
    }
}

fn clamp(lo: i64, hi: i64, cap: Option<i64>, truncated: &mut bool) -> (i64, i64) {
    match cap {
        Some(c) if lo < -c || hi > c => {
            *truncated = true;
            (lo.max(-c), hi.min(c))
        }
        _ => (lo, hi),
    }
}

/// Exactly `{ v != 0 : v^2 >= -2, |Z(v)|^2 <= m^2 }` unless truncated.
pub fn enumerate_bounded(p: &StabilityPoint, budget: &EnumerationBudget) -> Result<Enumeration, EnumerationError> {
    let m = &budget.max_abs_squared;
    if !m.is_positive() {
        return Err(EnumerationError::InvalidBudget);
    }
    let lattice = p.lattice();
    let hb = HodgeBox::new(lattice, &p.omega().0, p.omega_sq(), m)?;
    let mut truncated = false;
    let (r_lo, r_hi) = clamp(-hb.r_max, hb.r_max, budget.max_rank, &mut truncated);
    let beta = &p.beta().0;
    let map = p.map();
    let mut out = Vec::new();
    for r in r_lo..=r_hi {
        let Some(rad) = hb.d_radius(r) else { continue };
        let mut ranges = Vec::with_capacity(rad.len());
        for (bi, u) in beta.iter().zip(&rad) {
            let c = qint(r) * bi;
            let lo = to_i64(&ceil_int(&(&c - Q::from_integer(u.clone()))))?;
            let hi = to_i64(&floor_int(&(&c + Q::from_integer(u.clone()))))?;
            ranges.push(clamp(lo, hi, budget.max_ns, &mut truncated));
        }
        let mut err = None;
        for_each_lattice_point(&ranges, |l| {
            if err.is_some() {
                return;
            }
            let probe = MukaiVector::new(r, l.to_vec(), 0);
            let z0 = map.charge(&probe);
            let im2 = &z0.im * &z0.im;
            if im2 > *m {
                return;
            }
            // Re Z = z0.re - s
            let rad_s = Q::from_integer(ceil_sqrt(&(m - &im2)));
            let (lo, hi) = match (
                to_i64(&ceil_int(&(&z0.re - &rad_s))),
                to_i64(&floor_int(&(&z0.re + &rad_s))),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    err = Some(e);
                    return;
                }
            };
            let (lo, hi) = clamp(lo, hi, budget.max_s, &mut truncated);
            for s in lo..=hi {
                let v = MukaiVector::new(r, l.to_vec(), s);
                if v.is_zero() {
                    continue;
                }
                let re = &z0.re - qint(s);
                if &re * &re + &im2 > *m {
                    continue;
                }
                if lattice.pair_int(&v, &v) < BigInt::from(-2) {
                    continue;
                }
                out.push(v);
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    out.sort();
    Ok(Enumeration { classes: out, truncated })
}

/// The enumeration box itself, for independent scanning: rank bound and,
/// per NS coordinate, a range containing every admissible `l`.
pub fn analytic_box(p: &StabilityPoint, m: &Q) -> Result<(i64, Vec<(i64, i64)>), EnumerationError> {
    let hb = HodgeBox::new(p.lattice(), &p.omega().0, p.omega_sq(), m)?;
    let n = p.lattice().rank();
    let mut ranges = vec![(i64::MAX, i64::MIN); n];
    for r in -hb.r_max..=hb.r_max {
        let Some(rad) = hb.d_radius(r) else { continue };
        for i in 0..n {
            let c = qint(r) * &p.beta().0[i];
            let lo = to_i64(&ceil_int(&(&c - Q::from_integer(rad[i].clone()))))?;
            let hi = to_i64(&floor_int(&(&c + Q::from_integer(rad[i].clone()))))?;
            ranges[i] = (ranges[i].0.min(lo), ranges[i].1.max(hi));
        }
    }
    Ok((hb.r_max, ranges))
}

/// Spherical classes of positive rank with `|Z|^2` within budget, ordered by
/// increasing `|Z|^2` then canonically.
pub fn spherical_search(p: &StabilityPoint, budget: &EnumerationBudget) -> Vec<MukaiVector> {
    let mut b = budget.clone();
    if !b.max_abs_squared.is_positive() {
        b.max_abs_squared = Q::one();
    }
    let Ok(e) = enumerate_bounded(p, &b) else { return Vec::new() };
    let mut v: Vec<(Q, MukaiVector)> = e
        .classes
        .into_iter()
        .filter(|v| v.r > 0 && p.lattice().pair_int(v, v) == BigInt::from(-2))
        .map(|v| (central_charge(p, &v).abs_squared(), v))
        .filter(|(a, _)| *a <= budget.max_abs_squared)
        .collect();
    v.sort();
    v.into_iter().map(|x| x.1).collect()
}

/// Additive closure of `base` on the ray of `alpha_charge`, within
/// `|Z| <= |Z(alpha)|`. Every element of `base` must lie on that ray.
pub fn ray_closure<S: Scalar>(
    base: &[MukaiVector],
    charge: impl Fn(&MukaiVector) -> Complex<S>,
    alpha_charge: &Complex<S>,
) -> Vec<MukaiVector> {
    let bound = alpha_charge.abs_squared();
    let weight = |v: &MukaiVector| alpha_charge.dot(&charge(v));
    let base: Vec<(MukaiVector, S)> = base
        .iter()
        .map(|v| (v.clone(), weight(v)))
        .filter(|(_, w)| w.cmp_to(&bound) != Ordering::Greater)
        .collect();
    let mut seen: BTreeSet<MukaiVector> = base.iter().map(|x| x.0.clone()).collect();
    let mut frontier: Vec<(MukaiVector, S)> = base.clone();
    while let Some((v, w)) = frontier.pop() {
        for (b, wb) in &base {
            let ws = w.add(wb);
            if ws.cmp_to(&bound) == Ordering::Greater {
                continue;
            }
            let s = v.add(b);
            if seen.insert(s.clone()) {
                frontier.push((s, ws));
            }
        }
    }
    seen.into_iter().collect()
}

/// Members of `pool` with `v^2 >= -2`, on the ray of `alpha`, and no longer
/// than `alpha`, followed by additive closure.
pub fn effective_from_pool<S: Scalar>(
    lattice: &NsLattice,
    pool: &[MukaiVector],
    charge: impl Fn(&MukaiVector) -> Complex<S>,
    alpha: &MukaiVector,
) -> Result<Vec<MukaiVector>, EnumerationError> {
    let za = charge(alpha);
    if za.is_zero() {
        return Err(EnumerationError::ZeroCharge);
    }
    let bound = za.abs_squared();
    let base: Vec<MukaiVector> = pool
        .iter()
        .filter(|v| !v.is_zero() && lattice.pair_int(v, v) >= BigInt::from(-2))
        .filter(|v| {
            let z = charge(v);
            z.same_ray(&za) && z.abs_squared().cmp_to(&bound) != Ordering::Greater
        })
        .cloned()
        .collect();
    Ok(ray_closure(&base, &charge, &za))
}

/// `{ v != 0 : v^2 >= -2, Z(v) = lambda Z(alpha), 0 < lambda <= 1 }`.
///
/// Same box as `enumerate_bounded`, but `s` is solved for instead of scanned:
/// `Im Z(v)` fixes `lambda`, then `Re Z(v) = lambda Re Z(alpha)` fixes `s`.
pub fn enumerate_on_ray(p: &StabilityPoint, alpha: &MukaiVector) -> Result<Vec<MukaiVector>, EnumerationError> {
    let za = central_charge(p, alpha);
    if za.is_zero() {
        return Err(EnumerationError::ZeroCharge);
    }
    let m = za.abs_squared();
    let lattice = p.lattice();
    let hb = HodgeBox::new(lattice, &p.omega().0, p.omega_sq(), &m)?;
    let beta = &p.beta().0;
    let map = p.map();
    let mut out = Vec::new();
    for r in -hb.r_max..=hb.r_max {
        let Some(rad) = hb.d_radius(r) else { continue };
        let mut ranges = Vec::with_capacity(rad.len());
        for (bi, u) in beta.iter().zip(&rad) {
            let c = qint(r) * bi;
            ranges.push((
                to_i64(&ceil_int(&(&c - Q::from_integer(u.clone()))))?,
                to_i64(&floor_int(&(&c + Q::from_integer(u.clone()))))?,
            ));
        }
        let mut svals: Vec<(Vec<i64>, i64)> = Vec::new();
        for_each_lattice_point(&ranges, |l| {
            let z0 = map.charge(&MukaiVector::new(r, l.to_vec(), 0));
            if !za.im.is_zero() {
                let lambda = &z0.im / &za.im;
                if !lambda.is_positive() || lambda > Q::one() {
                    return;
                }
                let s = &z0.re - &lambda * &za.re;
                if s.is_integer() {
                    if let Some(s) = s.to_integer().to_i64() {
                        svals.push((l.to_vec(), s));
                    }
                }
            } else if z0.im.is_zero() {
                // lambda = (z0.re - s) / za.re in (0, 1]
                let (lo, hi) = if za.re.is_positive() {
                    (&z0.re - &za.re, z0.re.clone())
                } else {
                    (z0.re.clone(), &z0.re - &za.re)
                };
                let (Some(a), Some(b)) = (ceil_int(&lo).to_i64(), floor_int(&hi).to_i64()) else { return };
                for s in a..=b {
                    let lambda = (&z0.re - qint(s)) / &za.re;
                    if lambda.is_positive() && lambda <= Q::one() {
                        svals.push((l.to_vec(), s));
                    }
                }
            }
        });
        for (l, s) in svals {
            let v = MukaiVector::new(r, l, s);
            if !v.is_zero() && lattice.pair_int(&v, &v) >= BigInt::from(-2) {
                out.push(v);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Effective-class surrogate on the ray of `alpha` at a rational point.
pub fn effective_candidates(p: &StabilityPoint, alpha: &MukaiVector) -> Result<Vec<MukaiVector>, EnumerationError> {
    let za = central_charge(p, alpha);
    let base = enumerate_on_ray(p, alpha)?;
    Ok(ray_closure(&base, |v| central_charge(p, v), &za))
}

/// `effective_candidates` through a full `enumerate_bounded` scan.
pub fn effective_candidates_by_scan(p: &StabilityPoint, alpha: &MukaiVector) -> Result<Vec<MukaiVector>, EnumerationError> {
    let za = central_charge(p, alpha);
    if za.is_zero() {
        return Err(EnumerationError::ZeroCharge);
    }
    let pool = enumerate_bounded(p, &EnumerationBudget::new(za.abs_squared()))?;
    effective_from_pool(p.lattice(), &pool.classes, |v| central_charge(p, v), alpha)
}

/// Ordered tuple `(alpha_1, ..., alpha_n)` summing to a target class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decomposition(pub Vec<MukaiVector>);

impl Decomposition {
    pub fn parts(&self) -> &[MukaiVector] {
        &self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn sum(&self) -> Option<MukaiVector> {
        let mut it = self.0.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |a, b| a.add(b)))
    }
}

/// All ordered tuples over `candidates` summing to `alpha`. `charge` must put
/// every candidate on the ray of `alpha`; the projection onto that ray is the
/// strictly positive additive weight that bounds the search. Output follows
/// depth-first order with candidates by decreasing `|Z|`, ties by class.
pub fn ordered_decompositions<S: Scalar>(
    candidates: &[MukaiVector],
    charge: impl Fn(&MukaiVector) -> Complex<S>,
    alpha: &MukaiVector,
    max_len: Option<usize>,
) -> Vec<Decomposition> {
    let za = charge(alpha);
    let mut cands: Vec<(MukaiVector, S)> = candidates
        .iter()
        .map(|v| (v.clone(), za.dot(&charge(v))))
        .filter(|(_, w)| w.is_pos())
        .collect();
    cands.sort_by(|a, b| b.1.cmp_to(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    let total = za.abs_squared();
    decompose_rec(&cands, alpha, &total, max_len, &mut prefix, &mut out);
    out
}

fn decompose_rec<S: Scalar>(
    cands: &[(MukaiVector, S)],
    rem: &MukaiVector,
    rem_w: &S,
    max_len: Option<usize>,
    prefix: &mut Vec<MukaiVector>,
    out: &mut Vec<Decomposition>,
) {
    if max_len.is_some_and(|m| prefix.len() >= m) {
        return;
    }
    for (c, w) in cands {
        match w.cmp_to(rem_w) {
            Ordering::Greater => continue,
            Ordering::Equal => {
                if c == rem {
                    prefix.push(c.clone());
                    out.push(Decomposition(prefix.clone()));
                    prefix.pop();
                }
            }
            Ordering::Less => {
                prefix.push(c.clone());
                decompose_rec(cands, &rem.sub(c), &rem_w.sub(w), max_len, prefix, out);
                prefix.pop();
            }
        }
    }
}

pub fn enumerate_ray_decompositions(p: &StabilityPoint, alpha: &MukaiVector) -> Result<Vec<Decomposition>, EnumerationError> {
    let cands = effective_candidates(p, alpha)?;
    Ok(ordered_decompositions(&cands, |v| central_charge(p, v), alpha, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qi};
    use crate::lattice::RationalDivisor;

    fn k3() -> NsLattice {
        NsLattice::rank_one(2, 1).unwrap()
    }
    fn mv(r: i64, l: i64, s: i64) -> MukaiVector {
        MukaiVector::new(r, vec![l], s)
    }
    fn pt(b: Q, w: Q) -> StabilityPoint {
        StabilityPoint::new(&k3(), RationalDivisor::new(vec![b]), RationalDivisor::new(vec![w])).unwrap()
    }

    #[test]
    fn small_budget_is_empty() {
        let e = enumerate_bounded(&pt(qi(0), qi(2)), &EnumerationBudget::new(q(1, 4))).unwrap();
        assert!(e.classes.is_empty());
        assert!(!e.truncated);
    }

    #[test]
    fn point_classes_appear() {
        let e = enumerate_bounded(&pt(qi(0), qi(2)), &EnumerationBudget::new(qi(1))).unwrap();
        assert!(e.classes.contains(&mv(0, 0, 1)));
        assert!(e.classes.contains(&mv(0, 0, -1)));
        assert!(!e.classes.iter().any(|v| v.is_zero()));
    }

    #[test]
    fn caps_flag_truncation() {
        let mut b = EnumerationBudget::new(qi(50));
        b.max_s = Some(1);
        let e = enumerate_bounded(&pt(qi(0), qi(2)), &b).unwrap();
        assert!(e.truncated);
        assert!(e.classes.iter().all(|v| v.s.abs() <= 1));
    }

    #[test]
    fn invert_matrix() {
        let m = vec![vec![qi(2), qi(1)], vec![qi(1), qi(3)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![q(3, 5), q(-1, 5)], vec![q(-1, 5), q(2, 5)]]);
    }

    #[test]
    fn closure_and_decompositions() {
        let p = pt(qi(0), qi(2));
        // Z(0,0,-1) = 1 is off the heart but the ray machinery does not care
        let v0 = mv(0, 0, -1);
        let alpha = v0.scale(2);
        let cands = effective_candidates(&p, &alpha).unwrap();
        assert!(cands.contains(&v0) && cands.contains(&alpha));
        let d = ordered_decompositions(&cands, |v| central_charge(&p, v), &alpha, None);
        assert_eq!(d, vec![Decomposition(vec![alpha.clone()]), Decomposition(vec![v0.clone(), v0.clone()])]);
    }

    #[test]
    fn on_ray_matches_scan() {
        for (b, w) in [(qi(0), qi(2)), (q(1, 3), q(3, 2)), (q(-1, 2), qi(1))] {
            let p = pt(b, w);
            for a in [mv(1, 0, -1), mv(0, 0, -2), mv(2, 1, -3), mv(0, 1, 1)] {
                assert_eq!(effective_candidates(&p, &a), effective_candidates_by_scan(&p, &a), "{a}");
            }
        }
    }

    #[test]
    fn zero_target() {
        let p = pt(qi(0), qi(1));
        assert_eq!(effective_candidates(&p, &mv(1, 0, 1)), Err(EnumerationError::ZeroCharge));
    }
}
