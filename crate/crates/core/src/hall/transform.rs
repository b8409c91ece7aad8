//! Logarithm/exponential over a ray, S-coefficients, and wall transforms.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::algebra::{delta_bar, AlgebraElement, ITable};
use super::formal::FormalPoly;
use super::ratfunc::RatFunc;
use super::HallError;
use crate::arith::{Complex, Scalar, Q};
use crate::charge::{ChargeMap, StabilityPoint};
use crate::enumeration::{enumerate_ray_decompositions, ordered_decompositions, Decomposition, EnumerationError};
use crate::lattice::{MukaiVector, NsLattice};

/// Anything that assigns exact central charges to classes.
pub trait ChargeEval {
    type S: Scalar;
    fn z(&self, v: &MukaiVector) -> Complex<Self::S>;
}

impl<S: Scalar> ChargeEval for ChargeMap<S> {
    type S = S;
    fn z(&self, v: &MukaiVector) -> Complex<S> {
        self.charge(v)
    }
}

impl ChargeEval for StabilityPoint {
    type S = Q;
    fn z(&self, v: &MukaiVector) -> Complex<Q> {
        self.map().charge(v)
    }
}

impl<T: ChargeEval> ChargeEval for &T {
    type S = T::S;
    fn z(&self, v: &MukaiVector) -> Complex<T::S> {
        (*self).z(v)
    }
}

/// Phase order of `a` against `b` among charges in the open half-plane
/// around `center`: `Less` means `a` has the smaller phase.
pub fn phase_cmp<E: ChargeEval>(
    e: &E,
    center: &Complex<E::S>,
    a: &MukaiVector,
    b: &MukaiVector,
) -> Result<Ordering, HallError> {
    let za = e.z(a);
    let zb = e.z(b);
    for (v, z) in [(a, &za), (b, &zb)] {
        if z.is_zero() {
            return Err(HallError::ZeroCharge(v.to_string()));
        }
        if !z.dot(center).is_pos() {
            return Err(HallError::OutsideWindow(v.to_string()));
        }
    }
    Ok(match za.cross(&zb).sgn() {
        Ordering::Greater => Ordering::Less,
        Ordering::Equal => Ordering::Equal,
        Ordering::Less => Ordering::Greater,
    })
}

/// Charges at `sigma0` and `sigma1`, the phases `phi_0` and `phi_1` of the
/// S-coefficient.
#[derive(Debug, Clone)]
pub struct PhaseContext<A, B> {
    pub sigma0: A,
    pub sigma1: B,
}

impl<A: ChargeEval, B: ChargeEval> PhaseContext<A, B> {
    pub fn new(sigma0: A, sigma1: B) -> Self {
        PhaseContext { sigma0, sigma1 }
    }

    /// Requires the charges of the pair to be collinear at `sigma1` and not
    /// at `sigma0`.
    pub fn across(sigma0: A, sigma1: B, pair: (&MukaiVector, &MukaiVector)) -> Result<Self, HallError> {
        let (a1, b1) = (sigma1.z(pair.0), sigma1.z(pair.1));
        let (a0, b0) = (sigma0.z(pair.0), sigma0.z(pair.1));
        if !a1.cross(&b1).vanishes() || a0.cross(&b0).vanishes() {
            return Err(HallError::NotOnWall);
        }
        Ok(PhaseContext { sigma0, sigma1 })
    }

    pub fn reversed(self) -> PhaseContext<B, A> {
        PhaseContext { sigma0: self.sigma1, sigma1: self.sigma0 }
    }
}

/// `(-1)^{#(a)}` when every adjacent position satisfies (a) or (b), else 0.
pub fn s_coefficient<A: ChargeEval, B: ChargeEval>(
    decomp: &Decomposition,
    ctx: &PhaseContext<A, B>,
) -> Result<i8, HallError> {
    let parts = decomp.parts();
    let n = parts.len();
    if n <= 1 {
        return Ok(1);
    }
    let total = decomp.sum().expect("nonempty");
    let c0 = ctx.sigma0.z(&total);
    let c1 = ctx.sigma1.z(&total);
    if c0.is_zero() || c1.is_zero() {
        return Err(HallError::ZeroCharge(total.to_string()));
    }
    let mut prefix = parts[0].clone();
    let mut count_a = 0usize;
    for i in 1..n {
        let suffix = total.sub(&prefix);
        let p0 = phase_cmp(&ctx.sigma0, &c0, &parts[i - 1], &parts[i])?;
        let p1 = phase_cmp(&ctx.sigma1, &c1, &prefix, &suffix)?;
        let a = p0 != Ordering::Greater && p1 == Ordering::Greater;
        let b = p0 == Ordering::Greater && p1 != Ordering::Greater;
        if a {
            count_a += 1;
        } else if !b {
            return Ok(0);
        }
        prefix = prefix.add(&parts[i]);
    }
    Ok(if count_a.is_multiple_of(2) { 1 } else { -1 })
}

fn rational(n: i64, d: i64) -> RatFunc {
    RatFunc::constant(Q::new(BigInt::from(n), BigInt::from(d)))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// `delta_bar^{a_1} * ... * delta_bar^{a_n}` in the algebra.
pub fn ordered_product(lattice: &NsLattice, parts: &[MukaiVector], table: &ITable) -> AlgebraElement {
    let mut acc = AlgebraElement::unit(lattice.rank());
    for p in parts {
        acc = acc.mul(&delta_bar(table, p), lattice);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// `sum (-1)^{n-1}/n delta_bar^{a_1} * ... * delta_bar^{a_n}` over the given
/// decompositions of `alpha`.
pub fn delta_to_epsilon_over(
    lattice: &NsLattice,
    decomps: &[Decomposition],
    itable: &ITable,
    alpha: &MukaiVector,
) -> AlgebraElement {
    let mut acc = AlgebraElement::zero();
    for d in decomps {
        debug_assert_eq!(d.sum().as_ref(), Some(alpha));
        let n = d.len() as i64;
        let sign = if n % 2 == 1 { 1 } else { -1 };
        let w = FormalPoly::lambda(rational(sign, n));
        acc = acc.add(&ordered_product(lattice, d.parts(), itable).scale(&w));
    }
    acc
}

/// `sum 1/n! eps_bar^{a_1} * ... * eps_bar^{a_n}`, where `etable` holds the
/// coefficient of `c_v` in `eps_bar^v`.
pub fn epsilon_to_delta_over(
    lattice: &NsLattice,
    decomps: &[Decomposition],
    etable: &ITable,
    alpha: &MukaiVector,
) -> AlgebraElement {
    let mut acc = AlgebraElement::zero();
    for d in decomps {
        debug_assert_eq!(d.sum().as_ref(), Some(alpha));
        let w = FormalPoly::lambda(rational(1, factorial(d.len())));
        acc = acc.add(&ordered_product(lattice, d.parts(), etable).scale(&w));
    }
    acc
}

fn ray_decompositions(p: &StabilityPoint, alpha: &MukaiVector) -> Result<Vec<Decomposition>, HallError> {
    enumerate_ray_decompositions(p, alpha).map_err(|e| match e {
        EnumerationError::ZeroCharge => HallError::ZeroCharge(alpha.to_string()),
        other => HallError::ScopeExceeded(other.to_string()),
    })
}

/// `eps_bar^alpha` at a rational point, over its ray decompositions.
pub fn delta_to_epsilon(p: &StabilityPoint, itable: &ITable, alpha: &MukaiVector) -> Result<AlgebraElement, HallError> {
    let d = ray_decompositions(p, alpha)?;
    Ok(delta_to_epsilon_over(p.lattice(), &d, itable, alpha))
}

/// `delta_bar^alpha` from the `eps_bar` coefficients at a rational point.
pub fn epsilon_to_delta(p: &StabilityPoint, etable: &ITable, alpha: &MukaiVector) -> Result<AlgebraElement, HallError> {
    let d = ray_decompositions(p, alpha)?;
    Ok(epsilon_to_delta_over(p.lattice(), &d, etable, alpha))
}

/// A finite set of classes on one ray together with every ordered
/// decomposition of each of them into members of the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayScope {
    classes: Vec<MukaiVector>,
    decomps: BTreeMap<MukaiVector, Vec<Decomposition>>,
}

impl RayScope {
    /// `ray` must put every class on a common ray.
    pub fn new<E: ChargeEval>(ray: &E, classes: &[MukaiVector], max_len: Option<usize>) -> Self {
        let mut classes = classes.to_vec();
        classes.sort();
        classes.dedup();
        let decomps = classes
            .iter()
            .map(|b| (b.clone(), ordered_decompositions(&classes, |v| ray.z(v), b, max_len)))
            .collect();
        RayScope { classes, decomps }
    }

    pub fn classes(&self) -> &[MukaiVector] {
        &self.classes
    }

    pub fn decompositions(&self, v: &MukaiVector) -> Result<&[Decomposition], HallError> {
        self.decomps.get(v).map(|d| d.as_slice()).ok_or_else(|| HallError::ScopeExceeded(v.to_string()))
    }

    /// Coefficients of `eps_bar^v` for every class of the scope.
    pub fn epsilon_table(&self, lattice: &NsLattice, itable: &ITable) -> ITable {
        self.classes
            .iter()
            .map(|v| {
                let d = &self.decomps[v];
                (v.clone(), delta_to_epsilon_over(lattice, d, itable, v).coefficient(v))
            })
            .collect()
    }
}

/// `delta_bar^{a'}(sigma1) = sum S(decomp; sigma0, sigma1) delta_bar^{a_1}(sigma0) * ...`
/// for each target, over the decompositions recorded in `scope`.
pub fn transform_delta_across_wall<A: ChargeEval, B: ChargeEval>(
    lattice: &NsLattice,
    ctx: &PhaseContext<A, B>,
    scope: &RayScope,
    itable: &ITable,
    targets: &[MukaiVector],
) -> Result<ITable, HallError> {
    let mut out = ITable::new();
    for t in targets {
        let mut acc = FormalPoly::zero();
        for d in scope.decompositions(t)? {
            let s = s_coefficient(d, ctx)?;
            if s == 0 {
                continue;
            }
            let term = ordered_product(lattice, d.parts(), itable).coefficient(t);
            acc = if s > 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        out.insert(t.clone(), acc);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub equal: bool,
    /// `eps_bar^alpha(sigma0)`
    pub before: AlgebraElement,
    /// `eps_bar^alpha(sigma1)`
    pub after: AlgebraElement,
    pub discrepancy: AlgebraElement,
    /// The transformed table at `sigma1`.
    pub table1: ITable,
}

/// Compares `eps_bar^alpha` at `sigma0` (over `decomps0`) with its value at
/// `sigma1`, computed by transforming the table across the wall and taking
/// the logarithm over `scope`.
pub fn epsilon_invariance_check<A: ChargeEval, B: ChargeEval>(
    lattice: &NsLattice,
    ctx: &PhaseContext<A, B>,
    scope: &RayScope,
    itable0: &ITable,
    decomps0: &[Decomposition],
    alpha: &MukaiVector,
) -> Result<InvarianceReport, HallError> {
    let before = delta_to_epsilon_over(lattice, decomps0, itable0, alpha);
    let table1 = transform_delta_across_wall(lattice, ctx, scope, itable0, scope.classes())?;
    let after = delta_to_epsilon_over(lattice, scope.decompositions(alpha)?, &table1, alpha);
    let discrepancy = after.sub(&before);
    Ok(InvarianceReport { equal: discrepancy.is_zero(), before, after, discrepancy, table1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qi;
    use crate::lattice::RationalDivisor;

    fn lat() -> NsLattice {
        NsLattice::rank_one(2, 1).unwrap()
    }
    fn mv(r: i64, l: i64, s: i64) -> MukaiVector {
        MukaiVector::new(r, vec![l], s)
    }

    struct Fixed(BTreeMap<MukaiVector, Complex<Q>>);
    impl ChargeEval for Fixed {
        type S = Q;
        fn z(&self, v: &MukaiVector) -> Complex<Q> {
            // linear extension over the two generators
            self.0.get(v).cloned().unwrap_or_else(|| {
                let e1 = mv(1, 0, 0);
                let e2 = mv(0, 1, 0);
                self.0[&e1].scale(&qi(v.r)).add(&self.0[&e2].scale(&qi(v.l[0])))
            })
        }
    }

    fn fixed(z1: (i64, i64), z2: (i64, i64)) -> Fixed {
        let mut m = BTreeMap::new();
        m.insert(mv(1, 0, 0), Complex::from_q(qi(z1.0), qi(z1.1)));
        m.insert(mv(0, 1, 0), Complex::from_q(qi(z2.0), qi(z2.1)));
        Fixed(m)
    }

    #[test]
    fn s_coefficient_cases() {
        let a1 = mv(1, 0, 0);
        let a2 = mv(0, 1, 0);
        // sigma0: phi(a1) > phi(a2); sigma1: aligned
        let s0 = fixed((1, 2), (2, 1));
        let s1 = fixed((1, 1), (1, 1));
        let ctx = PhaseContext::new(&s0, &s1);
        assert_eq!(s_coefficient(&Decomposition(vec![a1.clone()]), &ctx).unwrap(), 1);
        assert_eq!(s_coefficient(&Decomposition(vec![a1.clone(), a2.clone()]), &ctx).unwrap(), 1);
        assert_eq!(s_coefficient(&Decomposition(vec![a2.clone(), a1.clone()]), &ctx).unwrap(), 0);
        let back = ctx.reversed();
        assert_eq!(s_coefficient(&Decomposition(vec![a1.clone(), a2.clone()]), &back).unwrap(), -1);
        assert_eq!(s_coefficient(&Decomposition(vec![a2, a1]), &back).unwrap(), 0);
    }

    #[test]
    fn window_is_enforced() {
        let s0 = fixed((1, 0), (-1, 1));
        let c = Complex::from_q(qi(1), qi(0));
        assert!(matches!(phase_cmp(&s0, &c, &mv(1, 0, 0), &mv(0, 1, 0)), Err(HallError::OutsideWindow(_))));
    }

    #[test]
    fn two_class_round_trip() {
        let l = lat();
        let a1 = mv(1, 0, 0);
        let a2 = mv(0, 1, 0);
        let a = a1.add(&a2);
        let s0 = fixed((1, 2), (2, 1));
        let s1 = fixed((1, 1), (1, 1));
        let ctx = PhaseContext::new(&s0, &s1);
        let scope = RayScope::new(&s1, &[a1.clone(), a2.clone(), a.clone()], None);
        let t0 = ITable::formal(scope.classes());
        let t1 = transform_delta_across_wall(&l, &ctx, &scope, &t0, scope.classes()).unwrap();
        let prod = ordered_product(&l, &[a1.clone(), a2.clone()], &t0).coefficient(&a);
        assert_eq!(t1.get(&a), t0.get(&a).add(&prod));
        let back = transform_delta_across_wall(&l, &ctx.reversed(), &scope, &t1, scope.classes()).unwrap();
        assert_eq!(back, t0);
    }

    #[test]
    fn log_exp_on_a_point_ray() {
        let p = StabilityPoint::new(&lat(), RationalDivisor::from_ints(&[0]), RationalDivisor::from_ints(&[2])).unwrap();
        let alpha = mv(0, 0, -3);
        let cands = crate::enumeration::effective_candidates(&p, &alpha).unwrap();
        let scope = RayScope::new(&p, &cands, None);
        let it = ITable::formal(&cands);
        let et = scope.epsilon_table(&lat(), &it);
        let back = epsilon_to_delta(&p, &et, &alpha).unwrap();
        assert_eq!(back, delta_bar(&it, &alpha));
    }
}
