//! Central charges, exact phase comparison and twisted Hilbert polynomials.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{Complex, Scalar, Q};
use crate::lattice::{LatticeError, MukaiVector, NsLattice, RationalDivisor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChargeError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("omega^2 = {0} is not positive")]
    NonPositiveOmega(String),
    #[error("central charge vanishes")]
    ZeroCharge,
    #[error("charge {0} is not in the image of the heart")]
    OutsideHeartImage(String),
    #[error("rotation by {0} half-turns is not exactly representable")]
    UnsupportedRotation(String),
    #[error("class has rank zero")]
    ZeroRank,
    #[error("reduced Hilbert polynomial undefined: omega.l = 0 for a rank-zero class")]
    DegenerateTorsion,
    #[error("reduced-polynomial and charge-identity routes disagree for {0} and {1}")]
    RouteDisagreement(String, String),
}

fn qint(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// `v -> Z(v)` for fixed `(beta, omega)` with coordinates in a field `S`.
#[derive(Debug, Clone)]
pub struct ChargeMap<S> {
    lattice: NsLattice,
    beta: Vec<S>,
    omega: Vec<S>,
    g_beta: Vec<S>,
    g_omega: Vec<S>,
    beta_sq: S,
    omega_sq: S,
    beta_omega: S,
}

fn gram_apply<S: Scalar>(lat: &NsLattice, x: &[S]) -> Vec<S> {
    lat.gram()
        .iter()
        .map(|row| row.iter().zip(x).fold(S::nil(), |acc, (g, v)| acc.add(&v.mul_q(&qint(*g)))))
        .collect()
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::nil(), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn int_dot<S: Scalar>(l: &[i64], x: &[S]) -> S {
    l.iter().zip(x).filter(|(a, _)| **a != 0).fold(S::nil(), |acc, (a, y)| acc.add(&y.mul_q(&qint(*a))))
}

impl<S: Scalar> ChargeMap<S> {
    pub fn new(lattice: &NsLattice, beta: Vec<S>, omega: Vec<S>) -> Result<Self, ChargeError> {
        for x in [&beta, &omega] {
            if x.len() != lattice.rank() {
                return Err(LatticeError::DimensionMismatch { expected: lattice.rank(), got: x.len() }.into());
            }
        }
        let g_beta = gram_apply(lattice, &beta);
        let g_omega = gram_apply(lattice, &omega);
        let beta_sq = dot(&beta, &g_beta);
        let omega_sq = dot(&omega, &g_omega);
        let beta_omega = dot(&beta, &g_omega);
        if !omega_sq.is_pos() {
            return Err(ChargeError::NonPositiveOmega(format!("{omega_sq:?}")));
        }
        Ok(ChargeMap { lattice: lattice.clone(), beta, omega, g_beta, g_omega, beta_sq, omega_sq, beta_omega })
    }

    pub fn lattice(&self) -> &NsLattice {
        &self.lattice
    }
    pub fn beta(&self) -> &[S] {
        &self.beta
    }
    pub fn omega(&self) -> &[S] {
        &self.omega
    }
    pub fn omega_sq(&self) -> &S {
        &self.omega_sq
    }

    /// `l . omega`
    pub fn l_omega(&self, v: &MukaiVector) -> S {
        int_dot(&v.l, &self.g_omega)
    }

    /// `l . beta`
    pub fn l_beta(&self, v: &MukaiVector) -> S {
        int_dot(&v.l, &self.g_beta)
    }

    /// `Z(v) = (exp(beta + i omega), v)`: pair the Mukai vector
    /// `(1, beta + i omega, (beta + i omega)^2 / 2)` with `v`.
    pub fn charge(&self, v: &MukaiVector) -> Complex<S> {
        let z = self.charge_by_pairing(v);
        debug_assert_eq!(z, self.charge_by_expansion(v), "charge routes disagree for {v}");
        z
    }

    pub fn charge_by_pairing(&self, v: &MukaiVector) -> Complex<S> {
        // components of exp(beta + i omega) as complex divisors
        let e_l: Vec<Complex<S>> = self.beta.iter().zip(&self.omega).map(|(b, w)| Complex::new(b.clone(), w.clone())).collect();
        let g_e: Vec<Complex<S>> = gram_apply_c(&self.lattice, &e_l);
        let e_sq = e_l.iter().zip(&g_e).fold(Complex::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
        let e_s = e_sq.scale(&Q::new(BigInt::one(), BigInt::from(2)));
        let e_r = Complex::new(S::unit(), S::nil());
        // (e, v) = e_l . l - e_r s - r e_s
        let l_part = v
            .l
            .iter()
            .zip(&g_e)
            .filter(|(a, _)| **a != 0)
            .fold(Complex::zero(), |acc, (a, y)| acc.add(&y.scale(&qint(*a))));
        l_part.sub(&e_r.scale(&qint(v.s))).sub(&e_s.scale(&qint(v.r)))
    }

    /// The expanded formula: for `r != 0`,
    /// `((l^2 - 2rs) + r^2 w^2 - (l - r b)^2) / 2r + i (l - r b).w`;
    /// for `r = 0`, `(-s + l.b) + i l.w`.
    pub fn charge_by_expansion(&self, v: &MukaiVector) -> Complex<S> {
        let lw = self.l_omega(v);
        let lb = self.l_beta(v);
        if v.r == 0 {
            return Complex::new(S::from_q(&qint(-v.s)).add(&lb), lw);
        }
        let r = qint(v.r);
        let l2 = S::from_q(&Q::from_integer(self.lattice.dot_int(&v.l, &v.l)));
        // (l - r b)^2 = l^2 - 2r l.b + r^2 b^2
        let lrb2 = l2.sub(&lb.mul_q(&(&r * qint(2)))).add(&self.beta_sq.mul_q(&(&r * &r)));
        let re = l2
            .sub(&S::from_q(&(qint(2) * &r * qint(v.s))))
            .add(&self.omega_sq.mul_q(&(&r * &r)))
            .sub(&lrb2)
            .mul_q(&(Q::one() / (qint(2) * &r)));
        let im = lw.sub(&self.beta_omega.mul_q(&r));
        Complex::new(re, im)
    }
}

fn gram_apply_c<S: Scalar>(lat: &NsLattice, x: &[Complex<S>]) -> Vec<Complex<S>> {
    lat.gram()
        .iter()
        .map(|row| row.iter().zip(x).fold(Complex::zero(), |acc, (g, v)| acc.add(&v.scale(&qint(*g)))))
        .collect()
}

/// A rational point `(beta, omega)` with `omega^2 > 0`.
#[derive(Debug, Clone)]
pub struct StabilityPoint {
    beta: RationalDivisor,
    omega: RationalDivisor,
    map: ChargeMap<Q>,
}

impl StabilityPoint {
    pub fn new(lattice: &NsLattice, beta: RationalDivisor, omega: RationalDivisor) -> Result<Self, ChargeError> {
        let map = ChargeMap::new(lattice, beta.0.clone(), omega.0.clone())?;
        Ok(StabilityPoint { beta, omega, map })
    }

    pub fn lattice(&self) -> &NsLattice {
        self.map.lattice()
    }
    pub fn beta(&self) -> &RationalDivisor {
        &self.beta
    }
    pub fn omega(&self) -> &RationalDivisor {
        &self.omega
    }
    pub fn map(&self) -> &ChargeMap<Q> {
        &self.map
    }
    pub fn omega_sq(&self) -> &Q {
        self.map.omega_sq()
    }
}

pub fn central_charge(p: &StabilityPoint, v: &MukaiVector) -> Complex<Q> {
    p.map.charge(v)
}

/// A nonzero charge representing a phase in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRay<S> {
    charge: Complex<S>,
}

impl<S: Scalar> PhaseRay<S> {
    pub fn new(z: Complex<S>) -> Result<Self, ChargeError> {
        if z.is_zero() {
            return Err(ChargeError::ZeroCharge);
        }
        if z.im.is_pos() || (z.im.vanishes() && z.re.is_neg()) {
            Ok(PhaseRay { charge: z })
        } else {
            Err(ChargeError::OutsideHeartImage(format!("{:?} + {:?}i", z.re, z.im)))
        }
    }

    pub fn charge(&self) -> &Complex<S> {
        &self.charge
    }

    fn is_one(&self) -> bool {
        self.charge.im.vanishes()
    }
}

pub fn phase_in_01(p: &StabilityPoint, v: &MukaiVector) -> Result<PhaseRay<Q>, ChargeError> {
    PhaseRay::new(central_charge(p, v))
}

pub fn compare_phase<S: Scalar>(a: &PhaseRay<S>, b: &PhaseRay<S>) -> Ordering {
    match (a.is_one(), b.is_one()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        // b counter-clockwise of a means larger phase
        (false, false) => a.charge.cross(&b.charge).sgn().reverse(),
    }
}

pub fn same_ray<S: Scalar>(z1: &Complex<S>, z2: &Complex<S>) -> Result<bool, ChargeError> {
    if z1.is_zero() || z2.is_zero() {
        return Err(ChargeError::ZeroCharge);
    }
    Ok(z1.same_ray(z2))
}

/// `z * exp(-i pi lambda)` for `lambda` a multiple of 1/2.
pub fn rotate_charge(z: &Complex<Q>, halfturns: &Q) -> Result<Complex<Q>, ChargeError> {
    let twice = halfturns * qint(2);
    if !twice.is_integer() {
        return Err(ChargeError::UnsupportedRotation(crate::arith::fmt_rational(halfturns)));
    }
    let k = twice.to_integer() % BigInt::from(4);
    let k = if k.is_negative() { k + 4 } else { k };
    let k = i64::try_from(&k).unwrap_or(0);
    Ok(match k {
        0 => z.clone(),
        1 => Complex::new(z.im.clone(), -&z.re),
        2 => z.neg(),
        _ => Complex::new(-&z.im, z.re.clone()),
    })
}

pub fn abs_squared<S: Scalar>(z: &Complex<S>) -> S {
    z.abs_squared()
}

/// `sum |Re Z| + |Im Z|`, an upper bound on the mass within a factor `sqrt 2`.
pub fn mass_bound(p: &StabilityPoint, factors: &[MukaiVector]) -> Q {
    factors
        .iter()
        .map(|v| {
            let z = central_charge(p, v);
            z.re.abs() + z.im.abs()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    /// Certified by `omega^2 > 2`.
    Valid,
    /// A spherical class with `r > 0` and charge on the closed negative real axis.
    Invalid { witness: MukaiVector, charge: Complex<Q> },
    /// No witness with `|Z|^2 <= searched_bound`.
    Unknown { searched_bound: Q },
}

pub fn validate_point(p: &StabilityPoint, search_bound: &Q) -> Validity {
    if *p.omega_sq() > qint(2) {
        return Validity::Valid;
    }
    let budget = crate::enumeration::EnumerationBudget::new(search_bound.clone().max(Q::zero()));
    let found = crate::enumeration::spherical_search(p, &budget);
    for v in found {
        let z = central_charge(p, &v);
        if z.im.is_zero() && !z.re.is_positive() {
            return Validity::Invalid { witness: v, charge: z };
        }
    }
    Validity::Unknown { searched_bound: search_bound.clone() }
}

/// A polynomial of degree at most 2 in `n`, coefficients constant-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertPoly {
    coeffs: [Q; 3],
}

impl HilbertPoly {
    pub fn new(c0: Q, c1: Q, c2: Q) -> Self {
        HilbertPoly { coeffs: [c0, c1, c2] }
    }

    pub fn coeffs(&self) -> &[Q; 3] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        (0..3).rev().find(|&i| !self.coeffs[i].is_zero())
    }

    pub fn eval(&self, n: &Q) -> Q {
        &self.coeffs[0] + &self.coeffs[1] * n + &self.coeffs[2] * n * n
    }

    /// Scaled to leading coefficient 1. Only the constant case can differ
    /// from the stored form.
    pub fn monic(&self) -> HilbertPoly {
        match self.degree() {
            None => self.clone(),
            Some(d) => {
                let l = self.coeffs[d].clone();
                HilbertPoly { coeffs: [&self.coeffs[0] / &l, &self.coeffs[1] / &l, &self.coeffs[2] / &l] }
            }
        }
    }
}

fn divisor_dot(lat: &NsLattice, a: &[Q], b: &[Q]) -> Q {
    lat.dot_q(a, b)
}

/// Twisted reduced Hilbert polynomial `P(v, beta, omega, n)`.
///
/// For `r != 0`: `n^2 + 2(l - r b).w/(r w^2) n - (l^2 - 2rs - (l - r b)^2)/(r^2 w^2) + 2 eps/w^2`;
/// for `r = 0, l != 0`: `n + (s - b.l)/(w.l)`; for `r = l = 0`: the constant `s`.
pub fn reduced_hilbert(
    lattice: &NsLattice,
    beta: &RationalDivisor,
    omega: &RationalDivisor,
    v: &MukaiVector,
) -> Result<HilbertPoly, ChargeError> {
    let rho = lattice.rank();
    for n in [beta.len(), omega.len(), v.l.len()] {
        if n != rho {
            return Err(LatticeError::DimensionMismatch { expected: rho, got: n }.into());
        }
    }
    let w2 = divisor_dot(lattice, &omega.0, &omega.0);
    if !w2.is_positive() {
        return Err(ChargeError::NonPositiveOmega(crate::arith::fmt_rational(&w2)));
    }
    let l = v.ns_class();
    let r = qint(v.r);
    let s = qint(v.s);
    if v.r != 0 {
        let lrb: Vec<Q> = l.iter().zip(&beta.0).map(|(a, b)| a - &r * b).collect();
        let lrb_w = divisor_dot(lattice, &lrb, &omega.0);
        let lrb2 = divisor_dot(lattice, &lrb, &lrb);
        let l2 = divisor_dot(lattice, &l, &l);
        let c1 = qint(2) * lrb_w / (&r * &w2);
        let c0 = -(l2 - qint(2) * &r * &s - lrb2) / (&r * &r * &w2) + qint(2 * lattice.epsilon()) / &w2;
        return Ok(HilbertPoly::new(c0, c1, Q::one()));
    }
    if l.iter().any(|x| !x.is_zero()) {
        let lw = divisor_dot(lattice, &l, &omega.0);
        if lw.is_zero() {
            return Err(ChargeError::DegenerateTorsion);
        }
        let bl = divisor_dot(lattice, &beta.0, &l);
        return Ok(HilbertPoly::new((s - bl) / lw, Q::one(), Q::zero()));
    }
    Ok(HilbertPoly::new(s, Q::zero(), Q::zero()))
}

/// Eventual dominance as `n -> infinity`: higher degree wins, then
/// coefficients from the top down.
pub fn gieseker_compare(a: &HilbertPoly, b: &HilbertPoly) -> Ordering {
    let da = a.degree().map_or(-1, |d| d as i64);
    let db = b.degree().map_or(-1, |d| d as i64);
    da.cmp(&db).then_with(|| {
        for i in (0..3).rev() {
            match a.coeffs[i].cmp(&b.coeffs[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    })
}

pub fn mu_slope(lattice: &NsLattice, omega: &RationalDivisor, v: &MukaiVector) -> Result<Q, ChargeError> {
    if v.r == 0 {
        return Err(ChargeError::ZeroRank);
    }
    let lw = lattice.ns_dot(&RationalDivisor::new(v.ns_class()), omega)?;
    Ok(lw / qint(v.r))
}

/// `Z_{(beta, k omega)}(v) = (a0 + a2 k^2) + i c1 k` as a polynomial in `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCharge {
    pub a0: Q,
    pub a2: Q,
    pub c1: Q,
}

impl KCharge {
    pub fn new(lattice: &NsLattice, beta: &RationalDivisor, omega: &RationalDivisor, v: &MukaiVector) -> Self {
        let l = v.ns_class();
        let r = qint(v.r);
        let lb = lattice.dot_q(&l, &beta.0);
        let b2 = lattice.dot_q(&beta.0, &beta.0);
        let w2 = lattice.dot_q(&omega.0, &omega.0);
        let lw = lattice.dot_q(&l, &omega.0);
        let bw = lattice.dot_q(&beta.0, &omega.0);
        let half = Q::new(BigInt::one(), BigInt::from(2));
        KCharge { a0: -qint(v.s) + lb - &r * b2 * &half, a2: &r * w2 * half, c1: lw - r * bw }
    }

    pub fn at(&self, k: &Q) -> Complex<Q> {
        Complex::from_q(&self.a0 + &self.a2 * k * k, &self.c1 * k)
    }

    /// Coefficients of `Im(Z(other) conj Z(self))` in `k` (degrees 1 and 3).
    pub fn cross_poly(&self, other: &KCharge) -> crate::arith::Poly {
        let k1 = &other.c1 * &self.a0 - &other.a0 * &self.c1;
        let k3 = &other.c1 * &self.a2 - &other.a2 * &self.c1;
        crate::arith::Poly::new(vec![Q::zero(), k1, Q::zero(), k3])
    }

    fn proportional(&self, o: &KCharge) -> bool {
        let a = [&self.a0, &self.a2, &self.c1];
        let b = [&o.a0, &o.a2, &o.c1];
        let za = a.iter().all(|x| x.is_zero());
        let zb = b.iter().all(|x| x.is_zero());
        if za || zb {
            return za && zb;
        }
        (0..3).all(|i| (0..3).all(|j| a[i] * b[j] == a[j] * b[i]))
    }
}

/// Route A: equal reduced Hilbert polynomials (constant case scaled to 1).
pub fn p_equal_by_hilbert(
    lattice: &NsLattice,
    beta: &RationalDivisor,
    omega: &RationalDivisor,
    v1: &MukaiVector,
    v2: &MukaiVector,
) -> Result<bool, ChargeError> {
    let p1 = reduced_hilbert(lattice, beta, omega, v1)?;
    let p2 = reduced_hilbert(lattice, beta, omega, v2)?;
    Ok(p1.monic() == p2.monic())
}

/// Route B: `Im(Z_{k}(v2) conj Z_{k}(v1))` vanishes identically in `k`. When
/// both charges are real for every `k` that identity is empty, and the
/// charge polynomials are compared for proportionality instead.
pub fn p_equal_by_charges(
    lattice: &NsLattice,
    beta: &RationalDivisor,
    omega: &RationalDivisor,
    v1: &MukaiVector,
    v2: &MukaiVector,
) -> bool {
    let z1 = KCharge::new(lattice, beta, omega, v1);
    let z2 = KCharge::new(lattice, beta, omega, v2);
    z1.cross_poly(&z2).is_zero() && z1.proportional(&z2)
}

pub fn p_equality_test(
    lattice: &NsLattice,
    beta: &RationalDivisor,
    omega: &RationalDivisor,
    v1: &MukaiVector,
    v2: &MukaiVector,
) -> Result<bool, ChargeError> {
    let a = p_equal_by_hilbert(lattice, beta, omega, v1, v2)?;
    let b = p_equal_by_charges(lattice, beta, omega, v1, v2);
    if a != b {
        return Err(ChargeError::RouteDisagreement(v1.to_string(), v2.to_string()));
    }
    Ok(a)
}
