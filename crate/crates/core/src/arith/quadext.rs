//! Exact arithmetic in `Q(sqrt d)` for a squarefree `d > 1`.
//!
//! A value with zero irrational part is a plain rational and combines with
//! any field. Mixing two genuinely different fields is a logic error.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, squarefree_split, Q};
use super::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    a: Q,
    b: Q,
    d: BigInt,
}

impl QuadExt {
    pub fn rational(a: Q) -> Self {
        QuadExt { a, b: Q::zero(), d: BigInt::one() }
    }

    /// `a + b*sqrt(d)`, normalising `d` to its squarefree part.
    pub fn new(a: Q, b: Q, d: &BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        let (k, df) = squarefree_split(d);
        let b = b * Q::from_integer(k);
        if b.is_zero() || df.is_one() {
            let a = if df.is_one() { a + b } else { a };
            return QuadExt::rational(a);
        }
        QuadExt { a, b, d: df }
    }

    /// Square root of a non-negative rational.
    pub fn sqrt_q(x: &Q) -> Self {
        assert!(!x.is_negative(), "square root of a negative rational");
        if x.is_zero() {
            return QuadExt::rational(Q::zero());
        }
        // sqrt(n/m) = sqrt(n*m)/m
        let n = x.numer() * x.denom();
        QuadExt::new(Q::zero(), Q::new(BigInt::one(), x.denom().clone()), &n)
    }

    pub fn a(&self) -> &Q {
        &self.a
    }
    pub fn b(&self) -> &Q {
        &self.b
    }
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn field(&self, o: &Self) -> BigInt {
        match (self.is_rational(), o.is_rational()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, o.d, "mixing Q(sqrt {}) and Q(sqrt {})", self.d, o.d);
                self.d.clone()
            }
        }
    }

    fn make(a: Q, b: Q, d: BigInt) -> Self {
        if b.is_zero() {
            QuadExt::rational(a)
        } else {
            QuadExt { a, b, d }
        }
    }

    pub fn conj(&self) -> Self {
        QuadExt::make(self.a.clone(), -&self.b, self.d.clone())
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * Q::from_integer(self.d.clone())
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QuadExt::make(c.a / &n, c.b / &n, c.d))
    }

    /// Floating approximation, for display only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }

    /// A rational within `eps` of the value.
    pub fn approx(&self, eps: &Q) -> Q {
        if self.is_rational() {
            return self.a.clone();
        }
        // bracket sqrt(d) by integers then bisect
        let s = QuadExt::make(Q::zero(), Q::one(), self.d.clone());
        let mut lo = Q::zero();
        let mut hi = Q::from_integer(self.d.clone());
        let tol = eps / (self.b.abs() + Q::one());
        while &hi - &lo > tol {
            let mid = (&lo + &hi) / Q::from_integer(BigInt::from(2));
            if QuadExt::rational(mid.clone()).cmp_to(&s) == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        &self.a + &self.b * lo
    }
}

impl Scalar for QuadExt {
    fn nil() -> Self {
        QuadExt::rational(Q::zero())
    }
    fn unit() -> Self {
        QuadExt::rational(Q::one())
    }
    fn from_q(x: &Q) -> Self {
        QuadExt::rational(x.clone())
    }
    fn add(&self, o: &Self) -> Self {
        let d = self.field(o);
        QuadExt::make(&self.a + &o.a, &self.b + &o.b, d)
    }
    fn sub(&self, o: &Self) -> Self {
        let d = self.field(o);
        QuadExt::make(&self.a - &o.a, &self.b - &o.b, d)
    }
    fn mul(&self, o: &Self) -> Self {
        let d = self.field(o);
        let dq = Q::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dq;
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadExt::make(a, b, d)
    }
    fn neg(&self) -> Self {
        QuadExt::make(-&self.a, -&self.b, self.d.clone())
    }
    fn mul_q(&self, x: &Q) -> Self {
        QuadExt::make(&self.a * x, &self.b * x, self.d.clone())
    }
    fn sgn(&self) -> Ordering {
        let sa = Scalar::sgn(&self.a);
        let sb = Scalar::sgn(&self.b);
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with d b^2
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Q::from_integer(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }
    fn as_q(&self) -> Option<Q> {
        self.is_rational().then(|| self.a.clone())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&fmt_rational(&self.a));
        }
        write!(f, "{} + {}*sqrt({})", fmt_rational(&self.a), fmt_rational(&self.b), self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{q, qi};

    #[test]
    fn normalisation() {
        let x = QuadExt::new(qi(1), qi(1), &BigInt::from(8));
        assert_eq!(x.radicand(), &BigInt::from(2));
        assert_eq!(x.b(), &qi(2));
        let y = QuadExt::new(qi(1), qi(3), &BigInt::from(4));
        assert!(y.is_rational());
        assert_eq!(y.a(), &qi(7));
    }

    #[test]
    fn sqrt_squares_back() {
        for (n, d) in [(2, 1), (15, 4), (9, 4), (7, 3)] {
            let x = q(n, d);
            let r = QuadExt::sqrt_q(&x);
            assert_eq!(r.mul(&r), QuadExt::rational(x));
            assert!(r.is_pos());
        }
    }

    #[test]
    fn signs() {
        let d = BigInt::from(2);
        assert_eq!(QuadExt::new(qi(-1), qi(1), &d).sgn(), Ordering::Greater);
        assert_eq!(QuadExt::new(qi(-2), qi(1), &d).sgn(), Ordering::Less);
        assert_eq!(QuadExt::new(q(3, 2), qi(-1), &d).sgn(), Ordering::Greater);
        assert_eq!(QuadExt::new(q(7, 5), qi(-1), &d).sgn(), Ordering::Less);
    }

    #[test]
    fn inverse() {
        let x = QuadExt::new(qi(3), q(-1, 2), &BigInt::from(5));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), QuadExt::unit());
    }

    #[test]
    fn approximation() {
        let x = QuadExt::sqrt_q(&qi(3));
        let eps = q(1, 1000);
        let a = x.approx(&eps);
        assert!(QuadExt::rational(a).sub(&x).mul(&QuadExt::rational(qi(1000))).to_f64().abs() < 1.0);
    }
}
