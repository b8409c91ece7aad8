//! The coefficient field: rational functions in `q` over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::HallError;
use crate::arith::{Poly, Q};

/// Reduced fraction `num / den` with `den` monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

pub type LambdaElement = RatFunc;

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, HallError> {
        if den.is_zero() {
            return Err(HallError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let lead = d.lead();
        if !lead.is_one() {
            let inv = Q::one() / lead;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Ok(RatFunc { num: n, den: d })
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::constant(Q::one()) }
    }

    pub fn one() -> Self {
        RatFunc::constant(Q::one())
    }

    pub fn constant(x: Q) -> Self {
        RatFunc { num: Poly::constant(x), den: Poly::constant(Q::one()) }
    }

    pub fn integer(x: i64) -> Self {
        RatFunc::constant(Q::from_integer(BigInt::from(x)))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::constant(Q::one()) }
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        let m = Poly::monomial(Q::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            RatFunc::from_poly(m)
        } else {
            RatFunc { num: Poly::constant(Q::one()), den: m }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        *self == RatFunc::one()
    }

    /// The value as a rational constant, if it is one.
    pub fn as_constant(&self) -> Option<Q> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Q::zero()),
            (Some(0), Some(0)) => Some(self.num.coeff(0)),
            _ => None,
        }
    }

    fn build(num: Poly, den: Poly) -> Self {
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::build(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::build(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::build(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, x: &Q) -> RatFunc {
        if x.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(x), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFunc, HallError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, HallError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<RatFunc, HallError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Value at a rational `q`, when the denominator does not vanish there.
    pub fn eval(&self, q: &Q) -> Option<Q> {
        let d = self.den.eval_q(q);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_q(q) / d)
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return write!(f, "{}", self.num.to_string_in("q"));
        }
        write!(f, "({})/({})", self.num.to_string_in("q"), self.den.to_string_in("q"))
    }
}
