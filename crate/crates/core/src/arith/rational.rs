//! Helpers around `BigRational`: construction, the `p/q` wire format and
//! integer square-root bounds.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Q, RationalParseError> {
    let t = s.trim();
    let malformed = || RationalParseError::Malformed(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| malformed())?;
    let d: BigInt = den.parse().map_err(|_| malformed())?;
    if d.is_zero() {
        return Err(RationalParseError::ZeroDenominator(s.to_string()));
    }
    Ok(Q::new(n, d))
}

/// Canonical text form: `n` for integers, `p/q` with `q > 0` otherwise.
pub fn fmt_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub struct Rat<'a>(pub &'a Q);

impl fmt::Display for Rat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(self.0))
    }
}

/// Smallest non-negative integer `k` with `k^2 >= x`.
pub fn ceil_sqrt(x: &Q) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let c = x.ceil().to_integer();
    let mut k = c.sqrt();
    while &k * &k < c {
        k += 1;
    }
    while k.is_positive() && Q::from_integer((&k - 1) * (&k - 1)) >= *x {
        k -= 1;
    }
    k
}

/// Largest integer `k >= 0` with `k^2 <= x`.
pub fn floor_sqrt(x: &Q) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let f = x.floor().to_integer();
    f.sqrt()
}

pub fn floor_int(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_int(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Squarefree decomposition of a positive integer: `n = k^2 * d` with `d`
/// squarefree. Trial division; inputs here are small discriminants.
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive());
    let mut d = n.clone();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= d {
        let pp = &p * &p;
        while d.is_multiple_of(&pp) {
            d /= &pp;
            k *= &p;
        }
        p += 1;
    }
    (k, d)
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    i64::try_from(x).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7/2", "0", "1/3"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(fmt_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(fmt_rational(&parse_rational("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse_rational("1/0"), Err(RationalParseError::ZeroDenominator(_))));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn sqrt_bounds() {
        for n in 0..200i64 {
            let x = q(n, 7);
            let c = ceil_sqrt(&x);
            let f = floor_sqrt(&x);
            assert!(Q::from_integer(&c * &c) >= x);
            assert!(c.is_zero() || Q::from_integer((&c - 1) * (&c - 1)) < x);
            assert!(Q::from_integer(&f * &f) <= x);
            assert!(Q::from_integer((&f + 1) * (&f + 1)) > x);
        }
    }

    #[test]
    fn squarefree() {
        let (k, d) = squarefree_split(&BigInt::from(72));
        assert_eq!((k, d), (BigInt::from(6), BigInt::from(2)));
        let (k, d) = squarefree_split(&BigInt::from(15));
        assert_eq!((k, d), (BigInt::from(1), BigInt::from(15)));
    }
}
