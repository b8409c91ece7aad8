//! Closed rational intervals with outward-exact arithmetic.

use num_traits::{Signed, Zero};

use super::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, k: &Q) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Tight image of `x -> x^2`.
    pub fn square(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        let hi = if a > b { a.clone() } else { b.clone() };
        let lo = if self.contains_zero() { Q::zero() } else if a < b { a } else { b };
        Interval { lo, hi }
    }

    pub fn pow(&self, k: u32) -> Interval {
        match k {
            0 => Interval::point(Q::from_integer(1.into())),
            1 => self.clone(),
            _ if k.is_multiple_of(2) => self.square().pow(k / 2),
            _ => self.mul(&self.pow(k - 1)),
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `min |x|` over the interval.
    pub fn min_abs(&self) -> Q {
        if self.contains_zero() {
            Q::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            -&self.hi
        }
    }

    pub fn max_abs(&self) -> Q {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }

    pub fn split(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo.clone(), hi: m.clone() }, Interval { lo: m, hi: self.hi.clone() })
    }
}
