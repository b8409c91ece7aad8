//! Ordered-field abstraction shared by rational and quadratic-irrational
//! evaluation points, plus exact complex numbers over such a field.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use super::rational::Q;

pub trait Scalar: Clone + Debug + PartialEq {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_q(x: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_q(&self, x: &Q) -> Self;
    /// Sign relative to zero, computed exactly.
    fn sgn(&self) -> Ordering;
    /// `Some` when the value is rational.
    fn as_q(&self) -> Option<Q>;

    fn vanishes(&self) -> bool {
        self.sgn() == Ordering::Equal
    }
    fn is_pos(&self) -> bool {
        self.sgn() == Ordering::Greater
    }
    fn is_neg(&self) -> bool {
        self.sgn() == Ordering::Less
    }
    fn cmp_to(&self, o: &Self) -> Ordering {
        self.sub(o).sgn()
    }
}

impl Scalar for Q {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_q(&self, x: &Q) -> Self {
        self * x
    }
    fn sgn(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn as_q(&self) -> Option<Q> {
        Some(self.clone())
    }
}

/// `re + i*im` with components in an ordered field.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Complex<S> {
    pub fn new(re: S, im: S) -> Self {
        Complex { re, im }
    }

    pub fn zero() -> Self {
        Complex::new(S::nil(), S::nil())
    }

    pub fn is_zero(&self) -> bool {
        self.re.vanishes() && self.im.vanishes()
    }

    pub fn add(&self, o: &Self) -> Self {
        Complex::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Complex::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        Complex::new(self.re.neg(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Complex::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), self.im.neg())
    }

    pub fn scale(&self, x: &Q) -> Self {
        Complex::new(self.re.mul_q(x), self.im.mul_q(x))
    }

    pub fn abs_squared(&self) -> S {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// `Im(other * conj(self))`; positive when `other` lies counter-clockwise
    /// of `self` by less than a half turn.
    pub fn cross(&self, other: &Self) -> S {
        self.re.mul(&other.im).sub(&self.im.mul(&other.re))
    }

    /// `Re(other * conj(self))`.
    pub fn dot(&self, other: &Self) -> S {
        self.re.mul(&other.re).add(&self.im.mul(&other.im))
    }

    /// Both nonzero and on the same open ray from the origin.
    pub fn same_ray(&self, other: &Self) -> bool {
        !self.is_zero() && !other.is_zero() && self.cross(other).vanishes() && self.dot(other).is_pos()
    }
}

impl Complex<Q> {
    pub fn from_q(re: Q, im: Q) -> Self {
        Complex { re, im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::qi;

    #[test]
    fn ray_tests() {
        let a = Complex::from_q(qi(1), qi(2));
        let b = Complex::from_q(qi(3), qi(6));
        let c = Complex::from_q(qi(-1), qi(-2));
        assert!(a.same_ray(&b));
        assert!(!a.same_ray(&c));
        assert!(!a.same_ray(&Complex::zero()));
        assert!(a.cross(&Complex::from_q(qi(0), qi(1))).is_pos());
    }

    #[test]
    fn multiplication() {
        let a = Complex::from_q(qi(1), qi(2));
        let b = Complex::from_q(qi(3), qi(-1));
        assert_eq!(a.mul(&b), Complex::from_q(qi(5), qi(5)));
        assert_eq!(a.mul(&a.conj()).im, qi(0));
        assert_eq!(a.abs_squared(), qi(5));
    }
}
