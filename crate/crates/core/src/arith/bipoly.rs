//! Sparse polynomials in the slice coordinates `(b, t)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::poly::Poly;
use super::rational::Q;
use super::scalar::Scalar;

/// Keys are exponents `(i, j)` of `b^i t^j`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, u32), Q)>) -> Self {
        let mut p = BiPoly::zero();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    pub fn constant(c: Q) -> Self {
        BiPoly::from_terms([((0, 0), c)])
    }

    pub fn b() -> Self {
        BiPoly::from_terms([((1, 0), Q::one())])
    }

    pub fn t() -> Self {
        BiPoly::from_terms([((0, 1), Q::one())])
    }

    fn add_term(&mut self, k: (u32, u32), c: Q) {
        let e = self.terms.entry(k).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let mut p = self.clone();
        for (k, c) in &o.terms {
            p.add_term(*k, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn scale(&self, x: &Q) -> BiPoly {
        if x.is_zero() {
            return BiPoly::zero();
        }
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, c * x)).collect() }
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        let mut p = BiPoly::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &o.terms {
                p.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        p
    }

    pub fn eval<S: Scalar>(&self, b: &S, t: &S) -> S {
        let mut acc = S::nil();
        for ((i, j), c) in &self.terms {
            let mut m = S::from_q(c);
            for _ in 0..*i {
                m = m.mul(b);
            }
            for _ in 0..*j {
                m = m.mul(t);
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Restriction to a vertical line `b = b0`, as a polynomial in `t`.
    pub fn at_b(&self, b0: &Q) -> Poly {
        let n = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut c = vec![Q::zero(); n + 1];
        for ((i, j), x) in &self.terms {
            c[*j as usize] += x * pow_q(b0, *i);
        }
        Poly::new(c)
    }

    /// Restriction to a horizontal line `t = t0`, as a polynomial in `b`.
    pub fn at_t(&self, t0: &Q) -> Poly {
        let n = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let mut c = vec![Q::zero(); n + 1];
        for ((i, j), x) in &self.terms {
            c[*i as usize] += x * pow_q(t0, *j);
        }
        Poly::new(c)
    }

    /// Coefficient of `t^j` as a polynomial in `b`.
    pub fn t_coeff(&self, j: u32) -> Poly {
        let n = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let mut c = vec![Q::zero(); n + 1];
        for ((i, jj), x) in &self.terms {
            if *jj == j {
                c[*i as usize] += x;
            }
        }
        Poly::new(c)
    }

    /// Restriction to `(b, t) = (b0 + s*db, t0 + s*dt)` as a polynomial in `s`.
    pub fn along(&self, b0: &Q, db: &Q, t0: &Q, dt: &Q) -> Poly {
        let lb = Poly::new(vec![b0.clone(), db.clone()]);
        let lt = Poly::new(vec![t0.clone(), dt.clone()]);
        let mut acc = Poly::zero();
        for ((i, j), c) in &self.terms {
            let mut m = Poly::constant(c.clone());
            for _ in 0..*i {
                m = m.mul(&lb);
            }
            for _ in 0..*j {
                m = m.mul(&lt);
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Enclosure of the values over a box.
    pub fn eval_interval(&self, b: &Interval, t: &Interval) -> Interval {
        let mut acc = Interval::point(Q::zero());
        for ((i, j), c) in &self.terms {
            let m = b.pow(*i).mul(&t.pow(*j)).scale(c);
            acc = acc.add(&m);
        }
        acc
    }

    /// Divide out the largest power of `t` that divides every term.
    /// Partial derivative in `b`.
    pub fn d_b(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|((i, j), c)| ((i - 1, *j), c * Q::from_integer((*i).into()))),
        )
    }

    /// Partial derivative in `t`.
    pub fn d_t(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|((i, j), c)| ((*i, j - 1), c * Q::from_integer((*j).into()))),
        )
    }

    pub fn strip_t(&self) -> BiPoly {
        let v = self.terms.keys().map(|k| k.1).min().unwrap_or(0);
        BiPoly { terms: self.terms.iter().map(|((i, j), c)| ((*i, j - v), c.clone())).collect() }
    }

    /// Integral, content-free representative whose leading term (largest key)
    /// is positive. Two polynomials with the same zero locus up to scaling
    /// share this form.
    pub fn normalized(&self) -> BiPoly {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.terms.values().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        let lead_neg = self.terms.values().next_back().unwrap().is_negative();
        let g = if lead_neg { -g } else { g };
        BiPoly {
            terms: self.terms.keys().zip(ints).map(|(k, x)| (*k, Q::from_integer(x / &g))).collect(),
        }
    }
}

fn pow_q(x: &Q, k: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..k {
        r *= x;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{q, qi};

    fn circle() -> BiPoly {
        // b^2 + t^2 - 4
        BiPoly::from_terms([((2, 0), qi(1)), ((0, 2), qi(1)), ((0, 0), qi(-4))])
    }

    #[test]
    fn restrictions_agree_with_eval() {
        let p = circle().mul(&BiPoly::t()).add(&BiPoly::b());
        let b0 = q(1, 3);
        let t0 = q(5, 2);
        let e = p.eval(&b0, &t0);
        assert_eq!(p.at_b(&b0).eval_q(&t0), e);
        assert_eq!(p.at_t(&t0).eval_q(&b0), e);
        let s = p.along(&qi(0), &b0, &qi(1), &(&t0 - qi(1)));
        assert_eq!(s.eval_q(&qi(1)), e);
    }

    #[test]
    fn normal_form() {
        let p = circle().scale(&q(-3, 7));
        assert_eq!(p.normalized(), circle());
        assert_eq!(circle().mul(&BiPoly::t()).strip_t(), circle());
    }

    #[test]
    fn interval_enclosure() {
        let p = circle();
        let r = p.eval_interval(&Interval::new(qi(0), qi(1)), &Interval::new(qi(1), qi(2)));
        assert!(r.lo <= qi(-3) && r.hi >= qi(1));
    }
}
