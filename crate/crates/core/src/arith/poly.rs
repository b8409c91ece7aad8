//! Dense univariate polynomials over Q with Sturm root counting.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, Q};
use super::scalar::Scalar;

/// Coefficients in increasing degree; never has a trailing zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(x: Q) -> Self {
        Poly::new(vec![x])
    }

    /// `x^k`
    pub fn monomial(coef: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = coef;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.c.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, k: &Q) -> Poly {
        Poly::new(self.c.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly::new(c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * Q::from_integer((i as i64).into()))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.lead();
        let mut r = self.c.clone();
        let mut quo = vec![Q::zero(); self.c.len().saturating_sub(dd)];
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap() / &lead;
            for (i, x) in d.c.iter().enumerate() {
                r[k + i] -= &f * x;
            }
            quo[k] = f;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(quo), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead();
        self.scale(&(Q::one() / l))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval<S: Scalar>(&self, x: &S) -> S {
        let mut acc = S::nil();
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(&S::from_q(c));
        }
        acc
    }

    pub fn eval_q(&self, x: &Q) -> Q {
        self.eval(x)
    }

    /// `p(a + b*s)` as a polynomial in `s`.
    pub fn compose_linear(&self, a: &Q, b: &Q) -> Poly {
        let lin = Poly::new(vec![a.clone(), b.clone()]);
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Largest power of `x` dividing the polynomial.
    pub fn x_valuation(&self) -> usize {
        self.c.iter().take_while(|x| x.is_zero()).count()
    }

    pub fn strip_x(&self) -> Poly {
        Poly::new(self.c[self.x_valuation().min(self.c.len())..].to_vec())
    }

    /// Upper bound on the absolute value of every real root.
    pub fn cauchy_bound(&self) -> Q {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return Q::zero(),
        };
        let l = self.lead().abs();
        let m = self.c[..n].iter().map(|x| x.abs() / &l).max().unwrap_or_else(Q::zero);
        Q::one() + m
    }

    pub fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = Vec::new();
        if self.is_zero() {
            return chain;
        }
        chain.push(self.clone());
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        chain
    }

    /// Number of distinct real roots in `(lo, hi]`. Requires `lo < hi`.
    pub fn count_roots<S: Scalar>(&self, lo: &S, hi: &S) -> usize {
        assert!(!self.is_zero(), "root count of the zero polynomial");
        let chain = self.sturm_chain();
        let v = |x: &S| sign_changes(chain.iter().map(|p| p.eval(x).sgn()));
        // Sturm's theorem needs endpoints that are not roots of the gcd
        // part; evaluating a squarefree chain sidesteps that.
        let g = chain.last().unwrap();
        if g.degree().unwrap_or(0) > 0 {
            let (sf, _) = self.div_rem(g);
            return sf.count_roots(lo, hi);
        }
        v(lo).saturating_sub(v(hi))
    }

    /// Number of distinct real roots in `[lo, hi]`.
    pub fn count_roots_closed<S: Scalar>(&self, lo: &S, hi: &S) -> usize {
        let at_lo = usize::from(self.eval(lo).vanishes());
        self.count_roots(lo, hi) + at_lo
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mon = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&mon);
            } else {
                out.push_str(&format!("{}*{mon}", fmt_rational(&a)));
            }
        }
        out
    }
}

fn sign_changes(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut n = 0;
    for s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            n += 1;
        }
        last = s;
    }
    n
}
