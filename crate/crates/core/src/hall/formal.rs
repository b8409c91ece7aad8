//! Polynomials in formal commuting symbols `I[v]` over rational functions in `q`.

use std::collections::BTreeMap;
use std::fmt;

use super::ratfunc::RatFunc;
use crate::lattice::MukaiVector;

/// Product of symbols with positive exponents, sorted by class.
pub type Monomial = Vec<(MukaiVector, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m: BTreeMap<MukaiVector, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *m.entry(v.clone()).or_insert(0) += e;
    }
    m.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FormalPoly {
    terms: BTreeMap<Monomial, RatFunc>,
}

impl FormalPoly {
    pub fn zero() -> Self {
        FormalPoly::default()
    }

    pub fn one() -> Self {
        FormalPoly::lambda(RatFunc::one())
    }

    pub fn lambda(c: RatFunc) -> Self {
        let mut p = FormalPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    /// The formal symbol `I[v]`.
    pub fn symbol(v: &MukaiVector) -> Self {
        let mut p = FormalPoly::zero();
        p.add_term(vec![(v.clone(), 1)], RatFunc::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(RatFunc::zero);
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, RatFunc> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as an element of the base field, if no symbol occurs.
    pub fn as_lambda(&self) -> Option<RatFunc> {
        match self.terms.len() {
            0 => Some(RatFunc::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, o: &FormalPoly) -> FormalPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> FormalPoly {
        FormalPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &FormalPoly) -> FormalPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FormalPoly) -> FormalPoly {
        let mut r = FormalPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(mono_mul(ma, mb), ca.mul(cb));
            }
        }
        r
    }

    pub fn scale(&self, c: &RatFunc) -> FormalPoly {
        if c.is_zero() {
            return FormalPoly::zero();
        }
        FormalPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect() }
    }

    pub fn pow(&self, k: u32) -> FormalPoly {
        let mut acc = FormalPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes values for symbols; symbols without a value stay formal.
    pub fn substitute(&self, values: &BTreeMap<MukaiVector, FormalPoly>) -> FormalPoly {
        let mut r = FormalPoly::zero();
        for (m, c) in &self.terms {
            let mut t = FormalPoly::lambda(c.clone());
            for (v, e) in m {
                let f = values.get(v).cloned().unwrap_or_else(|| FormalPoly::symbol(v));
                t = t.mul(&f.pow(*e));
            }
            r = r.add(&t);
        }
        r
    }
}

impl From<RatFunc> for FormalPoly {
    fn from(c: RatFunc) -> Self {
        FormalPoly::lambda(c)
    }
}

impl fmt::Display for FormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let syms: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e == 1 { v.symbol() } else { format!("{}^{e}", v.symbol()) })
                .collect();
            match (syms.is_empty(), c.is_one()) {
                (true, _) => write!(f, "({c})")?,
                (false, true) => write!(f, "{}", syms.join("*"))?,
                (false, false) => write!(f, "({c})*{}", syms.join("*"))?,
            }
        }
        Ok(())
    }
}
