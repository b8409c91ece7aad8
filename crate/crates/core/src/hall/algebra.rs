//! The commutative algebra spanned by symbols `c_v`, with
//! `c_a * c_b = q^{-chi(b, a)} c_{a+b}`.

use std::collections::BTreeMap;

use super::formal::FormalPoly;
use super::ratfunc::RatFunc;
use crate::lattice::{MukaiVector, NsLattice};

fn q_chi_twist(lattice: &NsLattice, a: &MukaiVector, b: &MukaiVector) -> RatFunc {
    // -chi(b, a) is the Mukai pairing (b, a)
    RatFunc::q_pow(-lattice.chi_int(b, a))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<MukaiVector, FormalPoly>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    /// `coef * c_v`.
    pub fn basis(v: &MukaiVector, coef: FormalPoly) -> Self {
        let mut e = AlgebraElement::zero();
        e.add_term(v.clone(), coef);
        e
    }

    /// The unit `c_0`.
    pub fn unit(rank: usize) -> Self {
        AlgebraElement::basis(&MukaiVector::zero(rank), FormalPoly::one())
    }

    fn add_term(&mut self, v: MukaiVector, c: FormalPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&v) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(v, sum);
        }
    }

    pub fn terms(&self) -> &BTreeMap<MukaiVector, FormalPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, v: &MukaiVector) -> FormalPoly {
        self.terms.get(v).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        let mut r = self.clone();
        for (v, c) in &o.terms {
            r.add_term(v.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        self.add(&o.scale(&FormalPoly::lambda(RatFunc::integer(-1))))
    }

    pub fn scale(&self, c: &FormalPoly) -> AlgebraElement {
        let mut r = AlgebraElement::zero();
        for (v, x) in &self.terms {
            r.add_term(v.clone(), x.mul(c));
        }
        r
    }

    pub fn mul(&self, o: &AlgebraElement, lattice: &NsLattice) -> AlgebraElement {
        let mut r = AlgebraElement::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let c = x.mul(y).scale(&q_chi_twist(lattice, a, b));
                r.add_term(a.add(b), c);
            }
        }
        r
    }
}

/// Invariants `I^v` at a fixed point; absent classes count as zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ITable {
    entries: BTreeMap<MukaiVector, FormalPoly>,
}

impl ITable {
    pub fn new() -> Self {
        ITable::default()
    }

    /// Every listed class gets its own formal symbol `I[v]`.
    pub fn formal(classes: &[MukaiVector]) -> Self {
        ITable { entries: classes.iter().map(|v| (v.clone(), FormalPoly::symbol(v))).collect() }
    }

    pub fn insert(&mut self, v: MukaiVector, value: FormalPoly) {
        if value.is_zero() {
            self.entries.remove(&v);
        } else {
            self.entries.insert(v, value);
        }
    }

    pub fn get(&self, v: &MukaiVector) -> FormalPoly {
        self.entries.get(v).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> &BTreeMap<MukaiVector, FormalPoly> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(MukaiVector, FormalPoly)> for ITable {
    fn from_iter<T: IntoIterator<Item = (MukaiVector, FormalPoly)>>(it: T) -> Self {
        let mut t = ITable::new();
        for (v, x) in it {
            t.insert(v, x);
        }
        t
    }
}

/// `I^v c_v`.
pub fn delta_bar(itable: &ITable, v: &MukaiVector) -> AlgebraElement {
    AlgebraElement::basis(v, itable.get(v))
}
