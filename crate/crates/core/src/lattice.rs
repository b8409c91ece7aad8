//! Néron–Severi and Mukai lattice arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gram matrix is not square of size {0}")]
    NotSquare(usize),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix has odd diagonal entry at {0}")]
    OddDiagonal(usize),
    #[error("gram matrix has signature ({pos},{neg}) with {zero} null directions; need (1,{expected_neg})")]
    BadSignature { pos: usize, neg: usize, zero: usize, expected_neg: usize },
    #[error("epsilon must be 0 or 1, got {0}")]
    BadEpsilon(i64),
    #[error("rank must be positive")]
    ZeroRank,
    #[error("third Mukai component {0} is not an integer")]
    NonIntegral(String),
}

/// Intersection form on NS(X) together with `epsilon` (1 for K3, 0 for abelian).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsLattice {
    gram: Vec<Vec<i64>>,
    epsilon: i64,
}

impl NsLattice {
    pub fn new(gram: Vec<Vec<i64>>, epsilon: i64) -> Result<Self, LatticeError> {
        let n = gram.len();
        if n == 0 {
            return Err(LatticeError::ZeroRank);
        }
        if gram.iter().any(|row| row.len() != n) {
            return Err(LatticeError::NotSquare(n));
        }
        for i in 0..n {
            if gram[i][i] % 2 != 0 {
                return Err(LatticeError::OddDiagonal(i));
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        if epsilon != 0 && epsilon != 1 {
            return Err(LatticeError::BadEpsilon(epsilon));
        }
        let (pos, neg, zero) = inertia(&gram);
        if pos != 1 || neg != n - 1 {
            return Err(LatticeError::BadSignature { pos, neg, zero, expected_neg: n - 1 });
        }
        Ok(NsLattice { gram, epsilon })
    }

    pub fn k3(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        NsLattice::new(gram, 1)
    }

    pub fn abelian(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        NsLattice::new(gram, 0)
    }

    /// Rank-one lattice `Z H` with `H^2 = h2`.
    pub fn rank_one(h2: i64, epsilon: i64) -> Result<Self, LatticeError> {
        NsLattice::new(vec![vec![h2]], epsilon)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn epsilon(&self) -> i64 {
        self.epsilon
    }

    fn check_len(&self, n: usize) -> Result<(), LatticeError> {
        if n != self.rank() {
            return Err(LatticeError::DimensionMismatch { expected: self.rank(), got: n });
        }
        Ok(())
    }

    /// `a^T G b` for rational divisors.
    pub fn ns_dot(&self, a: &RationalDivisor, b: &RationalDivisor) -> Result<Q, LatticeError> {
        self.check_len(a.0.len())?;
        self.check_len(b.0.len())?;
        Ok(self.dot_q(&a.0, &b.0))
    }

    pub(crate) fn dot_q(&self, a: &[Q], b: &[Q]) -> Q {
        let gb = self.apply_q(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    /// `G x`
    pub(crate) fn apply_q(&self, x: &[Q]) -> Vec<Q> {
        self.gram
            .iter()
            .map(|row| row.iter().zip(x).map(|(g, v)| v * Q::from_integer(BigInt::from(*g))).sum())
            .collect()
    }

    pub(crate) fn dot_int(&self, a: &[i64], b: &[i64]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                acc += BigInt::from(*ai) * BigInt::from(self.gram[i][j]) * BigInt::from(*bj);
            }
        }
        acc
    }

    /// `l . x` for an integral `l` and a rational `x` given as `G x`.
    pub(crate) fn dot_int_pre(l: &[i64], gx: &[Q]) -> Q {
        l.iter().zip(gx).filter(|(a, _)| **a != 0).map(|(a, g)| g * Q::from_integer(BigInt::from(*a))).sum()
    }

    pub fn mukai_pair(&self, v1: &MukaiVector, v2: &MukaiVector) -> Result<Q, LatticeError> {
        self.check_len(v1.l.len())?;
        self.check_len(v2.l.len())?;
        Ok(Q::from_integer(self.pair_int(v1, v2)))
    }

    pub(crate) fn pair_int(&self, v1: &MukaiVector, v2: &MukaiVector) -> BigInt {
        self.dot_int(&v1.l, &v2.l) - BigInt::from(v1.r) * BigInt::from(v2.s) - BigInt::from(v2.r) * BigInt::from(v1.s)
    }

    pub fn mukai_square(&self, v: &MukaiVector) -> Result<Q, LatticeError> {
        self.mukai_pair(v, v)
    }

    pub fn chi(&self, v1: &MukaiVector, v2: &MukaiVector) -> Result<Q, LatticeError> {
        Ok(-self.mukai_pair(v1, v2)?)
    }

    /// Integer `chi`, for exponents of `q`.
    pub fn chi_int(&self, v1: &MukaiVector, v2: &MukaiVector) -> i64 {
        let c = -self.pair_int(v1, v2);
        i64::try_from(&c).expect("Euler pairing out of i64 range")
    }

    pub fn mukai_from_chern(&self, r: i64, c1: Vec<i64>, ch2: &Q) -> Result<MukaiVector, LatticeError> {
        self.check_len(c1.len())?;
        let s = ch2 + Q::from_integer(BigInt::from(self.epsilon * r));
        if !s.is_integer() {
            return Err(LatticeError::NonIntegral(crate::arith::fmt_rational(&s)));
        }
        let s = i64::try_from(s.to_integer()).map_err(|_| LatticeError::NonIntegral(s.to_string()))?;
        Ok(MukaiVector { r, l: c1, s })
    }

    /// `v . ch(L) = (r, l + rL, s + l.L + r L^2 / 2)` for an integral divisor `L`.
    pub fn twist(&self, v: &MukaiVector, line: &[i64]) -> Result<MukaiVector, LatticeError> {
        self.check_len(v.l.len())?;
        self.check_len(line.len())?;
        let l: Vec<i64> = v.l.iter().zip(line).map(|(a, b)| a + v.r * b).collect();
        let ll = self.dot_int(line, line);
        let s: BigInt = BigInt::from(v.s) + self.dot_int(&v.l, line) + BigInt::from(v.r) * ll / 2;
        let s = i64::try_from(&s).map_err(|_| LatticeError::NonIntegral(s.to_string()))?;
        Ok(MukaiVector { r: v.r, l, s })
    }
}

/// Inertia `(positive, negative, zero)` of a symmetric integer matrix by
/// rational congruence diagonalisation.
pub fn inertia(gram: &[Vec<i64>]) -> (usize, usize, usize) {
    let n = gram.len();
    let mut a: Vec<Vec<Q>> =
        gram.iter().map(|row| row.iter().map(|x| Q::from_integer(BigInt::from(*x))).collect()).collect();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        // find a nonzero diagonal pivot
        let piv = (k..n).find(|&i| !a[i][i].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; use an off-diagonal one
                match (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero()) {
                    None => {
                        zero += n - k;
                        break;
                    }
                    Some((i, j)) => {
                        // row/col i += row/col j makes a[i][i] = 2 a[i][j]
                        for c in 0..n {
                            let v = a[j][c].clone();
                            a[i][c] += v;
                        }
                        for r in 0..n {
                            let v = a[r][j].clone();
                            a[r][i] += v;
                        }
                        i
                    }
                }
            }
        };
        a.swap(k, p);
        for row in a.iter_mut() {
            row.swap(k, p);
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &d;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for j in k + 1..n {
            a[k][j] = Q::zero();
        }
        // symmetric elimination of column k below the pivot
        for i in k + 1..n {
            a[i][k] = Q::zero();
        }
        k += 1;
    }
    (pos, neg, zero)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MukaiVector {
    pub r: i64,
    pub l: Vec<i64>,
    pub s: i64,
}

impl MukaiVector {
    pub fn new(r: i64, l: Vec<i64>, s: i64) -> Self {
        MukaiVector { r, l, s }
    }

    pub fn zero(rank: usize) -> Self {
        MukaiVector { r: 0, l: vec![0; rank], s: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.r == 0 && self.s == 0 && self.l.iter().all(|x| *x == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        MukaiVector {
            r: self.r + o.r,
            l: self.l.iter().zip(&o.l).map(|(a, b)| a + b).collect(),
            s: self.s + o.s,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        MukaiVector { r: k * self.r, l: self.l.iter().map(|x| k * x).collect(), s: k * self.s }
    }

    fn coords(&self) -> impl Iterator<Item = i64> + '_ {
        std::iter::once(self.r).chain(self.l.iter().copied()).chain(std::iter::once(self.s))
    }

    /// Rationally proportional (the zero vector is proportional to everything).
    pub fn proportional(&self, o: &Self) -> bool {
        let a: Vec<i64> = self.coords().collect();
        let b: Vec<i64> = o.coords().collect();
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if i128::from(a[i]) * i128::from(b[j]) != i128::from(a[j]) * i128::from(b[i]) {
                    return false;
                }
            }
        }
        true
    }

    /// Greatest common divisor of the coordinates.
    pub fn content(&self) -> i64 {
        self.coords().fold(0i64, num_integer::gcd)
    }

    /// Canonical sign: the first nonzero coordinate is positive.
    pub fn canonical_sign(&self) -> Self {
        match self.coords().find(|x| *x != 0) {
            Some(x) if x < 0 => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn ns_class(&self) -> Vec<Q> {
        self.l.iter().map(|x| Q::from_integer(BigInt::from(*x))).collect()
    }

    /// `I[r,l1,...,s]`, the formal-symbol name of this class.
    pub fn symbol(&self) -> String {
        let parts: Vec<String> = self.coords().map(|x| x.to_string()).collect();
        format!("I[{}]", parts.join(","))
    }
}

impl Ord for MukaiVector {
    fn cmp(&self, o: &Self) -> Ordering {
        self.coords().cmp(o.coords())
    }
}

impl PartialOrd for MukaiVector {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l: Vec<String> = self.l.iter().map(|x| x.to_string()).collect();
        write!(f, "({}, [{}], {})", self.r, l.join(","), self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalDivisor(pub Vec<Q>);

impl RationalDivisor {
    pub fn new(c: Vec<Q>) -> Self {
        RationalDivisor(c)
    }

    pub fn zero(rank: usize) -> Self {
        RationalDivisor(vec![Q::zero(); rank])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        RationalDivisor(c.iter().map(|x| Q::from_integer(BigInt::from(*x))).collect())
    }

    pub fn scale(&self, k: &Q) -> Self {
        RationalDivisor(self.0.iter().map(|x| x * k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qi};

    fn k3() -> NsLattice {
        NsLattice::rank_one(2, 1).unwrap()
    }

    fn mv(r: i64, l: i64, s: i64) -> MukaiVector {
        MukaiVector::new(r, vec![l], s)
    }

    #[test]
    fn ns_dot_examples() {
        let l = k3();
        let h = RationalDivisor::from_ints(&[1]);
        assert_eq!(l.ns_dot(&h, &h).unwrap(), qi(2));
        assert_eq!(l.ns_dot(&RationalDivisor::zero(1), &h).unwrap(), qi(0));
        let l2 = NsLattice::k3(vec![vec![2, 1], vec![1, -2]]).unwrap();
        let a = RationalDivisor::from_ints(&[1, 0]);
        let b = RationalDivisor::from_ints(&[0, 1]);
        assert_eq!(l2.ns_dot(&a, &b).unwrap(), qi(1));
        assert!(matches!(l2.ns_dot(&h, &b), Err(LatticeError::DimensionMismatch { .. })));
    }

    #[test]
    fn pairing_examples() {
        let l = k3();
        assert_eq!(l.mukai_pair(&mv(1, 0, 1), &mv(1, 0, 1)).unwrap(), qi(-2));
        assert_eq!(l.mukai_pair(&mv(0, 0, 1), &mv(1, 0, 0)).unwrap(), qi(-1));
        assert_eq!(l.mukai_pair(&mv(3, 2, -5), &MukaiVector::zero(1)).unwrap(), qi(0));
        assert_eq!(l.mukai_square(&mv(1, 0, -1)).unwrap(), qi(2));
        assert_eq!(l.mukai_square(&mv(0, 1, 0)).unwrap(), qi(2));
        assert_eq!(l.chi(&mv(1, 0, 1), &mv(1, 0, 1)).unwrap(), qi(2));
        assert_eq!(l.chi(&mv(0, 0, 1), &mv(1, 0, 0)).unwrap(), qi(1));
    }

    #[test]
    fn chern_to_mukai() {
        assert_eq!(k3().mukai_from_chern(1, vec![0], &qi(0)).unwrap(), mv(1, 0, 1));
        let ab = NsLattice::rank_one(2, 0).unwrap();
        assert_eq!(ab.mukai_from_chern(1, vec![0], &qi(0)).unwrap(), mv(1, 0, 0));
        assert_eq!(k3().mukai_from_chern(0, vec![1], &qi(-1)).unwrap(), mv(0, 1, -1));
        assert!(matches!(k3().mukai_from_chern(1, vec![0], &q(1, 2)), Err(LatticeError::NonIntegral(_))));
    }

    #[test]
    fn signature_checks() {
        assert!(NsLattice::k3(vec![vec![2, 1], vec![1, -2]]).is_ok());
        // hyperbolic plane U
        assert!(NsLattice::k3(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(matches!(
            NsLattice::k3(vec![vec![2, 0], vec![0, 2]]),
            Err(LatticeError::BadSignature { pos: 2, .. })
        ));
        assert!(matches!(NsLattice::k3(vec![vec![-2]]), Err(LatticeError::BadSignature { .. })));
        assert!(matches!(NsLattice::k3(vec![vec![3]]), Err(LatticeError::OddDiagonal(0))));
        assert!(matches!(NsLattice::k3(vec![vec![2, 1], vec![0, -2]]), Err(LatticeError::NotSymmetric)));
        assert!(matches!(NsLattice::k3(vec![vec![2, 0], vec![0, 0]]), Err(LatticeError::BadSignature { zero: 1, .. })));
        assert!(matches!(NsLattice::new(vec![vec![2]], 2), Err(LatticeError::BadEpsilon(2))));
    }

    #[test]
    fn inertia_of_diagonalisable_forms() {
        assert_eq!(inertia(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]), (1, 2, 0));
        assert_eq!(inertia(&[vec![2, 3], vec![3, 2]]), (1, 1, 0));
        assert_eq!(inertia(&[vec![0, 0], vec![0, 0]]), (0, 0, 2));
    }

    #[test]
    fn twist_by_line_bundle() {
        // O(-H) twisted by H is O; ideal-sheaf-like (1,0,-1) becomes (1,H,0)
        assert_eq!(k3().twist(&mv(1, 0, -1), &[1]).unwrap(), mv(1, 1, 0));
        assert_eq!(k3().twist(&mv(1, -1, 2), &[1]).unwrap(), mv(1, 0, 1));
        let v = mv(2, 1, -3);
        let back = k3().twist(&k3().twist(&v, &[2]).unwrap(), &[-2]).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn proportionality() {
        assert!(mv(1, 0, 1).proportional(&mv(2, 0, 2)));
        assert!(mv(1, 0, 1).proportional(&mv(-3, 0, -3)));
        assert!(!mv(1, 0, 1).proportional(&mv(1, 0, -1)));
        assert_eq!(mv(4, 2, -6).content(), 2);
        assert_eq!(mv(-1, 2, 0).canonical_sign(), mv(1, -2, 0));
    }
}
