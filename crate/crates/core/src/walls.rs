//! Walls and chambers in the slice `beta = b B0`, `omega = t W0`.
//!
//! On the slice every charge has the shape `Re = A(b) + c t^2`, `Im = t L(b)`
//! with `A` quadratic and `L` linear, so a wall polynomial factors as
//! `t (p0(b) + p2(b) t^2)`. Most exact tests below use that shape directly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::rational::{ceil_int, ceil_sqrt, floor_int};
use crate::arith::{BiPoly, Interval, Poly, QuadExt, Scalar, Q};
use crate::charge::{ChargeError, ChargeMap, StabilityPoint};
use crate::enumeration::{for_each_lattice_point, EnumerationError, HodgeBox};
use crate::lattice::{MukaiVector, NsLattice, RationalDivisor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WallError {
    #[error("invalid slice region: {0}")]
    InvalidRegion(String),
    #[error("destabilizer set has {found} classes, above the limit {limit}")]
    BudgetExceeded { found: usize, limit: usize },
    #[error("wall has no root in the region at b = {0}")]
    NoRootInRegion(String),
    #[error("cannot separate the wall point from other walls above step {0}")]
    CannotSeparate(String),
    #[error("wall point is only known to lie in an isolating interval")]
    InexactWallPoint,
    #[error("no usable crossing site found on the wall")]
    NoCrossingSite,
    #[error(transparent)]
    Charge(#[from] ChargeError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

fn qint(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceRegion {
    pub b_dir: RationalDivisor,
    pub w_dir: RationalDivisor,
    pub b0: Q,
    pub b1: Q,
    pub t0: Q,
    pub t1: Q,
}

impl SliceRegion {
    pub fn new(
        lattice: &NsLattice,
        b_dir: RationalDivisor,
        w_dir: RationalDivisor,
        (b0, b1): (Q, Q),
        (t0, t1): (Q, Q),
    ) -> Result<Self, WallError> {
        if b_dir.len() != lattice.rank() || w_dir.len() != lattice.rank() {
            return Err(WallError::InvalidRegion("direction length differs from lattice rank".into()));
        }
        if !lattice.dot_q(&w_dir.0, &w_dir.0).is_positive() {
            return Err(WallError::InvalidRegion("W0^2 must be positive".into()));
        }
        if !t0.is_positive() {
            return Err(WallError::InvalidRegion("t0 must be positive".into()));
        }
        if b0 > b1 || t0 >= t1 {
            return Err(WallError::InvalidRegion("empty rectangle".into()));
        }
        Ok(SliceRegion { b_dir, w_dir, b0, b1, t0, t1 })
    }

    pub fn point(&self, lattice: &NsLattice, b: &Q, t: &Q) -> Result<StabilityPoint, WallError> {
        Ok(StabilityPoint::new(lattice, self.b_dir.scale(b), self.w_dir.scale(t))?)
    }

    pub fn charge_map<S: Scalar>(&self, lattice: &NsLattice, b: &S, t: &S) -> Result<ChargeMap<S>, WallError> {
        let beta = self.b_dir.0.iter().map(|x| b.mul_q(x)).collect();
        let omega = self.w_dir.0.iter().map(|x| t.mul_q(x)).collect();
        Ok(ChargeMap::new(lattice, beta, omega)?)
    }

    pub fn contains(&self, b: &Q, t: &Q) -> bool {
        &self.b0 <= b && b <= &self.b1 && &self.t0 <= t && t <= &self.t1
    }

    pub fn corners(&self) -> [(Q, Q); 4] {
        [
            (self.b0.clone(), self.t0.clone()),
            (self.b0.clone(), self.t1.clone()),
            (self.b1.clone(), self.t0.clone()),
            (self.b1.clone(), self.t1.clone()),
        ]
    }
}

/// Linear-in-`b` and quadratic data of the slice charge.
#[derive(Debug, Clone)]
struct SliceForms {
    bb: Q,
    ww: Q,
    bw: Q,
    gb: Vec<Q>,
    gw: Vec<Q>,
}

impl SliceForms {
    fn new(lattice: &NsLattice, region: &SliceRegion) -> Self {
        SliceForms {
            bb: lattice.dot_q(&region.b_dir.0, &region.b_dir.0),
            ww: lattice.dot_q(&region.w_dir.0, &region.w_dir.0),
            bw: lattice.dot_q(&region.b_dir.0, &region.w_dir.0),
            gb: lattice.apply_q(&region.b_dir.0),
            gw: lattice.apply_q(&region.w_dir.0),
        }
    }

    fn l_dot(g: &[Q], v: &MukaiVector) -> Q {
        NsLattice::dot_int_pre(&v.l, g)
    }

    /// `(Re Z, Im Z)` as polynomials in `(b, t)`:
    /// `Re = -s + b l.B0 - r (b^2 B0^2 - t^2 W0^2)/2`, `Im = t (l.W0 - r b B0.W0)`.
    fn charge(&self, v: &MukaiVector) -> (BiPoly, BiPoly) {
        let r = qint(v.r);
        let lb = Self::l_dot(&self.gb, v);
        let lw = Self::l_dot(&self.gw, v);
        let re = BiPoly::from_terms([
            ((0, 0), -qint(v.s)),
            ((1, 0), lb),
            ((2, 0), -&r * &self.bb * half()),
            ((0, 2), &r * &self.ww * half()),
        ]);
        let im = BiPoly::from_terms([((0, 1), lw), ((1, 1), -&r * &self.bw)]);
        (re, im)
    }
}

/// `Im(Z(vi) conj Z(vj))` over the slice.
pub fn wall_polynomial(lattice: &NsLattice, region: &SliceRegion, vi: &MukaiVector, vj: &MukaiVector) -> BiPoly {
    let f = SliceForms::new(lattice, region);
    let (ri, ii) = f.charge(vi);
    let (rj, ij) = f.charge(vj);
    ii.mul(&rj).sub(&ri.mul(&ij))
}

/// `Re(Z(vi) conj Z(vj))` over the slice; positive on the aligned side.
pub fn side_polynomial(lattice: &NsLattice, region: &SliceRegion, vi: &MukaiVector, vj: &MukaiVector) -> BiPoly {
    let f = SliceForms::new(lattice, region);
    let (ri, ii) = f.charge(vi);
    let (rj, ij) = f.charge(vj);
    ri.mul(&rj).add(&ii.mul(&ij))
}

/// Zero set of `W / t` as `p0(b) + p2(b) u` with `u = t^2`, when it has that shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locus {
    LinearInU { p0: Poly, p2: Poly },
    General(BiPoly),
}

impl Locus {
    fn of(poly: &BiPoly) -> Locus {
        let g = poly.strip_t();
        let linear = g.terms().keys().all(|(_, j)| *j == 0 || *j == 2);
        if linear {
            Locus::LinearInU { p0: g.t_coeff(0), p2: g.t_coeff(2) }
        } else {
            Locus::General(g)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub vi: MukaiVector,
    pub vj: MukaiVector,
    /// `Im(Z(vi) conj Z(vj))`
    pub poly: BiPoly,
    /// Every class of the destabilizer set whose wall with `vj` has this locus.
    pub members: Vec<MukaiVector>,
    pub locus: Locus,
}

impl Wall {
    pub fn new(lattice: &NsLattice, region: &SliceRegion, vi: MukaiVector, vj: MukaiVector) -> Wall {
        let poly = wall_polynomial(lattice, region, &vi, &vj);
        let locus = Locus::of(&poly);
        Wall { members: vec![vi.clone()], vi, vj, poly, locus }
    }

    /// Sign of the wall polynomial, the fingerprint coordinate.
    pub fn sign_at<S: Scalar>(&self, b: &S, t: &S) -> i8 {
        match self.poly.eval(b, t).sgn() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// The locus restricted to a fixed rational `b`, as a polynomial in `t` with
    /// the spurious factor `t` removed.
    pub fn at_b(&self, b: &Q) -> Poly {
        self.poly.strip_t().at_b(b)
    }

    pub fn at_t(&self, t: &Q) -> Poly {
        self.poly.strip_t().at_t(t)
    }

    fn key(&self) -> BiPoly {
        self.poly.strip_t().normalized()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallOptions {
    pub max_destabilizers: usize,
    /// Also build walls between pairs of destabilizers.
    pub pairwise: bool,
    pub max_pairs: usize,
    /// Cells per side used for interval bounds over the rectangle.
    pub cells: usize,
}

impl Default for WallOptions {
    fn default() -> Self {
        WallOptions { max_destabilizers: 500_000, pairwise: false, max_pairs: 2_000_000, cells: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct WallSet {
    pub alpha: MukaiVector,
    pub region: SliceRegion,
    /// `max |Z(alpha)|^2` over the corners.
    pub corner_bound: Q,
    /// Bound actually used; exceeds `corner_bound` only if the corners were not
    /// certified to dominate the rectangle.
    pub mass_bound: Q,
    /// Superset of the classes reaching the bound inside the rectangle; the
    /// interval test may keep a few that never do.
    pub destabilizers: Vec<MukaiVector>,
    /// Destabilizers whose wall with `alpha` vanishes identically on the slice.
    pub parallel: Vec<MukaiVector>,
    pub walls: Vec<Wall>,
    /// Some walls were kept without an exact emptiness test.
    pub conservative: bool,
}

impl WallSet {
    pub fn bound_widened(&self) -> bool {
        self.mass_bound > self.corner_bound
    }
}

/// Upper bound of `|Z(alpha)|^2` over the rectangle, starting from the corner
/// maximum and widening where subdivision cannot certify it.
pub fn certified_mass_bound(lattice: &NsLattice, region: &SliceRegion, alpha: &MukaiVector) -> Result<(Q, Q), WallError> {
    let f = SliceForms::new(lattice, region);
    let (re, im) = f.charge(alpha);
    let abs2 = re.mul(&re).add(&im.mul(&im));
    let db = abs2.d_b();
    let dt = abs2.d_t();
    let corner = region.corners().iter().map(|(b, t)| abs2.eval(b, t)).max().unwrap();
    let mut bound = corner.clone();
    let mut stack = vec![(Interval::new(region.b0.clone(), region.b1.clone()), Interval::new(region.t0.clone(), region.t1.clone()), 0u32)];
    let mut budget = 40_000usize;
    while let Some((bi, ti, depth)) = stack.pop() {
        let ub = re.eval_interval(&bi, &ti).max_abs().pow(2) + im.eval_interval(&bi, &ti).max_abs().pow(2);
        let ub = ub.min(abs2.eval_interval(&bi, &ti).hi);
        if ub <= corner {
            continue;
        }
        let monotone = |p: &BiPoly| {
            let r = p.eval_interval(&bi, &ti);
            !r.lo.is_negative() || !r.hi.is_positive()
        };
        // the exact value at the cell corners never exceeds the corner bound
        // unless the maximum is interior
        let inner = [(&bi.lo, &ti.lo), (&bi.lo, &ti.hi), (&bi.hi, &ti.lo), (&bi.hi, &ti.hi)]
            .iter()
            .map(|(b, t)| abs2.eval(*b, *t))
            .max()
            .unwrap();
        if inner > bound {
            bound = inner;
        }
        // monotone in both coordinates: the cell maximum is a cell corner
        if monotone(&db) && monotone(&dt) {
            continue;
        }
        if depth >= 24 || budget == 0 {
            if ub > bound {
                bound = ub;
            }
            continue;
        }
        budget -= 1;
        let (b0, b1) = bi.split();
        let (t0, t1) = ti.split();
        for (x, y) in [(&b0, &t0), (&b0, &t1), (&b1, &t0), (&b1, &t1)] {
            stack.push((x.clone(), y.clone(), depth + 1));
        }
    }
    Ok((corner, bound))
}

/// Every `v != 0` with `v^2 >= -2` and `|Z(v)|^2 <= m` somewhere in the
/// rectangle. Conservative: may include classes that only pass the interval
/// test.
pub fn enumerate_region(lattice: &NsLattice, region: &SliceRegion, m: &Q, cells: usize) -> Result<Vec<MukaiVector>, WallError> {
    let f = SliceForms::new(lattice, region);
    let w_min = &region.t0 * &region.t0 * &f.ww;
    let hb = HodgeBox::new(lattice, &region.w_dir.0, &w_min, m)?;
    let cells = cells.max(1);
    let bstep = (&region.b1 - &region.b0) / qint(cells as i64);
    let tstep = (&region.t1 - &region.t0) / qint(cells as i64);
    let mut grid = Vec::with_capacity(cells * cells);
    for i in 0..cells {
        let bl = &region.b0 + &bstep * qint(i as i64);
        let bi = Interval::new(bl.clone(), &bl + &bstep);
        for j in 0..cells {
            let tl = &region.t0 + &tstep * qint(j as i64);
            let ti = Interval::new(tl.clone(), &tl + &tstep);
            let b2 = bi.square();
            let t2 = ti.square();
            grid.push((bi.clone(), ti, b2, t2));
        }
    }
    let mut out = Vec::new();
    let to_i64 = |x: &BigInt| i64::try_from(x).map_err(|_| WallError::Enumeration(EnumerationError::TooLarge(x.to_string())));
    for r in -hb.r_max..=hb.r_max {
        let Some(rad) = hb.d_radius(r) else { continue };
        let rq = qint(r);
        let mut ranges = Vec::new();
        for (bi, u) in region.b_dir.0.iter().zip(&rad) {
            let c0 = &rq * &region.b0 * bi;
            let c1 = &rq * &region.b1 * bi;
            let (lo, hi) = if c0 <= c1 { (c0, c1) } else { (c1, c0) };
            let u = Q::from_integer(u.clone());
            ranges.push((to_i64(&ceil_int(&(lo - &u)))?, to_i64(&floor_int(&(hi + &u)))?));
        }
        let mut err = None;
        for_each_lattice_point(&ranges, |l| {
            if err.is_some() {
                return;
            }
            let probe = MukaiVector::new(r, l.to_vec(), 0);
            let lb = SliceForms::l_dot(&f.gb, &probe);
            let lw = SliceForms::l_dot(&f.gw, &probe);
            let mut s_ranges: Vec<(i64, i64)> = Vec::new();
            for (bi, ti, b2, t2) in &grid {
                // Im = t (lw - r b bw)
                let lin = bi.scale(&(-&rq * &f.bw)).add(&Interval::point(lw.clone()));
                let im = lin.mul(ti);
                let im2 = im.min_abs().pow(2);
                if im2 > *m {
                    continue;
                }
                // Re + s = b lb - r (b^2 bb - t^2 ww)/2
                let fpart = bi
                    .scale(&lb)
                    .add(&b2.scale(&(-&rq * &f.bb * half())))
                    .add(&t2.scale(&(&rq * &f.ww * half())));
                let rs = Q::from_integer(ceil_sqrt(&(m - &im2)));
                let lo = to_i64(&ceil_int(&(&fpart.lo - &rs)));
                let hi = to_i64(&floor_int(&(&fpart.hi + &rs)));
                match (lo, hi) {
                    (Ok(a), Ok(b)) if a <= b => s_ranges.push((a, b)),
                    (Ok(_), Ok(_)) => {}
                    (Err(e), _) | (_, Err(e)) => {
                        err = Some(e);
                        return;
                    }
                }
            }
            s_ranges.sort();
            let mut merged: Vec<(i64, i64)> = Vec::new();
            for (a, b) in s_ranges {
                match merged.last_mut() {
                    Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
                    _ => merged.push((a, b)),
                }
            }
            for (a, b) in merged {
                for s in a..=b {
                    let v = MukaiVector::new(r, l.to_vec(), s);
                    if v.is_zero() || lattice.pair_int(&v, &v) < BigInt::from(-2) {
                        continue;
                    }
                    out.push(v);
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    out.sort();
    Ok(out)
}

/// Exact test: does `p0(b) + p2(b) u` vanish for some `b` in `[b0, b1]`,
/// `u` in `[u0, u1]`?
fn linear_locus_meets(p0: &Poly, p2: &Poly, b0: &Q, b1: &Q, u0: &Q, u1: &Q) -> bool {
    let h0 = p0.add(&p2.scale(u0));
    let h1 = p0.add(&p2.scale(u1));
    let h = h0.mul(&h1);
    if h.is_zero() {
        return true;
    }
    if !h.eval_q(b0).is_positive() || !h.eval_q(b1).is_positive() {
        return true;
    }
    if b0 == b1 {
        return false;
    }
    h.count_roots(b0, b1) > 0
}

/// Whether the wall locus meets the closed rectangle. `None` when the
/// polynomial lacks the slice shape and no exact answer is available.
pub fn meets_region(wall: &Wall, region: &SliceRegion) -> Option<bool> {
    match &wall.locus {
        Locus::LinearInU { p0, p2 } => Some(linear_locus_meets(
            p0,
            p2,
            &region.b0,
            &region.b1,
            &(&region.t0 * &region.t0),
            &(&region.t1 * &region.t1),
        )),
        Locus::General(_) => None,
    }
}

pub fn compute_walls(
    lattice: &NsLattice,
    region: &SliceRegion,
    alpha: &MukaiVector,
    opts: &WallOptions,
) -> Result<WallSet, WallError> {
    let (corner, bound) = certified_mass_bound(lattice, region, alpha)?;
    let destabilizers = if bound.is_positive() {
        enumerate_region(lattice, region, &bound, opts.cells)?
    } else {
        Vec::new()
    };
    if destabilizers.len() > opts.max_destabilizers {
        return Err(WallError::BudgetExceeded { found: destabilizers.len(), limit: opts.max_destabilizers });
    }
    let mut conservative = false;
    let mut parallel = Vec::new();
    let mut groups: BTreeMap<BiPoly, Wall> = BTreeMap::new();
    let mut add_pair = |vi: &MukaiVector, vj: &MukaiVector, conservative: &mut bool, parallel: Option<&mut Vec<MukaiVector>>| {
        if vi.proportional(vj) {
            return;
        }
        let w = Wall::new(lattice, region, vi.clone(), vj.clone());
        if w.poly.is_zero() {
            if let Some(p) = parallel {
                p.push(vi.clone());
            }
            return;
        }
        let meets = match meets_region(&w, region) {
            Some(m) => m,
            None => {
                *conservative = true;
                true
            }
        };
        if !meets {
            return;
        }
        match groups.get_mut(&w.key()) {
            Some(g) => g.members.push(vi.clone()),
            None => {
                groups.insert(w.key(), w);
            }
        }
    };
    for v in &destabilizers {
        add_pair(v, alpha, &mut conservative, Some(&mut parallel));
    }
    if opts.pairwise {
        let n = destabilizers.len();
        if n * n.saturating_sub(1) / 2 > opts.max_pairs {
            return Err(WallError::BudgetExceeded { found: n * (n - 1) / 2, limit: opts.max_pairs });
        }
        for i in 0..n {
            for j in i + 1..n {
                add_pair(&destabilizers[i], &destabilizers[j], &mut conservative, None);
            }
        }
    }
    // proportional classes never give walls but still align with alpha everywhere
    parallel.extend(destabilizers.iter().filter(|v| v.proportional(alpha)).cloned());
    parallel.sort();
    parallel.dedup();
    let mut walls: Vec<Wall> = groups.into_values().collect();
    for w in walls.iter_mut() {
        w.members.sort();
        w.members.dedup();
        // canonical representative
        if let Some(first) = w.members.first().cloned() {
            if first != w.vi && w.vj == *alpha {
                let key = w.key();
                let mut nw = Wall::new(lattice, region, first, alpha.clone());
                debug_assert_eq!(nw.key(), key);
                nw.members = std::mem::take(&mut w.members);
                *w = nw;
            }
        }
    }
    walls.sort_by(|a, b| (&a.vi, &a.vj).cmp(&(&b.vi, &b.vj)));
    Ok(WallSet {
        alpha: alpha.clone(),
        region: region.clone(),
        corner_bound: corner,
        mass_bound: bound,
        destabilizers,
        parallel,
        walls,
        conservative,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChamberFingerprint(pub Vec<i8>);

impl ChamberFingerprint {
    pub fn off_walls(&self) -> bool {
        self.0.iter().all(|s| *s != 0)
    }
}

pub fn classify_point<S: Scalar>(walls: &[Wall], b: &S, t: &S) -> ChamberFingerprint {
    ChamberFingerprint(walls.iter().map(|w| w.sign_at(b, t)).collect())
}

/// Which coordinate moves when stepping off the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AlongT,
    AlongB,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallPoint {
    pub b: QuadExt,
    pub t: QuadExt,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OnWall {
    Exact(WallPoint),
    /// Root of a higher-degree restriction, isolated in `[lo, hi]`.
    Isolated { b: Q, lo: Q, hi: Q },
}

/// Roots in `(lo, hi)` of a polynomial of degree at most 2, exactly.
fn quadratic_roots(p: &Poly) -> Option<Vec<QuadExt>> {
    match p.degree() {
        None | Some(0) => Some(Vec::new()),
        Some(1) => Some(vec![QuadExt::rational(-p.coeff(0) / p.coeff(1))]),
        Some(2) => {
            let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
            let disc = &b * &b - qint(4) * &a * &c;
            if disc.is_negative() {
                return Some(Vec::new());
            }
            let sq = QuadExt::sqrt_q(&disc);
            let den = Q::one() / (qint(2) * &a);
            let mb = QuadExt::rational(-b);
            let mut r = vec![mb.sub(&sq).mul_q(&den), mb.add(&sq).mul_q(&den)];
            r.sort_by(|x, y| x.cmp_to(y));
            r.dedup();
            Some(r)
        }
        _ => None,
    }
}

fn in_open(x: &QuadExt, lo: &Q, hi: &Q) -> bool {
    x.cmp_to(&QuadExt::rational(lo.clone())) == Ordering::Greater
        && x.cmp_to(&QuadExt::rational(hi.clone())) == Ordering::Less
}

/// A point of the wall with the given rational `b` and `t` strictly inside the
/// region. If the whole vertical line `b` lies on the wall, `t` is the middle
/// of the region.
pub fn point_on_wall(wall: &Wall, region: &SliceRegion, b: &Q) -> Result<OnWall, WallError> {
    if b < &region.b0 || b > &region.b1 {
        return Err(WallError::NoRootInRegion(crate::arith::fmt_rational(b)));
    }
    let p = wall.at_b(b);
    if p.is_zero() {
        let t = (&region.t0 + &region.t1) * half();
        return Ok(OnWall::Exact(WallPoint { b: QuadExt::rational(b.clone()), t: QuadExt::rational(t), direction: Direction::AlongB }));
    }
    // only even powers of t: solve in u = t^2
    let even = p.coeffs().iter().enumerate().all(|(i, c)| i % 2 == 0 || c.is_zero());
    if even && p.degree().unwrap_or(0) <= 4 {
        let u = Poly::new(p.coeffs().iter().step_by(2).cloned().collect());
        if let Some(roots) = quadratic_roots(&u) {
            for r in roots {
                let Some(uq) = r.as_q() else { continue };
                if !uq.is_positive() {
                    continue;
                }
                let t = QuadExt::sqrt_q(&uq);
                if in_open(&t, &region.t0, &region.t1) {
                    return Ok(OnWall::Exact(WallPoint { b: QuadExt::rational(b.clone()), t, direction: Direction::AlongT }));
                }
            }
            if u.degree().unwrap_or(0) <= 1 {
                return Err(WallError::NoRootInRegion(crate::arith::fmt_rational(b)));
            }
        }
    }
    if let Some(roots) = quadratic_roots(&p) {
        for t in roots {
            if in_open(&t, &region.t0, &region.t1) {
                return Ok(OnWall::Exact(WallPoint { b: QuadExt::rational(b.clone()), t, direction: Direction::AlongT }));
            }
        }
        return Err(WallError::NoRootInRegion(crate::arith::fmt_rational(b)));
    }
    // higher degree: isolate the smallest root in (t0, t1) by bisection
    let (mut lo, mut hi) = (region.t0.clone(), region.t1.clone());
    if p.count_roots(&lo, &hi) == 0 || p.eval_q(&hi).is_zero() && p.count_roots(&lo, &hi) == 1 {
        return Err(WallError::NoRootInRegion(crate::arith::fmt_rational(b)));
    }
    let eps = Q::new(BigInt::one(), BigInt::from(1u64 << 40));
    while &hi - &lo > eps {
        let mid = (&lo + &hi) * half();
        if p.count_roots(&lo, &mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(OnWall::Isolated { b: b.clone(), lo, hi })
}

/// Rational points of the vertical lines contained in the wall locus.
pub fn vertical_components(wall: &Wall, region: &SliceRegion) -> Vec<QuadExt> {
    let g = wall.poly.strip_t();
    let max_j = g.terms().keys().map(|k| k.1).max().unwrap_or(0);
    let mut acc = Poly::zero();
    for j in 0..=max_j {
        acc = acc.gcd(&g.t_coeff(j));
    }
    let mut out = Vec::new();
    if let Some(roots) = quadratic_roots(&acc) {
        for r in roots {
            if r.cmp_to(&QuadExt::rational(region.b0.clone())) != Ordering::Less
                && r.cmp_to(&QuadExt::rational(region.b1.clone())) != Ordering::Greater
            {
                out.push(r);
            }
        }
    }
    out
}

/// Number of roots of the restricted polynomial `p` in the closed interval
/// between two points.
fn roots_between<S: Scalar>(p: &Poly, lo: &S, hi: &S) -> usize {
    if p.is_zero() {
        return usize::MAX;
    }
    p.count_roots_closed(lo, hi)
}

/// Two rational points straddling the wall at `point`, off every wall of
/// `walls`, and within the region. `own` indexes the wall in `walls`.
pub fn sample_across(
    own: usize,
    point: &WallPoint,
    walls: &[Wall],
    region: &SliceRegion,
    min_step: &Q,
) -> Result<((Q, Q), (Q, Q)), WallError> {
    let (fixed, moving, lo_lim, hi_lim) = match point.direction {
        Direction::AlongT => (&point.b, &point.t, &region.t0, &region.t1),
        Direction::AlongB => (&point.t, &point.b, &region.b0, &region.b1),
    };
    let fixed = fixed.as_q().ok_or(WallError::InexactWallPoint)?;
    let restrict = |w: &Wall| match point.direction {
        Direction::AlongT => w.at_b(&fixed),
        Direction::AlongB => w.at_t(&fixed),
    };
    let own_p = restrict(&walls[own]);
    let others: Vec<Poly> = walls.iter().enumerate().filter(|(i, _)| *i != own).map(|(_, w)| restrict(w)).collect();
    if others.iter().any(|p| p.is_zero()) {
        return Err(WallError::CannotSeparate(crate::arith::fmt_rational(min_step)));
    }
    let mut delta = (hi_lim - lo_lim) / qint(8);
    while &delta >= min_step {
        let c = moving.approx(&(&delta / qint(8)));
        let a = &c - &delta * half();
        let z = &c + &delta * half();
        if &a >= lo_lim && &z <= hi_lim {
            let ok_own = own_p.is_zero()
                || (roots_between(&own_p, &a, &z) == 1
                    && own_p.eval_q(&a).is_positive() != own_p.eval_q(&z).is_positive()
                    && !own_p.eval_q(&a).is_zero()
                    && !own_p.eval_q(&z).is_zero());
            let ok_others = ok_own && others.iter().all(|p| clear_of(p, &a, &z));
            if ok_others {
                let pts = match point.direction {
                    Direction::AlongT => ((fixed.clone(), a), (fixed.clone(), z)),
                    Direction::AlongB => ((a, fixed.clone()), (z, fixed.clone())),
                };
                return Ok(pts);
            }
        }
        delta *= half();
    }
    Err(WallError::CannotSeparate(crate::arith::fmt_rational(min_step)))
}

/// No root of `p` in `[a, z]`.
fn clear_of(p: &Poly, a: &Q, z: &Q) -> bool {
    // cheap rejection for the common `c0 + c2 x^2` restriction
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return !p.is_zero();
    }
    if d <= 2 && p.coeff(1).is_zero() {
        let u = -p.coeff(0) / p.coeff(2);
        if !u.is_positive() {
            return true;
        }
        let lo = if a.is_positive() { a * a } else { Q::zero() };
        let hi = z * z;
        // a > 0 always holds for t; b may be negative, fall through then
        if a.is_positive() {
            return u < lo || u > hi;
        }
        let _ = hi;
    }
    roots_between(p, a, z) == 0
}

/// Whether the closed segment between two rational points meets the wall.
pub fn segment_crosses(wall: &Wall, p: &(Q, Q), q: &(Q, Q)) -> bool {
    let db = &q.0 - &p.0;
    let dt = &q.1 - &p.1;
    let s = wall.poly.along(&p.0, &db, &p.1, &dt);
    if s.is_zero() {
        return true;
    }
    s.count_roots_closed(&Q::zero(), &Q::one()) > 0
}

/// A wall point with both sides sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSite {
    pub point: WallPoint,
    pub left: (Q, Q),
    pub right: (Q, Q),
}

/// Finds a crossing site on the wall: vertical components first, then rational
/// `b` values on dyadic grids of increasing depth, nearest the middle first.
pub fn find_crossing(own: usize, walls: &[Wall], region: &SliceRegion, min_step: &Q) -> Result<CrossingSite, WallError> {
    let wall = &walls[own];
    let mut tried = BTreeSet::new();
    for b in vertical_components(wall, region) {
        let t = (&region.t0 + &region.t1) * half();
        // walk t upward through a few rational heights until separable
        for k in 1..8i64 {
            let tk = &region.t0 + (&region.t1 - &region.t0) * Q::new(BigInt::from(k), BigInt::from(8));
            let point = WallPoint { b: b.clone(), t: QuadExt::rational(tk), direction: Direction::AlongB };
            if let Ok((l, r)) = sample_across(own, &point, walls, region, min_step) {
                return Ok(CrossingSite { point, left: l, right: r });
            }
        }
        let _ = t;
    }
    let width = &region.b1 - &region.b0;
    for depth in 1..=10u32 {
        let n = 1i64 << depth;
        let mut cands: Vec<Q> = (1..n).map(|k| &region.b0 + &width * Q::new(BigInt::from(k), BigInt::from(n))).collect();
        let mid = (&region.b0 + &region.b1) * half();
        cands.sort_by(|x, y| (x - &mid).abs().cmp(&(y - &mid).abs()).then(x.cmp(y)));
        for b in cands {
            if !tried.insert(b.clone()) {
                continue;
            }
            let Ok(OnWall::Exact(point)) = point_on_wall(wall, region, &b) else { continue };
            if point.direction != Direction::AlongT {
                continue;
            }
            if let Ok((l, r)) = sample_across(own, &point, walls, region, min_step) {
                return Ok(CrossingSite { point, left: l, right: r });
            }
        }
    }
    Err(WallError::NoCrossingSite)
}

/// Default minimum displacement for `sample_across`.
pub fn default_min_step() -> Q {
    Q::new(BigInt::one(), BigInt::from(1u64 << 32))
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
    fn region(b0: i64, b1: i64, t0: i64, t1: i64) -> SliceRegion {
        let h = RationalDivisor::from_ints(&[1]);
        SliceRegion::new(&k3(), h.clone(), h, (qi(b0), qi(b1)), (qi(t0), qi(t1))).unwrap()
    }

    #[test]
    fn flagship_wall_shape() {
        let reg = region(-2, 2, 1, 3);
        // W(v, alpha) for alpha = (1,0,-1) is proportional to t (x(1+b^2+t^2) - b(r+s))
        let w = wall_polynomial(&k3(), &reg, &mv(0, 1, 0), &mv(1, 0, -1));
        let expect = BiPoly::from_terms([((0, 0), qi(1)), ((2, 0), qi(1)), ((0, 2), qi(1))]);
        assert_eq!(w.strip_t().normalized(), expect);
        assert!(w.total_degree() <= 4);
    }

    #[test]
    fn swapping_flips_sign_only() {
        let reg = region(-2, 2, 1, 3);
        let a = wall_polynomial(&k3(), &reg, &mv(1, 1, 3), &mv(1, 0, -1));
        let b = wall_polynomial(&k3(), &reg, &mv(1, 0, -1), &mv(1, 1, 3));
        assert_eq!(a, b.neg());
        let sa = side_polynomial(&k3(), &reg, &mv(1, 1, 3), &mv(1, 0, -1));
        let sb = side_polynomial(&k3(), &reg, &mv(1, 0, -1), &mv(1, 1, 3));
        assert_eq!(sa, sb);
    }

    #[test]
    fn region_validation() {
        let h = RationalDivisor::from_ints(&[1]);
        assert!(SliceRegion::new(&k3(), h.clone(), h.clone(), (qi(0), qi(1)), (qi(0), qi(1))).is_err());
        assert!(SliceRegion::new(&k3(), h.clone(), h.clone(), (qi(1), qi(0)), (qi(1), qi(2))).is_err());
        assert!(SliceRegion::new(&k3(), h.clone(), RationalDivisor::from_ints(&[0]), (qi(0), qi(1)), (qi(1), qi(2))).is_err());
    }

    #[test]
    fn two_circles_and_a_line() {
        let reg = region(-3, 3, 1, 4);
        // locus b = 0
        let line = Wall::new(&k3(), &reg, mv(0, 0, 1), mv(1, 0, 0));
        // locus b^2 + t^2 = 4
        let circ = Wall::new(&k3(), &reg, mv(0, 1, 0), mv(1, 0, 4));
        // locus b^2 + t^2 = 9
        let circ9 = Wall::new(&k3(), &reg, mv(0, 1, 0), mv(1, 0, 9));
        assert_eq!(meets_region(&circ, &reg), Some(true));
        let far = region(5, 6, 1, 2);
        assert_eq!(meets_region(&circ, &far), Some(false));

        match point_on_wall(&circ, &reg, &q(1, 2)).unwrap() {
            OnWall::Exact(p) => {
                assert_eq!(p.t.mul(&p.t), QuadExt::rational(q(15, 4)));
                assert_eq!(circ.sign_at(&p.b, &p.t), 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(point_on_wall(&circ, &reg, &qi(3)), Err(WallError::NoRootInRegion(_))));

        let walls = vec![circ.clone(), circ9.clone()];
        let OnWall::Exact(p) = point_on_wall(&circ, &reg, &q(1, 2)).unwrap() else { unreachable!() };
        let (l, r) = sample_across(0, &p, &walls, &reg, &default_min_step()).unwrap();
        let fl = classify_point(&walls, &l.0, &l.1);
        let fr = classify_point(&walls, &r.0, &r.1);
        assert!(fl.off_walls() && fr.off_walls());
        assert_ne!(fl.0[0], fr.0[0]);
        assert_eq!(fl.0[1], fr.0[1]);

        // (0, 2) lies on both the line and the circle
        let walls = vec![circ, line];
        let p = WallPoint { b: QuadExt::rational(qi(0)), t: QuadExt::rational(qi(2)), direction: Direction::AlongT };
        assert!(matches!(sample_across(0, &p, &walls, &reg, &default_min_step()), Err(WallError::CannotSeparate(_))));
    }

    #[test]
    fn vertical_line_components() {
        let reg = region(-3, 3, 1, 4);
        let line = Wall::new(&k3(), &reg, mv(0, 0, 1), mv(1, 0, 0));
        assert_eq!(vertical_components(&line, &reg), vec![QuadExt::rational(qi(0))]);
        let site = find_crossing(0, std::slice::from_ref(&line), &reg, &default_min_step()).unwrap();
        assert_eq!(site.point.direction, Direction::AlongB);
        assert!(site.left.0 < qi(0) && site.right.0 > qi(0));
        assert!(segment_crosses(&line, &site.left, &site.right));
        assert!(!segment_crosses(&line, &(qi(1), qi(2)), &(qi(2), qi(3))));
    }
}
