#![allow(dead_code)]

use std::sync::OnceLock;

use k3stab::arith::{q, qi, Q};
use k3stab::lattice::{MukaiVector, NsLattice, RationalDivisor};
use k3stab::walls::{compute_walls, SliceRegion, WallOptions, WallSet};
use proptest::prelude::*;

pub fn k3(h2: i64) -> NsLattice {
    NsLattice::rank_one(h2, 1).unwrap()
}

pub fn mv(r: i64, l: i64, s: i64) -> MukaiVector {
    MukaiVector::new(r, vec![l], s)
}

/// Rank-one and rank-two test lattices, K3 and abelian.
pub fn lattices() -> Vec<NsLattice> {
    vec![
        k3(2),
        k3(4),
        NsLattice::rank_one(2, 0).unwrap(),
        NsLattice::k3(vec![vec![2, 1], vec![1, -2]]).unwrap(),
        NsLattice::abelian(vec![vec![0, 1], vec![1, 0]]).unwrap(),
        NsLattice::k3(vec![vec![2, 0], vec![0, -4]]).unwrap(),
    ]
}

pub fn rat() -> impl Strategy<Value = Q> {
    (-24i64..=24, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

pub fn rats(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rat(), n)
}

pub fn class(rank: usize) -> impl Strategy<Value = MukaiVector> {
    (-4i64..=4, prop::collection::vec(-4i64..=4, rank), -6i64..=6).prop_map(|(r, l, s)| MukaiVector::new(r, l, s))
}

pub fn dot(l: &NsLattice, a: &[Q], b: &[Q]) -> Q {
    let g = l.gram();
    let mut acc = qi(0);
    for i in 0..a.len() {
        for j in 0..b.len() {
            acc += &a[i] * &b[j] * qi(g[i][j]);
        }
    }
    acc
}

pub fn div(c: &[Q]) -> RationalDivisor {
    RationalDivisor::new(c.to_vec())
}

/// The rank-one K3 with `H^2 = 2`, `alpha = (1,0,-1)`, `b in [-2,2]`, `t in [1,3]`.
pub fn flagship() -> &'static (NsLattice, WallSet) {
    static CELL: OnceLock<(NsLattice, WallSet)> = OnceLock::new();
    CELL.get_or_init(|| {
        let lat = k3(2);
        let h = RationalDivisor::from_ints(&[1]);
        let region = SliceRegion::new(&lat, h.clone(), h, (qi(-2), qi(2)), (qi(1), qi(3))).unwrap();
        let ws = compute_walls(&lat, &region, &mv(1, 0, -1), &WallOptions::default()).unwrap();
        (lat, ws)
    })
}

fn f(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

/// Naive scan for `{v != 0 : v^2 >= -2, |Z(v)|^2 <= m2}` on `Z H` with
/// `H^2 = h` at `beta = bH`, `omega = tH`.
///
/// With `d = l - r b`: `|Im Z| = t h |d|`, and `2 r Re Z = v^2 - h d^2 + h r^2 t^2`,
/// so `h t^2 r^2 <= 2|r| m + 2 + m^2/(h t^2)`. Floats only size the box; it
/// is padded and every class is then tested exactly.
pub fn naive_enumerate(h: i64, b: &Q, t: &Q, m2: &Q) -> Vec<MukaiVector> {
    let lat = k3(h);
    let p = k3stab::charge::StabilityPoint::new(&lat, div(std::slice::from_ref(b)), div(std::slice::from_ref(t))).unwrap();
    let (hf, bf, tf, m) = (h as f64, f(b), f(t), f(m2).sqrt());
    let r_max = ((m + (2.0 * m * m + 2.0 * hf * tf * tf).sqrt()) / (hf * tf * tf)).ceil() as i64 + 2;
    let d_max = m / (tf * hf) + 2.0;
    let mut out = Vec::new();
    for r in -r_max..=r_max {
        let rb = r as f64 * bf;
        for l in (rb - d_max).floor() as i64..=(rb + d_max).ceil() as i64 {
            let c = bf * l as f64 * hf - r as f64 * hf * (bf * bf - tf * tf) / 2.0;
            for s in (c - m - 2.0).floor() as i64..=(c + m + 2.0).ceil() as i64 {
                let v = mv(r, l, s);
                if v.is_zero() || h * l * l - 2 * r * s < -2 {
                    continue;
                }
                let z = k3stab::charge::central_charge(&p, &v);
                if &z.re * &z.re + &z.im * &z.im <= *m2 {
                    out.push(v);
                }
            }
        }
    }
    out.sort();
    out
}

/// Two-class wall on `Z H`, `H^2 = 2`: `a1 = (0,H,0)` and `a2 = (1,0,1)` are
/// aligned at `(b, t) = (-3/5, 4/5)`, where `t^2 = 1 - b^2`, and not at
/// `sigma0 = (-3/5, 9/10)`.
pub struct TwoClass {
    pub lattice: NsLattice,
    pub sigma0: k3stab::charge::StabilityPoint,
    pub sigma1: k3stab::charge::StabilityPoint,
    pub a1: MukaiVector,
    pub a2: MukaiVector,
    pub alpha: MukaiVector,
}

pub fn two_class() -> TwoClass {
    use k3stab::charge::StabilityPoint;
    let lattice = k3(2);
    let at = |b: Q, t: Q| StabilityPoint::new(&lattice, div(&[b]), div(&[t])).unwrap();
    let sigma0 = at(q(-3, 5), q(9, 10));
    let sigma1 = at(q(-3, 5), q(4, 5));
    let (a1, a2) = (mv(0, 1, 0), mv(1, 0, 1));
    let alpha = a1.add(&a2);
    TwoClass { sigma0, sigma1, a1, a2, alpha, lattice }
}

/// Both compositions of logarithm and exponential on every ray with at most
/// four candidates, over a grid of points and classes with `|Z|^2 <= 12`.
/// Returns the number of rays with more than one candidate.
pub fn log_exp_sweep() -> Result<usize, String> {
    use k3stab::arith::qi;
    use k3stab::charge::StabilityPoint;
    use k3stab::enumeration::{effective_candidates, enumerate_bounded, EnumerationBudget};
    use k3stab::hall::{delta_bar, epsilon_to_delta_over, delta_to_epsilon_over, ITable, RayScope};
    use std::collections::BTreeSet;

    let l = k3(2);
    let mut seen = BTreeSet::new();
    let mut nontrivial = 0;
    for bn in [-3, -1, 0, 1, 2] {
        for tn in [1, 2, 4] {
            let p = StabilityPoint::new(&l, div(&[q(bn, 2)]), div(&[q(tn, 2)])).unwrap();
            for alpha in enumerate_bounded(&p, &EnumerationBudget::new(qi(12))).unwrap().classes {
                // classes with vanishing charge have no ray
                let Ok(cands) = effective_candidates(&p, &alpha) else { continue };
                if cands.len() > 4 || !seen.insert((bn, tn, cands.clone())) {
                    continue;
                }
                if cands.len() > 1 {
                    nontrivial += 1;
                }
                let scope = RayScope::new(&p, &cands, None);
                let it = ITable::formal(&cands);
                let et = scope.epsilon_table(&l, &it);
                let dt: ITable = cands
                    .iter()
                    .map(|v| (v.clone(), epsilon_to_delta_over(&l, scope.decompositions(v).unwrap(), &it, v).coefficient(v)))
                    .collect();
                for v in &cands {
                    let d = scope.decompositions(v).unwrap();
                    if epsilon_to_delta_over(&l, d, &et, v) != delta_bar(&it, v) {
                        return Err(format!("exp(log) fails at {v}, point ({bn}/2, {tn}/2)"));
                    }
                    if delta_to_epsilon_over(&l, d, &dt, v) != delta_bar(&it, v) {
                        return Err(format!("log(exp) fails at {v}, point ({bn}/2, {tn}/2)"));
                    }
                }
            }
        }
    }
    Ok(nontrivial)
}
