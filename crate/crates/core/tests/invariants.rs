mod common;

use std::collections::BTreeMap;

use common::*;
use k3stab::arith::{q, qi, Q};
use k3stab::charge::{KCharge, StabilityPoint};
use k3stab::enumeration::{effective_candidates, enumerate_bounded, enumerate_ray_decompositions, EnumerationBudget};
use k3stab::hall::*;
use k3stab::invariants::*;
use k3stab::lattice::{MukaiVector, RationalDivisor};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qm1() -> RatFunc {
    RatFunc::q_pow(1).sub(&RatFunc::one())
}

/// Rays at a few points with two to four candidates.
fn small_rays() -> Vec<(StabilityPoint, MukaiVector, Vec<MukaiVector>)> {
    let l = k3(2);
    let mut out = Vec::new();
    for (bn, tn) in [(-1, 1), (0, 1), (1, 2), (2, 1), (-3, 2), (0, 4)] {
        let p = StabilityPoint::new(&l, div(&[q(bn, 2)]), div(&[q(tn, 2)])).unwrap();
        for alpha in enumerate_bounded(&p, &EnumerationBudget::new(qi(12))).unwrap().classes {
            let Ok(c) = effective_candidates(&p, &alpha) else { continue };
            if (2..=4).contains(&c.len()) {
                out.push((p.clone(), alpha, c));
            }
        }
    }
    assert!(out.len() >= 10);
    out
}

/// The weighted sum over decompositions against the logarithm expanded by
/// hand in the Hall algebra.
#[test]
fn yomi_sum_is_q_minus_one_times_log() {
    for (p, alpha, cands) in small_rays() {
        let l = p.lattice();
        let it = ITable::formal(&cands);
        let mut eps = FormalPoly::zero();
        for d in enumerate_ray_decompositions(&p, &alpha).unwrap() {
            let n = d.parts().len() as i64;
            let prod = d.parts().iter().fold(AlgebraElement::unit(l.rank()), |acc, v| acc.mul(&delta_bar(&it, v), l));
            let sign = if n % 2 == 1 { 1 } else { -1 };
            eps = eps.add(&prod.coefficient(&alpha).scale(&RatFunc::constant(q(sign, n))));
        }
        let rep = j_alpha(&p, &alpha, &it).unwrap();
        assert_eq!(rep.j, eps.scale(&qm1()), "{alpha}");
    }
}

/// Exponentiating `J / (q - 1)` over the ray recovers the delta class.
#[test]
fn j_values_exponentiate_to_delta() {
    for (p, alpha, cands) in small_rays() {
        let l = p.lattice();
        let it = ITable::formal(&cands);
        let inv = qm1().inv().unwrap();
        let et: ITable = cands.iter().map(|v| (v.clone(), j_alpha(&p, v, &it).unwrap().j.scale(&inv))).collect();
        let d = enumerate_ray_decompositions(&p, &alpha).unwrap();
        assert_eq!(epsilon_to_delta_over(l, &d, &et, &alpha), delta_bar(&it, &alpha));
    }
}

#[test]
fn decomposition_order_is_irrelevant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, alpha, cands) in small_rays() {
        let it = ITable::formal(&cands);
        let mut d = enumerate_ray_decompositions(&p, &alpha).unwrap();
        let a = j_over(p.lattice(), &d, &it, &alpha).unwrap();
        d.shuffle(&mut rng);
        let b = j_over(p.lattice(), &d, &it, &alpha).unwrap();
        assert_eq!(a.j, b.j);
        assert_eq!(a.decomposition_count, b.decomposition_count);
    }
}

#[test]
fn single_part_weight() {
    let l = k3(2);
    let v = mv(1, 0, -1);
    let it = ITable::formal(std::slice::from_ref(&v));
    assert_eq!(j_weight(&l, std::slice::from_ref(&v), &it), FormalPoly::symbol(&v).scale(&qm1()));
    assert_eq!(j_weight(&l, std::slice::from_ref(&v), &it).to_string(), "(q - 1)*I[1,0,-1]");
}

/// Alignment at `(0, k (c omega))` is alignment at `(0, (k c) omega)`.
#[test]
fn large_volume_is_scale_invariant() {
    let l = k3(2);
    let alpha = mv(1, 1, 0);
    let h = RationalDivisor::from_ints(&[1]);
    let cands = large_volume_candidates(&l, &h, &alpha).unwrap();
    let base = large_volume_threshold(&l, &alpha, &h, &cands).unwrap();
    assert!(base.consistent);
    let zero = RationalDivisor::zero(1);
    for c in [qi(2), q(3, 2), q(1, 3)] {
        let rep = large_volume_threshold(&l, &alpha, &h.scale(&c), &cands).unwrap();
        assert!(rep.consistent);
        let pe: BTreeMap<_, _> = base.verdicts.iter().map(|v| ((v.vi.clone(), v.vj.clone()), v.p_equal)).collect();
        for v in &rep.verdicts {
            assert_eq!(pe[&(v.vi.clone(), v.vj.clone())], v.p_equal);
            let (ki, kj) = (KCharge::new(&l, &zero, &h, &v.vi), KCharge::new(&l, &zero, &h, &v.vj));
            for (k, a) in rep.samples.iter().zip(&v.aligned) {
                let kk: Q = k * &c;
                assert_eq!(ki.at(&kk).same_ray(&kj.at(&kk)), *a);
            }
        }
    }
}

#[test]
fn literal_alpha_violates_positivity() {
    let l = k3(2);
    let h = RationalDivisor::from_ints(&[1]);
    let r = large_volume_threshold(&l, &mv(1, 0, -1), &h, &[]);
    assert!(matches!(r, Err(InvariantError::HypothesisViolated(_))));
}

#[test]
fn flagship_walls_cross_with_formal_symbols() {
    let (l, ws) = flagship();
    let opts = CrossOptions { max_len: Some(4), ..CrossOptions::default() };
    for i in [0, ws.walls.len() / 2, ws.walls.len() - 1] {
        let r = wall_cross_check(l, ws, i, None, &opts).unwrap();
        assert!(r.epsilon_invariant && r.equal, "wall {i}: {} vs {}", r.j_left, r.j_right);
    }
}

#[test]
fn chamber_constancy_near_a_point() {
    let (l, ws) = flagship();
    let alpha = &ws.alpha;
    let p0 = (q(503, 1000), q(2003, 1000));
    let p1 = (&p0.0 + q(1, 100_000), &p0.1 - q(1, 100_000));
    let it = ITable::formal(&effective_candidates(&ws.region.point(l, &p0.0, &p0.1).unwrap(), alpha).unwrap());
    let r = chamber_constancy_check(l, &ws.region, &ws.walls, &p0, &p1, alpha, &it).unwrap();
    assert!(r.constant && r.same_candidates && r.aligned_pairs_proportional);
    assert_eq!(r.j0.j.to_string(), "(q - 1)*I[1,0,-1]");
}
