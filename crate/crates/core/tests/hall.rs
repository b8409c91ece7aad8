mod common;

use common::*;
use k3stab::arith::{q, qi, Complex, Q};
use k3stab::charge::{central_charge, StabilityPoint};
use k3stab::enumeration::Decomposition;
use k3stab::hall::*;
use k3stab::lattice::{MukaiVector, NsLattice};
use proptest::prelude::*;

fn coef() -> impl Strategy<Value = FormalPoly> {
    (-3i64..=3, -2i64..=2, prop::option::of((-1i64..=1, -1i64..=1, -2i64..=2))).prop_map(|(c, k, sym)| {
        let mut x = FormalPoly::lambda(RatFunc::q_pow(k).scale(&qi(c)));
        if let Some((r, l, s)) = sym {
            x = x.add(&FormalPoly::symbol(&mv(r, l, s)));
        }
        x
    })
}

fn element() -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec(((-2i64..=2, -2i64..=2, -3i64..=3), coef()), 0..4).prop_map(|terms| {
        terms.into_iter().fold(AlgebraElement::zero(), |acc, ((r, l, s), c)| acc.add(&AlgebraElement::basis(&mv(r, l, s), c)))
    })
}

struct Scaled<'a> {
    p: &'a StabilityPoint,
    c: Q,
}

impl ChargeEval for Scaled<'_> {
    type S = Q;
    fn z(&self, v: &MukaiVector) -> Complex<Q> {
        central_charge(self.p, v).scale(&self.c)
    }
}

fn lat() -> NsLattice {
    k3(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative(x in element(), y in element()) {
        prop_assert_eq!(x.mul(&y, &lat()), y.mul(&x, &lat()));
    }

    #[test]
    fn product_is_associative(x in element(), y in element(), z in element()) {
        let l = lat();
        prop_assert_eq!(x.mul(&y, &l).mul(&z, &l), x.mul(&y.mul(&z, &l), &l));
    }

    #[test]
    fn s_is_invariant_under_positive_scaling(
        b0 in -6i64..=6, t0 in 2i64..=9, b1 in -6i64..=6, t1 in 2i64..=9,
        parts in prop::collection::vec((-1i64..=2, -2i64..=2, -3i64..=3), 2..4),
        c0 in 1i64..=7, d0 in 1i64..=7, c1 in 1i64..=7, d1 in 1i64..=7,
    ) {
        let l = lat();
        let pt = |b: i64, t: i64| StabilityPoint::new(&l, div(&[q(b, 3)]), div(&[q(t, 3)])).unwrap();
        let (p0, p1) = (pt(b0, t0), pt(b1, t1));
        let d = Decomposition(parts.iter().map(|&(r, a, s)| mv(r, a, s)).collect());
        let plain = s_coefficient(&d, &PhaseContext::new(&p0, &p1));
        let scaled = s_coefficient(&d, &PhaseContext::new(Scaled { p: &p0, c: q(c0, d0) }, Scaled { p: &p1, c: q(c1, d1) }));
        prop_assert_eq!(plain, scaled);
    }
}

#[test]
fn log_exp_inverse_on_small_rays() {
    let nontrivial = log_exp_sweep().unwrap();
    assert!(nontrivial >= 10, "only {nontrivial} rays with several candidates");
}

#[test]
fn two_class_crossing_back_and_forth() {
    let tc = two_class();
    let classes = [tc.a1.clone(), tc.a2.clone(), tc.alpha.clone()];
    let scope = RayScope::new(&tc.sigma1, &classes, None);
    let ctx = PhaseContext::across(&tc.sigma0, &tc.sigma1, (&tc.a1, &tc.a2)).unwrap();
    let t0 = ITable::formal(&classes);
    let t1 = transform_delta_across_wall(&tc.lattice, &ctx, &scope, &t0, scope.classes()).unwrap();
    assert_ne!(t1, t0);
    let back = transform_delta_across_wall(&tc.lattice, &ctx.reversed(), &scope, &t1, scope.classes()).unwrap();
    assert_eq!(back, t0);
}

#[test]
fn value_parser_round_trip() {
    let x = parse_value("(q^2 - 1)/(q - 1)*I[1,0,-1] - 1/2*I[0,1,0]^2 + q^-1").unwrap();
    assert_eq!(parse_value(&x.to_string()).unwrap(), x);
    assert!(parse_value("1/(q - q)").is_err());
}
