use proptest::prelude::*;

use minkval::harness::{check_valuation_identity, Quadruple};
use minkval::operators::{moment_body, projection_body, Body, Sign};
use minkval::scalar::{int, signed_power, Order};
use minkval::support::SupportEval;
use minkval::{lp_combine, Polytope, Value, Vector};

fn point() -> impl Strategy<Value = Vector> {
    prop::collection::vec(-3i64..=3, 3).prop_map(|xs| Vector::from_ints(&xs))
}

fn polytope() -> impl Strategy<Value = Polytope> {
    prop::collection::vec(point(), 3..8).prop_map(|mut pts| {
        pts.push(Vector::zeros(3));
        Polytope::convex_hull(&pts).unwrap()
    })
}

fn full_polytope() -> impl Strategy<Value = Polytope> {
    polytope().prop_filter("full-dimensional", Polytope::is_full_dimensional)
}

fn direction() -> impl Strategy<Value = Vector> {
    point().prop_filter("nonzero", |v| !v.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_is_idempotent(p in polytope()) {
        let again = Polytope::convex_hull(p.vertices()).unwrap();
        prop_assert_eq!(again.vertices(), p.vertices());
    }

    #[test]
    fn support_is_sublinear(p in polytope(), x in point(), y in point(), s in 1i64..5) {
        prop_assert!(p.support(&(&x + &y)) <= p.support(&x) + p.support(&y));
        prop_assert_eq!(p.support(&x.scale(&int(s))), p.support(&x) * int(s));
    }

    #[test]
    fn area_vectors_balance(p in full_polytope()) {
        let sum = p.facet_data().iter().fold(Vector::zeros(3), |acc, f| &acc + &f.normal);
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn splits_are_consistent(p in full_polytope(), u in direction(), xs in prop::collection::vec(point(), 8)) {
        let split = p.halfspace_split(&u).unwrap();
        prop_assert_eq!(&split.positive.volume() + &split.negative.volume(), p.volume());
        for x in &xs {
            let pieces = split.positive.support(x).max(split.negative.support(x));
            prop_assert_eq!(pieces, p.support(x));
        }
        prop_assert!(Quadruple::from(&split).is_sound());
    }

    #[test]
    fn moment_and_projection_fields_are_additive(p in full_polytope(), u in direction()) {
        let split = p.halfspace_split(&u).unwrap();
        prop_assume!(!split.degenerate);
        let q = Quadruple::from(&split);
        let probes = minkval::probes::probe_set(3, 10, 1);
        let m = |k: &Polytope| moment_body(k, Order::Int(2), Sign::Plus);
        prop_assert!(check_valuation_identity(&m, &q, &probes, 0.0).unwrap().is_none());
        let pi = |k: &Polytope| Ok(Body::Field(projection_body(k)?));
        prop_assert!(check_valuation_identity(&pi, &q, &probes, 0.0).unwrap().is_none());
    }

    #[test]
    fn signed_power_is_odd(a in -50i64..50, p in 1u32..6) {
        let pos = signed_power(&int(a), Order::Int(p));
        let neg = signed_power(&int(-a), Order::Int(p));
        prop_assert_eq!(pos.neg(), neg);
        let r = Order::Real(p as f64 + 0.5);
        prop_assert!((signed_power(&int(a), r).to_f64() + signed_power(&int(-a), r).to_f64()).abs() < 1e-9);
    }

    #[test]
    fn lp_combine_matches_power_sums(p in polytope(), q in polytope(), x in point(), k in 1u32..4) {
        let (hp, hq) = (SupportEval::from_polytope(&p), SupportEval::from_polytope(&q));
        let c = lp_combine(&hp, &hq, Order::Int(k), &int(1), &int(2)).unwrap();
        let (a, b) = (p.support(&x), q.support(&x) * int(2));
        let want = Value::Exact(a).signed_pow(Order::Int(k)).add(&Value::Exact(b).signed_pow(Order::Int(k)));
        prop_assert_eq!(c.field(&x).unwrap(), want);
        let swapped = lp_combine(&hq, &hp, Order::Int(k), &int(2), &int(1)).unwrap();
        prop_assert_eq!(swapped.field(&x).unwrap(), c.field(&x).unwrap());
    }
}
