use minkval::operators::{
    asym_linf_projection, asym_lp_projection, classified_operator, difference_body_simplex, moment_body, phi_reflected,
    phi_valuation, pi_o, polar_body, projection_body, radial_function, Coefficients, DifferenceParams, Family, OperatorSpec,
    Sign,
};
use minkval::probes::probe_set;
use minkval::scalar::{int, rat, Num, Order};
use minkval::support::SupportEval;
use minkval::{lp_combine, Polytope, Value, Vector};

fn v(xs: &[i64]) -> Vector {
    Vector::from_ints(xs)
}

fn cube(lo: i64, hi: i64, n: usize) -> Polytope {
    Polytope::cuboid(&vec![(int(lo), int(hi)); n]).unwrap()
}

fn exact(q: minkval::Rational) -> Value {
    Value::Exact(q)
}

fn some(q: minkval::Rational) -> Option<Num> {
    Some(Num(q))
}

#[test]
fn projection_body_of_the_unit_cube() {
    let c = cube(0, 1, 3);
    let pi = projection_body(&c).unwrap();
    let box_ = cube(-1, 1, 3);
    for x in probe_set(3, 40, 3) {
        assert_eq!(pi.eval(&x).unwrap(), exact(box_.support(&x)));
        let neg: minkval::Rational = x.coords().iter().map(|t| if *t < int(0) { -t } else { int(0) }).sum();
        assert_eq!(pi_o(&c).unwrap().eval(&x).unwrap(), exact(neg));
    }
}

#[test]
fn asym_l1_projection_examples() {
    let c = cube(0, 1, 3);
    let plus = asym_lp_projection(&c, Order::Int(1), Sign::Plus).unwrap();
    for x in probe_set(3, 20, 4) {
        assert_eq!(plus.eval(&x).unwrap(), exact(c.support(&x)));
    }
    let t2 = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
    let seg = Polytope::convex_hull(&[v(&[0, 0]), v(&[1, 1])]).unwrap();
    let h = asym_lp_projection(&t2, Order::Int(1), Sign::Plus).unwrap();
    for x in probe_set(2, 20, 5) {
        assert_eq!(h.eval(&x).unwrap(), exact(seg.support(&x)));
    }
}

#[test]
fn asym_linf_projection_examples() {
    for n in [2, 3, 4] {
        let t = Polytope::standard_simplex(n, n, &int(1)).unwrap();
        let want = Polytope::convex_hull(&[Vector::zeros(n), Vector(vec![int(1); n])]).unwrap();
        assert_eq!(asym_linf_projection(&t, Sign::Plus).unwrap().vertices(), want.vertices());
    }
    let cross: Vec<Vector> = (0..3).flat_map(|i| [Vector::unit(3, i), -&Vector::unit(3, i)]).collect();
    let want = Polytope::convex_hull(&cross).unwrap();
    let c = cube(-1, 1, 3);
    assert_eq!(asym_linf_projection(&c, Sign::Plus).unwrap().vertices(), want.vertices());
    assert_eq!(polar_body(&c).unwrap().vertices(), want.vertices());
    let flat = Polytope::standard_simplex(2, 3, &int(1)).unwrap();
    assert_eq!(asym_linf_projection(&flat, Sign::Plus).unwrap().vertices(), Polytope::origin(3).vertices());
}

#[test]
fn radial_function_of_the_triangle() {
    let t2 = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
    assert_eq!(radial_function(&t2, &v(&[1, 1])).unwrap(), rat(1, 2));
    let c = Polytope::cuboid(&[(int(-1), int(2)), (int(-1), int(1))]).unwrap();
    let polar = polar_body(&c).unwrap();
    for x in probe_set(2, 30, 6) {
        assert_eq!(&polar.support(&x) * radial_function(&c, &x).unwrap(), int(1));
    }
}

#[test]
fn first_moment_of_the_triangle() {
    let t2 = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
    let m = moment_body(&t2, Order::Int(1), Sign::Plus).unwrap();
    assert_eq!(m.eval(&v(&[1, 0])).unwrap(), exact(rat(1, 6)));
    let sq = cube(-1, 1, 2);
    let m = moment_body(&sq, Order::Int(1), Sign::Plus).unwrap();
    assert_eq!(m.eval(&v(&[1, 0])).unwrap(), exact(int(1)));
}

#[test]
fn phi_counterexample_values() {
    let mut pts = vec![-&Vector::unit(4, 0)];
    pts.extend((0..4).map(|i| Vector::unit(4, i)));
    let p = Polytope::convex_hull(&pts).unwrap();
    let (a1, a2, b1, b2) = (int(1), int(3), int(2), int(5));
    let h = |x: &[i64]| {
        let x = v(x);
        let a = phi_valuation(&p, Order::Int(1), &a1, &a2).unwrap().field(&x).unwrap();
        let b = phi_reflected(&p, Order::Int(1), &b1, &b2).unwrap().field(&x).unwrap();
        a.add(&b)
    };
    let d = &a2 - &a1;
    // 3 a2 + 2 (a2 - a1) - (a2 - a1) + b2
    assert_eq!(h(&[1, 3, 3, 2]), exact(&a2 * int(3) + &d * int(2) - &d + &b2));
    // 6 a2 + 5 (a2 - a1) - 2 (a2 - a1) + 2 b2
    assert_eq!(h(&[2, 6, 5, 5]), exact(&a2 * int(6) + &d * int(5) - &d * int(2) + &b2 * int(2)));
}

#[test]
fn difference_body_on_segments_and_symmetric_weights() {
    let params = DifferenceParams::new(int(2), int(2), int(1), int(1));
    let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
    let d = difference_body_simplex(&seg, &params, true).unwrap();
    let want = Polytope::convex_hull(&[v(&[-1, 0, 0]), v(&[2, 0, 0])]).unwrap();
    assert_eq!(d.vertices(), want.vertices());
    let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
    let d = difference_body_simplex(&t, &params, true).unwrap();
    for x in probe_set(3, 40, 7) {
        assert_eq!(d.support(&x), int(2) * t.support(&x) + t.neg().support(&x));
    }
}

#[test]
fn classified_builders() {
    for n in [3, 4] {
        let t = Polytope::standard_simplex(n, n, &int(1)).unwrap();
        let c = Coefficients { c1: some(int(1)), c2: some(int(0)), ..Default::default() };
        let body = classified_operator(&OperatorSpec::new(Family::LinfContravariant).with_coefficients(c), &t).unwrap();
        let want = Polytope::convex_hull(&[Vector::zeros(n), Vector(vec![int(1); n])]).unwrap();
        assert_eq!(body.as_polytope().unwrap().vertices(), want.vertices());
    }
    let c3 = cube(-1, 2, 3);
    let c = Coefficients { c1: some(int(0)), c2: some(int(0)), c3: some(int(1)), c4: some(int(1)), ..Default::default() };
    let spec = OperatorSpec::new(Family::LpCovariant).with_p(Order::Int(2)).with_coefficients(c);
    let body = classified_operator(&spec, &c3).unwrap();
    for x in probe_set(3, 30, 8) {
        let (hp, hm) = (c3.support(&x), c3.neg().support(&x));
        assert_eq!(body.power(&x, Order::Int(2)).unwrap(), exact(&hp * &hp + &hm * &hm));
    }
}

#[test]
fn lp_combine_examples() {
    let seg = |k: i64| SupportEval::from_polytope(&Polytope::convex_hull(&[v(&[0]), v(&[k])]).unwrap());
    let sum = lp_combine(&seg(1), &seg(1), Order::Int(1), &int(1), &int(1)).unwrap();
    assert_eq!(sum.eval(&v(&[1])).unwrap(), exact(int(2)));
    let pyth = lp_combine(&seg(3), &seg(4), Order::Int(2), &int(1), &int(1)).unwrap();
    assert_eq!(pyth.eval(&v(&[1])).unwrap(), exact(int(5)));
    let hull = lp_combine(&seg(3), &seg(4), Order::Infinity, &int(1), &int(1)).unwrap();
    assert_eq!(hull.eval(&v(&[1])).unwrap(), exact(int(4)));
}

#[test]
fn signed_power_examples() {
    use minkval::scalar::signed_power;
    assert_eq!(signed_power(&int(-2), Order::Int(3)), exact(int(-8)));
    assert!((signed_power(&int(-4), Order::Real(0.5)).to_f64() + 2.0).abs() < 1e-12);
    assert_eq!(signed_power(&int(0), Order::Int(5)).to_f64(), 0.0);
}
