//! The face-lattice valuation `Φ_{p;a1,a2}`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polytope::{Polytope, VertexSet};
use crate::scalar::{Order, Rational, Value};
use crate::support::{EvalKind, SupportEval};
use crate::vector::Vector;

fn max_over(dots: &[Rational], mask: VertexSet) -> Rational {
    (0..dots.len()).filter(|i| mask >> i & 1 == 1).map(|i| &dots[i]).max().cloned().unwrap_or_default()
}

/// `Φ_{p;a1,a2} P = c h_P^p + (a2 - a1) Σ_{1 <= j < dim P} (-1)^j Σ_{F ∈ F_{j,o}(P)} h_F^p`
/// with `c = a1` for odd `dim P` and `c = 2 a2 - a1` for even `dim P`; `Φ{o} = 0`.
pub fn phi_valuation(p: &Polytope, order: Order, a1: &Rational, a2: &Rational) -> Result<SupportEval> {
    let n = p.n();
    let d = p.dim();
    let label = format!("phi[{order};{a1},{a2}]");
    if d == 0 {
        return Ok(SupportEval::zero(n, order).with_label(label));
    }
    let lead = if d % 2 == 1 { a1.clone() } else { Rational::from_integer(2.into()) * a2 - a1 };
    let diff = a2 - a1;
    let mut faces: Vec<(bool, VertexSet)> = Vec::new();
    for j in 1..d {
        for f in p.faces_through_origin(j) {
            faces.push((j % 2 == 1, f.mask));
        }
    }
    let q = p.clone();
    Ok(SupportEval::new(EvalKind::FaceLatticeSum, n, order, label, move |x| {
        let dots = q.vertex_dots(x);
        let all = dots.iter().max().cloned().unwrap_or_default();
        let mut acc = Value::Exact(all).signed_pow(order).mul(&Value::Exact(lead.clone()));
        if !diff.is_zero() {
            let mut sum = Value::zero();
            for (odd, mask) in &faces {
                let h = Value::Exact(max_over(&dots, *mask)).signed_pow(order);
                sum = if *odd { sum.sub(&h) } else { sum.add(&h) };
            }
            acc = acc.add(&sum.scale(&diff));
        }
        Ok(acc)
    }))
}

/// `Φ_{p;b1,b2}(-P)`, evaluated as `x -> Φ_{p;b1,b2}(P)(-x)`.
pub fn phi_reflected(p: &Polytope, order: Order, b1: &Rational, b2: &Rational) -> Result<SupportEval> {
    Ok(phi_valuation(p, order, b1, b2)?.reflect())
}

/// Both Φ-values on the simplex `[v0, e1, ..., ed]` in closed form.
///
/// `v0` must satisfy `o ∈ relint [v0, e1, ..., em]`, i.e. `v0 = o` for `m = 0` and
/// `v0 = -Σ_{i<=m} t_i e_i` with all `t_i > 0` otherwise; `0 <= m < d <= n`.
/// Returns `(Φ_{p;a1,a2}(T)(x), Φ_{p;b1,b2}(-T)(x))`.
#[allow(clippy::too_many_arguments)]
pub fn phi_simplex_closed_form(
    v0: &Vector,
    d: usize,
    m: usize,
    x: &Vector,
    order: Order,
    a: (&Rational, &Rational),
    b: (&Rational, &Rational),
) -> Result<(Value, Value)> {
    let n = x.dim();
    v0.check_dim(n)?;
    if d == 0 || d > n {
        return Err(Error::DimensionOutOfRange { dim: d, ambient: n });
    }
    if m >= d {
        return Err(Error::InvalidParameter(format!("need m < d, got m = {m}, d = {d}")));
    }
    let ok = (0..n).all(|i| if i < m { v0[i].is_negative() } else { v0[i].is_zero() });
    if !ok {
        return Err(Error::OriginConditionViolated);
    }
    let pw = |t: &Rational| Value::Exact(t.clone()).signed_pow(order);
    let vx = v0.dot(x);
    let head: Vec<&Rational> = std::iter::once(&vx).chain((0..m).map(|i| &x[i])).collect();
    let tail: Vec<&Rational> = (m..d).map(|i| &x[i]).collect();
    let alpha1 = pw(head.iter().max().unwrap());
    let alpha2 = pw(head.iter().min().unwrap());
    let beta1 = pw(tail.iter().max().unwrap());
    let beta2 = pw(tail.iter().min().unwrap());
    let sign = |k: usize| if k.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let (a1, a2) = a;
    let (b1, b2) = b;
    let da = a2 - a1;
    let db = b2 - b1;
    let phi_a = alpha1
        .max(&beta1)
        .scale(a2)
        .add(&alpha1.max(&beta2).scale(&(&da * sign(m + 1))))
        .add(&alpha1.scale(&(&da * sign(m))));
    let (na2, nb1, nb2) = (alpha2.neg(), beta1.neg(), beta2.neg());
    let phi_b = na2
        .max(&nb2)
        .scale(b2)
        .add(&na2.max(&nb1).scale(&(&db * sign(m + 1))))
        .add(&na2.scale(&(&db * sign(m))));
    Ok((phi_a, phi_b))
}

/// `[v0, e1, ..., ed]` in `R^n`.
pub fn phi_simplex(v0: &Vector, d: usize) -> Result<Polytope> {
    let n = v0.dim();
    let mut pts = vec![v0.clone()];
    pts.extend((0..d).map(|i| Vector::unit(n, i)));
    Polytope::convex_hull(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probes;
    use crate::scalar::int;

    fn ex(v: Value) -> Rational {
        v.exact().unwrap().clone()
    }

    #[test]
    fn standard_simplex_form() {
        let (a1, a2) = (int(2), int(5));
        for d in 1..=4 {
            let t = Polytope::standard_simplex(d, 4, &int(1)).unwrap();
            let phi = phi_valuation(&t, Order::Int(1), &a1, &a2).unwrap();
            for x in probes::probe_set(4, 20, 9) {
                let b1 = (0..d).map(|i| x[i].clone()).max().unwrap();
                let b2 = (0..d).map(|i| x[i].clone()).min().unwrap();
                let expect = &a2 * b1.max(Rational::zero()) - (&a2 - &a1) * b2.max(Rational::zero());
                assert_eq!(ex(phi.field(&x).unwrap()), expect, "d = {d}, x = {x}");
            }
        }
    }

    #[test]
    fn value_at_first_unit_vector() {
        let (a1, a2, b1, b2) = (int(1), int(3), int(2), int(4));
        for d in 1..=4 {
            let t = Polytope::standard_simplex(d, 4, &int(1)).unwrap();
            let e1 = Vector::unit(4, 0);
            let s = ex(phi_valuation(&t, Order::Int(2), &a1, &a2).unwrap().field(&e1).unwrap())
                + ex(phi_reflected(&t, Order::Int(2), &b1, &b2).unwrap().field(&e1).unwrap());
            assert_eq!(s, if d == 1 { a1.clone() } else { a2.clone() });
            let minus = -&e1;
            let s = ex(phi_valuation(&t, Order::Int(2), &a1, &a2).unwrap().field(&minus).unwrap())
                + ex(phi_reflected(&t, Order::Int(2), &b1, &b2).unwrap().field(&minus).unwrap());
            assert_eq!(s, if d == 1 { b1.clone() } else { b2.clone() });
        }
    }

    #[test]
    fn origin_has_zero_phi() {
        let phi = phi_valuation(&Polytope::origin(3), Order::Int(1), &int(1), &int(2)).unwrap();
        assert_eq!(ex(phi.field(&Vector::from_ints(&[1, 2, 3])).unwrap()), int(0));
    }

    #[test]
    fn closed_form_spot_values() {
        let v0 = Vector::from_ints(&[-1, 0, 0, 0]);
        let (a1, a2, b1, b2) = (int(0), int(1), int(0), int(0));
        let x = Vector::from_ints(&[2, 6, 5, 5]);
        let (pa, pb) = phi_simplex_closed_form(&v0, 4, 1, &x, Order::Int(1), (&a1, &a2), (&b1, &b2)).unwrap();
        assert_eq!(ex(pa) + ex(pb), int(9));
        let t = phi_simplex(&v0, 4).unwrap();
        let direct = phi_valuation(&t, Order::Int(1), &a1, &a2).unwrap();
        assert_eq!(ex(direct.field(&x).unwrap()), int(9));
    }

    #[test]
    fn closed_form_rejects_bad_apex() {
        let x = Vector::from_ints(&[1, 1, 1]);
        let one = int(1);
        let err = phi_simplex_closed_form(&Vector::from_ints(&[1, 0, 0]), 3, 1, &x, Order::Int(1), (&one, &one), (&one, &one));
        assert_eq!(err.unwrap_err(), Error::OriginConditionViolated);
        let err = phi_simplex_closed_form(&Vector::from_ints(&[-1, 1, 0]), 3, 1, &x, Order::Int(1), (&one, &one), (&one, &one));
        assert_eq!(err.unwrap_err(), Error::OriginConditionViolated);
    }
}
