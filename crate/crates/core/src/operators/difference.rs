//! Generalized difference bodies `D_{a1,a2,b1,b2}`.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::scalar::{Num, Order, Rational};
use crate::support::SupportEval;
use crate::vector::Vector;

use super::phi::{phi_reflected, phi_valuation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceParams {
    pub a1: Num,
    pub a2: Num,
    pub b1: Num,
    pub b2: Num,
}

impl DifferenceParams {
    pub fn new(a1: Rational, a2: Rational, b1: Rational, b2: Rational) -> Self {
        DifferenceParams { a1: Num(a1), a2: Num(a2), b1: Num(b1), b2: Num(b2) }
    }

    /// `a1, a2, b1, b2 >= 0`, `a1 <= a2`, `b1 <= b2`, `a2 - a1 <= b2`, `b2 - b1 <= a2`.
    pub fn validate(&self) -> Result<()> {
        let (a1, a2, b1, b2) = (&self.a1.0, &self.a2.0, &self.b1.0, &self.b2.0);
        let fail = |m: &str| Err(Error::ConstraintViolation(m.to_string()));
        if [a1, a2, b1, b2].iter().any(|v| v.is_negative()) {
            return fail("coefficients must be nonnegative");
        }
        if a1 > a2 {
            return fail("a1 <= a2");
        }
        if b1 > b2 {
            return fail("b1 <= b2");
        }
        if &(a2 - a1) > b2 {
            return fail("a2 - a1 <= b2");
        }
        if &(b2 - b1) > a2 {
            return fail("b2 - b1 <= a2");
        }
        Ok(())
    }
}

/// `h_{DP} = Φ_{1;a1,a2} P + Φ_{1;b1,b2}(-P)` for `P` in `R^3`.
pub fn difference_body(p: &Polytope, params: &DifferenceParams, checked: bool) -> Result<SupportEval> {
    if p.n() != 3 {
        return Err(Error::FamilyDimensionMismatch(format!("difference body needs n = 3, got {}", p.n())));
    }
    difference_field(p, params, checked)
}

/// The same field without the ambient-dimension restriction (used on simplices).
pub fn difference_field(p: &Polytope, params: &DifferenceParams, checked: bool) -> Result<SupportEval> {
    if checked {
        params.validate()?;
    }
    let a = phi_valuation(p, Order::Int(1), &params.a1.0, &params.a2.0)?;
    let b = phi_reflected(p, Order::Int(1), &params.b1.0, &params.b2.0)?;
    let one = Rational::from_integer(1.into());
    SupportEval::linear(vec![(one.clone(), a), (one, b)], "difference")
}

/// Vertex form of `D T` for a simplex `T = [o, v1, ..., vd]`:
/// `[a2 vi - b2 vj, a2 vi - (a2 - a1) vj, (b2 - b1) vi - b2 vj]` for `d >= 2`,
/// `[-b1 v1, a1 v1]` for `d = 1`, `{o}` for `d = 0`.
pub fn difference_body_simplex(t: &Polytope, params: &DifferenceParams, checked: bool) -> Result<Polytope> {
    if checked {
        params.validate()?;
    }
    if !t.is_simplex() || !t.has_origin_vertex() {
        return Err(Error::InvalidParameter("expected a simplex with the origin as a vertex".into()));
    }
    let n = t.n();
    let vs: Vec<&Vector> = t.vertices().iter().filter(|v| !v.is_zero()).collect();
    let (a1, a2, b1, b2) = (&params.a1.0, &params.a2.0, &params.b1.0, &params.b2.0);
    let mut pts = Vec::new();
    match vs.len() {
        0 => return Ok(Polytope::origin(n)),
        1 => {
            pts.push(vs[0].scale(&-b1.clone()));
            pts.push(vs[0].scale(a1));
        }
        _ => {
            let da = a2 - a1;
            let db = b2 - b1;
            for vi in &vs {
                for vj in &vs {
                    pts.push(&vi.scale(a2) - &vj.scale(b2));
                    pts.push(&vi.scale(a2) - &vj.scale(&da));
                    pts.push(&vi.scale(&db) - &vj.scale(b2));
                }
            }
        }
    }
    Polytope::convex_hull(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probes;
    use crate::scalar::{int, rat};
    use crate::support::subadditivity_check;

    fn params(a1: Rational, a2: Rational, b1: Rational, b2: Rational) -> DifferenceParams {
        DifferenceParams::new(a1, a2, b1, b2)
    }

    #[test]
    fn segment_form() {
        let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
        let d = difference_body_simplex(&seg, &params(int(2), int(3), int(1), int(2)), true).unwrap();
        assert_eq!(d, Polytope::convex_hull(&[Vector::from_ints(&[-1, 0, 0]), Vector::from_ints(&[2, 0, 0])]).unwrap());
    }

    #[test]
    fn symmetric_parameters_give_minkowski_sum() {
        let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        let (a, b) = (int(2), rat(1, 2));
        let d = difference_body_simplex(&t, &params(a.clone(), a.clone(), b.clone(), b.clone()), true).unwrap();
        for x in probes::probe_set(3, 20, 2) {
            assert_eq!(d.support(&x), &a * t.support(&x) + &b * t.support(&-&x));
        }
    }

    #[test]
    fn vertex_form_matches_phi_sum() {
        let p = params(int(1), int(2), int(1), int(3));
        for d in 1..=4 {
            let t = Polytope::standard_simplex(d, 4, &int(1)).unwrap();
            let body = difference_body_simplex(&t, &p, true).unwrap();
            let field = difference_field(&t, &p, true).unwrap();
            for x in probes::probe_set(4, 30, 4) {
                assert_eq!(Some(&body.support(&x)), field.field(&x).unwrap().exact(), "d = {d}, x = {x}");
            }
        }
    }

    #[test]
    fn constraints() {
        assert!(params(int(0), int(1), int(0), int(1)).validate().is_ok());
        assert!(matches!(params(int(2), int(1), int(0), int(1)).validate(), Err(Error::ConstraintViolation(_))));
        assert!(matches!(params(int(0), int(2), int(0), int(1)).validate(), Err(Error::ConstraintViolation(_))));
        let t4 = Polytope::standard_simplex(4, 4, &int(1)).unwrap();
        assert!(matches!(
            difference_body(&t4, &params(int(0), int(1), int(0), int(1)), true),
            Err(Error::FamilyDimensionMismatch(_))
        ));
    }

    #[test]
    fn valid_three_dimensional_form_is_sublinear() {
        let p = Polytope::convex_hull(&[
            Vector::from_ints(&[0, 0, 0]),
            Vector::from_ints(&[2, 0, 0]),
            Vector::from_ints(&[0, 1, 0]),
            Vector::from_ints(&[1, 1, 2]),
            Vector::from_ints(&[-1, 0, 1]),
        ])
        .unwrap();
        let h = difference_body(&p, &params(int(1), int(2), int(0), int(1)), true).unwrap();
        assert!(subadditivity_check(&h, 100, 1, 0.0).unwrap().pass);
    }
}
