//! Pointwise checks on operators: valuation identity, SL(n) equivariance, projection
//! property and the sublinearity counterexample.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{phi_valuation, Body};
use crate::polytope::Polytope;
use crate::scalar::{int, Order, Value};
use crate::support::subadditivity_at;
use crate::vector::{LinearMap, Vector};

use super::generators::Quadruple;

/// A probe direction where two sides of an identity disagree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub direction: Vector,
    pub values: Vec<String>,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub key: String,
    pub pass: bool,
    pub expected_pass: bool,
    pub probes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseResult {
    pub fn new(key: impl Into<String>, expected_pass: bool) -> Self {
        CaseResult { key: key.into(), pass: true, expected_pass, probes: 0, witness: None, note: None }
    }

    pub fn as_expected(&self) -> bool {
        self.pass == self.expected_pass
    }

    /// Folds a sub-check into this case, keeping the first witness.
    pub fn absorb(&mut self, probes: usize, witness: Option<Witness>) {
        self.probes += probes;
        if witness.is_some() {
            self.pass = false;
            if self.witness.is_none() {
                self.witness = witness;
            }
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn fail(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        self.note = Some(note.into());
        self
    }
}

/// Operator under test.
pub type Operator<'a> = dyn Fn(&Polytope) -> Result<Body> + Send + Sync + 'a;

/// Natural field of a body: `h` for polytopes, `h^p` for fields of order `p`.
pub fn natural_field(body: &Body, x: &Vector) -> Result<Value> {
    match body {
        Body::Polytope(p) => Ok(Value::Exact(p.support_checked(x)?)),
        Body::Field(f) => f.field(x),
    }
}

fn is_hull_type(bodies: &[&Body]) -> bool {
    bodies.iter().all(|b| matches!(b, Body::Polytope(_)))
}

/// `Z(K ∪ L) + Z(K ∩ L) = Z K + Z L` on the fields (or with `∨` for polytope results).
pub fn check_valuation_identity(op: &Operator<'_>, q: &Quadruple, probes: &[Vector], tol: f64) -> Result<Option<Witness>> {
    let bu = op(&q.union)?;
    let bi = op(&q.inter)?;
    let bk = op(&q.k)?;
    let bl = op(&q.l)?;
    let hull = is_hull_type(&[&bu, &bi, &bk, &bl]);
    for x in probes {
        let (u, i, k, l) = (natural_field(&bu, x)?, natural_field(&bi, x)?, natural_field(&bk, x)?, natural_field(&bl, x)?);
        let (lhs, rhs) = if hull { (u.max(&i), k.max(&l)) } else { (u.add(&i), k.add(&l)) };
        if !lhs.approx_eq_tol(&rhs, tol) {
            return Ok(Some(Witness {
                direction: x.clone(),
                values: vec![lhs.to_string(), rhs.to_string()],
                discrepancy: lhs.discrepancy(&rhs),
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Covariant: `h_{Z(φP)}(x) = h_{ZP}(φ^t x)`; contravariant: `h_{Z(φP)}(x) = h_{ZP}(φ^{-1} x)`.
pub fn check_equivariance(
    op: &Operator<'_>,
    variance: Variance,
    map: &LinearMap,
    p: &Polytope,
    probes: &[Vector],
    tol: f64,
) -> Result<Option<Witness>> {
    if !map.is_sl() {
        return Err(Error::NotSpecialLinear(map.det().to_string()));
    }
    let pulled = match variance {
        Variance::Covariant => map.transpose(),
        Variance::Contravariant => map.inverse()?,
    };
    let image = op(&p.apply_linear(map)?)?;
    let base = op(p)?;
    for x in probes {
        let lhs = natural_field(&image, x)?;
        let rhs = natural_field(&base, &pulled.apply(x))?;
        if !lhs.approx_eq_tol(&rhs, tol) {
            return Ok(Some(Witness {
                direction: x.clone(),
                values: vec![lhs.to_string(), rhs.to_string()],
                discrepancy: lhs.discrepancy(&rhs),
            }));
        }
    }
    Ok(None)
}

/// `h_{ZP}(x) = h_{ZP}(x|P)` for covariant `Z`.
pub fn check_projection_property(op: &Operator<'_>, p: &Polytope, probes: &[Vector], tol: f64) -> Result<Option<Witness>> {
    let body = op(p)?;
    for x in probes {
        let lhs = natural_field(&body, x)?;
        let rhs = natural_field(&body, &p.project_vector(x)?)?;
        if !lhs.approx_eq_tol(&rhs, tol) {
            return Ok(Some(Witness {
                direction: x.clone(),
                values: vec![lhs.to_string(), rhs.to_string()],
                discrepancy: lhs.discrepancy(&rhs),
            }));
        }
    }
    Ok(None)
}

/// Values of `h = Φ_{1;0,1} P` on `P = [-e1, e1, e2, e3, e4]` at the two special directions
/// and their sum.
#[derive(Clone, Debug, Serialize)]
pub struct SublinearityCounterexample {
    pub polytope: Vec<Vector>,
    pub x: Vector,
    pub y: Vector,
    pub hx: Value,
    pub hy: Value,
    pub hxy: Value,
    /// `h(x + y) - h(x) - h(y)`.
    pub margin: Value,
    pub subadditive: bool,
}

pub fn sublinearity_counterexample() -> Result<SublinearityCounterexample> {
    let mut pts = vec![-&Vector::unit(4, 0)];
    pts.extend((0..4).map(|i| Vector::unit(4, i)));
    let p = Polytope::convex_hull(&pts)?;
    let h = phi_valuation(&p, Order::Int(1), &int(0), &int(1))?;
    let x = Vector::from_ints(&[1, 3, 3, 2]);
    let y = Vector::from_ints(&[1, 3, 2, 3]);
    let (hx, hy, hxy) = (h.field(&x)?, h.field(&y)?, h.field(&(&x + &y))?);
    let margin = hxy.sub(&hx.add(&hy));
    let subadditive = subadditivity_at(&h, &x, &y, 0.0)?.is_none();
    Ok(SublinearityCounterexample { polytope: p.vertices().to_vec(), x, y, hx, hy, hxy, margin, subadditive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::generate_simplex_splits;
    use crate::operators::{moment_body, projection_body, Sign};
    use crate::probes;
    use crate::scalar::rat;

    #[test]
    fn counterexample_values() {
        let c = sublinearity_counterexample().unwrap();
        assert_eq!(c.hx, Value::Exact(int(4)));
        assert_eq!(c.hy, Value::Exact(int(4)));
        assert_eq!(c.hxy, Value::Exact(int(9)));
        assert_eq!(c.margin, Value::Exact(int(1)));
        assert!(!c.subadditive);
    }

    #[test]
    fn projection_body_is_a_valuation_on_splits() {
        let op = |p: &Polytope| Ok(Body::Field(projection_body(p)?));
        for c in generate_simplex_splits(3, 3, &[rat(1, 3)], &[int(1)]).unwrap() {
            let w = check_valuation_identity(&op, &c.quadruple(), &probes::probe_set(3, 20, 1), 1e-9).unwrap();
            assert!(w.is_none(), "{w:?}");
        }
    }

    #[test]
    fn identity_fails_for_a_non_valuation() {
        // P on full-dimensional input, 3P otherwise: not a valuation
        let op = |p: &Polytope| {
            Ok(Body::Polytope(if p.is_full_dimensional() { p.clone() } else { p.scale(&int(3))? }))
        };
        let c = &generate_simplex_splits(3, 3, &[rat(1, 2)], &[int(1)]).unwrap()[0];
        assert!(check_valuation_identity(&op, &c.quadruple(), &probes::probe_set(3, 0, 0), 1e-9).unwrap().is_some());
    }

    #[test]
    fn moment_covariance_and_projection_property() {
        let op = |p: &Polytope| moment_body(p, Order::Int(2), Sign::Plus);
        let t = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        let m = LinearMap::from_ints(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 2, 1]]).unwrap();
        let pr = probes::probe_set(3, 10, 2);
        assert!(check_equivariance(&op, Variance::Covariant, &m, &t, &pr, 1e-9).unwrap().is_none());
        assert!(check_equivariance(&op, Variance::Contravariant, &m, &t, &pr, 1e-9).unwrap().is_some());
        let bad = LinearMap::from_ints(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(matches!(
            check_equivariance(&op, Variance::Covariant, &bad, &t, &pr, 1e-9),
            Err(Error::NotSpecialLinear(_))
        ));
        let low = Polytope::standard_simplex(2, 3, &int(1)).unwrap();
        let pi = |p: &Polytope| Ok(Body::Field(projection_body(p)?));
        assert!(check_projection_property(&pi, &low, &pr, 1e-9).unwrap().is_some());
        let phi = |p: &Polytope| Ok(Body::Field(phi_valuation(p, Order::Int(1), &int(1), &int(2))?));
        assert!(check_projection_property(&phi, &low, &pr, 1e-9).unwrap().is_none());
    }
}
