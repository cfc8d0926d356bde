//! Operator specifications: the primitive operators and the classified families
//! assembled from them.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::scalar::{Num, Order, Rational, Value};
use crate::support::{lp_combine, lp_combine_many, SupportEval};
use crate::vector::Vector;

use super::difference::{difference_body, DifferenceParams};
use super::moment::moment_field;
use super::phi::phi_valuation;
use super::projection::{asym_linf_projection, asym_lp_projection, pi_o, polar_body, projection_body};
use super::{Body, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `P -> P`
    Identity,
    Projection,
    PiO,
    AsymLp,
    AsymLinf,
    Moment,
    Phi,
    Difference,
    Polar,
    /// `c1 Π̂_∞^+ P +_∞ c2 Π̂_∞^- P`
    LinfContravariant,
    /// `a_d P +_∞ (-b_d P)` with `d = dim P`
    LinfCovariant,
    /// `c1 M_p^+ P +_p c2 M_p^- P +_p c3 P +_p c4 (-P)`
    LpCovariant,
    /// `c1 M^+ P + c2 M^- P + D_{a1,a2,b1,b2} P` in `R^3`
    CovariantDifference,
    /// `c1 ΠP + c2 Π_o P + c3 Π_o(-P)` for `p = 1`, `c1 Π̂_p^+ P +_p c2 Π̂_p^- P` for `p > 1`
    LpContravariant,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
    /// Skip parameter constraints (for negative tests).
    Unchecked,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Coefficients {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c3: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c4: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Num>>,
}

impl Coefficients {
    fn get(v: &Option<Num>) -> Rational {
        v.as_ref().map_or_else(Rational::zero, |n| n.0.clone())
    }

    pub fn c(&self) -> [Rational; 4] {
        [Self::get(&self.c1), Self::get(&self.c2), Self::get(&self.c3), Self::get(&self.c4)]
    }

    pub fn difference(&self) -> DifferenceParams {
        DifferenceParams::new(Self::get(&self.a1), Self::get(&self.a2), Self::get(&self.b1), Self::get(&self.b2))
    }
}

/// `{family, p, coefficients, mode}` with an optional `sign` for one-sided primitives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Order>,
    #[serde(default)]
    pub coefficients: Coefficients,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub sign: Sign,
}

impl OperatorSpec {
    pub fn new(family: Family) -> Self {
        OperatorSpec { family, p: None, coefficients: Coefficients::default(), mode: Mode::Exact, sign: Sign::Plus }
    }

    pub fn with_p(mut self, p: Order) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_coefficients(mut self, c: Coefficients) -> Self {
        self.coefficients = c;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Order of the operator's valuation property (`inf` for the hull-type families).
    pub fn order(&self) -> Order {
        match self.family {
            Family::AsymLinf | Family::Polar | Family::LinfContravariant | Family::LinfCovariant => Order::Infinity,
            _ => self.p.unwrap_or(Order::Int(1)),
        }
    }

    fn checked(&self) -> bool {
        self.mode != Mode::Unchecked
    }
}

fn nonnegative(cs: &[&Rational], what: &str) -> Result<()> {
    if cs.iter().any(|c| c.is_negative()) {
        return Err(Error::ConstraintViolation(format!("{what} must be nonnegative")));
    }
    Ok(())
}

fn monotone(v: &[Num], what: &str) -> Result<()> {
    if v.iter().any(|x| x.0.is_negative()) || v.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(Error::ConstraintViolation(format!("{what} must satisfy 0 <= {what}_1 <= ... <= {what}_n")));
    }
    Ok(())
}

fn require_ambient_at_least(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::FamilyDimensionMismatch(format!("{what} needs n >= {min}, got {n}")));
    }
    Ok(())
}

fn finite_order(spec: &OperatorSpec) -> Result<Order> {
    match spec.p.unwrap_or(Order::Int(1)) {
        Order::Infinity => Err(Error::InvalidParameter(format!("{:?} needs a finite p", spec.family))),
        p => Ok(p),
    }
}

/// Polytope `[c1 K_1, ..., c_k K_k]` (the L_∞ combination of explicit polytopes).
fn hull_combination(terms: &[(Rational, Polytope)], n: usize) -> Result<Polytope> {
    let mut pts = vec![Vector::zeros(n)];
    for (c, p) in terms {
        if !c.is_zero() {
            pts.extend(p.vertices().iter().map(|v| v.scale(c)));
        }
    }
    Polytope::convex_hull(&pts)
}

fn to_float(f: SupportEval) -> SupportEval {
    let inner = f.clone();
    SupportEval::new(f.kind(), f.n(), f.order(), f.label().to_string(), move |x| {
        Ok(Value::Approx(inner.field(x)?.to_f64()))
    })
}

/// Applies the operator described by `spec` to `P`.
pub fn classified_operator(spec: &OperatorSpec, p: &Polytope) -> Result<Body> {
    let body = apply(spec, p)?;
    Ok(match (spec.mode, body) {
        (Mode::Float, Body::Field(f)) => Body::Field(to_float(f)),
        (_, b) => b,
    })
}

fn apply(spec: &OperatorSpec, p: &Polytope) -> Result<Body> {
    let n = p.n();
    let co = &spec.coefficients;
    let checked = spec.checked();
    let one = Rational::from_integer(1.into());
    match spec.family {
        Family::Identity => Ok(Body::Polytope(p.clone())),
        Family::Projection => Ok(Body::Field(projection_body(p)?)),
        Family::PiO => Ok(Body::Field(pi_o(p)?)),
        Family::AsymLp => Ok(Body::Field(asym_lp_projection(p, finite_order(spec)?, spec.sign)?)),
        Family::AsymLinf => Ok(Body::Polytope(asym_linf_projection(p, spec.sign)?)),
        Family::Moment => match spec.p.unwrap_or(Order::Int(1)) {
            Order::Infinity => super::moment::moment_body(p, Order::Infinity, spec.sign),
            q => Ok(Body::Field(moment_field(p, q, spec.sign)?)),
        },
        Family::Phi => {
            let q = finite_order(spec)?;
            let f = phi_valuation(p, q, &Coefficients::get(&co.a1), &Coefficients::get(&co.a2))?;
            Ok(Body::Field(if spec.sign == Sign::Minus { f.reflect() } else { f }))
        }
        Family::Difference => Ok(Body::Field(difference_body(p, &co.difference(), checked)?)),
        Family::Polar => Ok(Body::Polytope(polar_body(p)?)),
        Family::LinfContravariant => {
            require_ambient_at_least(n, 3, "the L_inf contravariant family")?;
            let [c1, c2, ..] = co.c();
            if checked {
                nonnegative(&[&c1, &c2], "c1, c2")?;
            }
            Ok(Body::Polytope(hull_combination(
                &[(c1, asym_linf_projection(p, Sign::Plus)?), (c2, asym_linf_projection(p, Sign::Minus)?)],
                n,
            )?))
        }
        Family::LinfCovariant => {
            require_ambient_at_least(n, 3, "the L_inf covariant family")?;
            let a = co.a.clone().unwrap_or_default();
            let b = co.b.clone().unwrap_or_default();
            if a.len() != n || b.len() != n {
                return Err(Error::InvalidParameter(format!("a and b need {n} entries")));
            }
            if checked {
                monotone(&a, "a")?;
                monotone(&b, "b")?;
            }
            let d = p.dim();
            if d == 0 {
                return Ok(Body::Polytope(Polytope::origin(n)));
            }
            Ok(Body::Polytope(hull_combination(&[(a[d - 1].0.clone(), p.clone()), (b[d - 1].0.clone(), p.neg())], n)?))
        }
        Family::LpCovariant => {
            let q = finite_order(spec)?;
            require_ambient_at_least(n, if q == Order::Int(1) { 4 } else { 3 }, "the L_p covariant family")?;
            let [c1, c2, c3, c4] = co.c();
            if checked {
                nonnegative(&[&c1, &c2, &c3, &c4], "c1..c4")?;
            }
            let id = SupportEval::from_polytope(p);
            let terms = vec![
                (c1, moment_field(p, q, Sign::Plus)?),
                (c2, moment_field(p, q, Sign::Minus)?),
                (c3, id.clone()),
                (c4, id.reflect()),
            ];
            Ok(Body::Field(lp_combine_many(&terms, q)?.with_label("lp-covariant")))
        }
        Family::CovariantDifference => {
            let [c1, c2, ..] = co.c();
            if checked {
                nonnegative(&[&c1, &c2], "c1, c2")?;
            }
            let d = difference_body(p, &co.difference(), checked)?;
            let terms = vec![
                (c1, moment_field(p, Order::Int(1), Sign::Plus)?),
                (c2, moment_field(p, Order::Int(1), Sign::Minus)?),
                (one, d),
            ];
            Ok(Body::Field(SupportEval::linear(terms, "covariant-difference")?))
        }
        Family::LpContravariant => {
            require_ambient_at_least(n, 3, "the L_p contravariant family")?;
            let q = finite_order(spec)?;
            let [c1, c2, c3, _] = co.c();
            if q == Order::Int(1) {
                if checked {
                    if c1.is_negative() {
                        return Err(Error::ConstraintViolation("c1 >= 0".into()));
                    }
                    if (&c1 + &c2 + &c3).is_negative() {
                        return Err(Error::ConstraintViolation("c1 + c2 + c3 >= 0".into()));
                    }
                }
                let terms = vec![(c1, projection_body(p)?), (c2, pi_o(p)?), (c3, pi_o(&p.neg())?)];
                Ok(Body::Field(SupportEval::linear(terms, "lp-contravariant")?))
            } else {
                if checked {
                    nonnegative(&[&c1, &c2], "c1, c2")?;
                }
                let plus = asym_lp_projection(p, q, Sign::Plus)?;
                let minus = asym_lp_projection(p, q, Sign::Minus)?;
                Ok(Body::Field(lp_combine(&plus, &minus, q, &c1, &c2)?.with_label("lp-contravariant")))
            }
        }
    }
}
