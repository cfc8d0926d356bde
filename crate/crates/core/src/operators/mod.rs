//! Valuation operators from polytopes to bodies or p-homogeneous fields.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::polytope::Polytope;
use crate::scalar::{Order, Value};
use crate::support::SupportEval;
use crate::vector::Vector;

pub mod classified;
pub mod difference;
pub mod moment;
pub mod phi;
pub mod projection;

pub use classified::{classified_operator, Coefficients, Family, Mode, OperatorSpec};
pub use difference::{difference_body, difference_body_simplex, DifferenceParams};
pub use moment::{moment_body, moment_field, moment_power, moment_power_by_split, moment_power_monte_carlo};
pub use phi::{phi_reflected, phi_simplex, phi_simplex_closed_form, phi_valuation};
pub use projection::{asym_linf_projection, asym_lp_projection, pi_o, polar_body, projection_body, radial_function};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Result of an operator: an explicit polytope or a field given by evaluation.
#[derive(Clone, Debug)]
pub enum Body {
    Polytope(Polytope),
    Field(SupportEval),
}

impl Body {
    pub fn n(&self) -> usize {
        match self {
            Body::Polytope(p) => p.n(),
            Body::Field(f) => f.n(),
        }
    }

    /// Order of the natural field (`inf` for polytopes, whose field is `h`).
    pub fn order(&self) -> Order {
        match self {
            Body::Polytope(_) => Order::Infinity,
            Body::Field(f) => f.order(),
        }
    }

    pub fn support_eval(&self) -> SupportEval {
        match self {
            Body::Polytope(p) => SupportEval::from_polytope(p),
            Body::Field(f) => f.clone(),
        }
    }

    /// Support value `h(x)`.
    pub fn eval(&self, x: &Vector) -> Result<Value> {
        match self {
            Body::Polytope(p) => Ok(Value::Exact(p.support_checked(x)?)),
            Body::Field(f) => f.eval(x),
        }
    }

    /// `h(x)^p`, or `h(x)` for `p = inf`.
    pub fn power(&self, x: &Vector, p: Order) -> Result<Value> {
        match self {
            Body::Polytope(poly) => Ok(Value::Exact(poly.support_checked(x)?).signed_pow(p)),
            Body::Field(f) => f.power(x, p),
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Body::Polytope(p) => Some(p),
            Body::Field(_) => None,
        }
    }
}
