//! Exact L_p Minkowski valuation operators on convex polytopes that contain the origin,
//! together with a harness that checks valuation, equivariance and subadditivity claims
//! on generated polytope families.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod operators;
pub mod polytope;
pub mod probes;
pub mod scalar;
pub mod support;
pub mod vector;

pub use error::{Error, Result};
pub use polytope::{Face, FaceLattice, FacetData, OriginPosition, Polytope, SplitCase};
pub use support::{lp_combine, EvalKind, SupportEval};
pub use scalar::{Order, Rational, Value};
pub use vector::{LinearMap, PhiKind, Transform, Vector};
