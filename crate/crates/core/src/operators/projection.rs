//! Contravariant operators built from facet data: the projection body, `Π_o`, the
//! asymmetric L_p and L_∞ projection bodies, plus the polar body and radial function.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polytope::{OriginPosition, Polytope};
use crate::scalar::{pow_int, to_f64, Order, Rational, Value};
use crate::support::{EvalKind, SupportEval};
use crate::vector::Vector;

use super::Sign;

/// `h_{ΠP}(x) = 1/2 Σ |x . a_i|` over the area vectors `a_i` of the facets.
///
/// For `dim P = n - 1` the surface measure is `vol(P)(δ_u + δ_{-u})`, so the body is the
/// segment with `h(x) = |x . vol(P) u|`; for smaller dimension it is `{o}`.
pub fn projection_body(p: &Polytope) -> Result<SupportEval> {
    let n = p.n();
    if p.is_full_dimensional() {
        let normals: Vec<Vector> = p.facet_data().iter().map(|f| f.normal.clone()).collect();
        let half = Rational::new(1.into(), 2.into());
        return Ok(SupportEval::new(EvalKind::FacetSum, n, Order::Int(1), "projection", move |x| {
            let s = normals.iter().fold(Rational::zero(), |acc, a| acc + a.dot(x).abs());
            Ok(Value::Exact(s * &half))
        }));
    }
    match p.hyperplane_area_vector() {
        Some(a) => Ok(SupportEval::new(EvalKind::FacetSum, n, Order::Int(1), "projection", move |x| {
            Ok(Value::Exact(a.dot(x).abs()))
        })),
        None => Ok(SupportEval::zero(n, Order::Int(1)).with_label("projection")),
    }
}

/// Like [`projection_body`] but refusing lower-dimensional input.
pub fn projection_body_strict(p: &Polytope) -> Result<SupportEval> {
    if !p.is_full_dimensional() {
        return Err(Error::LowerDimensional);
    }
    projection_body(p)
}

/// `h_{Π_o P} = h_{ΠP} - h_{Π̂_1^+ P}`.
pub fn pi_o(p: &Polytope) -> Result<SupportEval> {
    let pi = projection_body(p)?;
    let plus = asym_lp_projection(p, Order::Int(1), Sign::Plus)?;
    SupportEval::linear(vec![(Rational::from_integer(1.into()), pi), (Rational::from_integer((-1).into()), plus)], "pi_o")
}

/// `h^p(x) = Σ_{h_P(a_i) > 0} max{±x . a_i, 0}^p h_P(a_i)^{1-p}` over area vectors `a_i`.
///
/// Exact for integer `p`; zero for lower-dimensional `P`.
pub fn asym_lp_projection(p: &Polytope, order: Order, sign: Sign) -> Result<SupportEval> {
    let n = p.n();
    let label = format!("asym_lp[{order}]{sign}");
    if !order.is_finite() {
        return Err(Error::InvalidOrder(f64::INFINITY));
    }
    if !p.is_full_dimensional() {
        return Ok(SupportEval::zero(n, order).with_label(label));
    }
    let atoms: Vec<(Vector, Rational)> = p
        .facet_data()
        .iter()
        .filter(|f| f.offset.is_positive())
        .map(|f| (f.normal.clone(), f.offset.clone()))
        .collect();
    let flip = sign == Sign::Minus;
    Ok(SupportEval::new(EvalKind::FacetSum, n, order, label, move |x| {
        let mut acc = Value::zero();
        for (a, off) in &atoms {
            let mut t = a.dot(x);
            if flip {
                t = -t;
            }
            if !t.is_positive() {
                continue;
            }
            let term = match order {
                Order::Int(k) => Value::Exact(pow_int(&t, k) / pow_int(off, k - 1)),
                _ => {
                    let q = order.as_f64();
                    Value::Approx(to_f64(&t).powf(q) * to_f64(off).powf(1.0 - q))
                }
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }))
}

/// `Π̂_∞^+ P = [o, a_i / h_P(a_i) : h_P(a_i) > 0]`, `Π̂_∞^- P = -Π̂_∞^+ P`; `{o}` when
/// `dim P < n`.
pub fn asym_linf_projection(p: &Polytope, sign: Sign) -> Result<Polytope> {
    let n = p.n();
    if !p.is_full_dimensional() {
        return Ok(Polytope::origin(n));
    }
    let mut pts = vec![Vector::zeros(n)];
    for f in p.facet_data().iter().filter(|f| f.offset.is_positive()) {
        let v = f.normal.scale(&f.offset.recip());
        pts.push(if sign == Sign::Minus { -&v } else { v });
    }
    Polytope::convex_hull(&pts)
}

/// `K* = {y : y . v <= 1 for all vertices v}`, by enumerating vertices of the dual
/// inequality system.
pub fn polar_body(k: &Polytope) -> Result<Polytope> {
    if k.origin_position() != OriginPosition::Interior {
        return Err(Error::OriginNotInterior);
    }
    let n = k.n();
    let verts = k.vertices();
    let ones = vec![Rational::from_integer(1.into()); n];
    let mut pts: Vec<Vector> = Vec::new();
    let m = verts.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let rows: Matrix = idx.iter().map(|&i| verts[i].0.clone()).collect();
        if let Some(y) = linalg::solve(&rows, &ones) {
            let y = Vector(y);
            if verts.iter().all(|v| v.dot(&y) <= ones[0]) {
                pts.push(y);
            }
        }
        let Some(i) = (0..n).rev().find(|&i| idx[i] != i + m - n) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Polytope::convex_hull(&pts)
}

/// `ρ_P(x) = max{λ > 0 : λx ∈ P}`.
pub fn radial_function(p: &Polytope, x: &Vector) -> Result<Rational> {
    x.check_dim(p.n())?;
    if x.is_zero() {
        return Err(Error::InvalidParameter("radial function at the origin".into()));
    }
    let mut rows: Matrix = p.vertices().iter().map(|v| v.0.clone()).collect();
    let r = linalg::rank(&rows);
    rows.push(x.0.clone());
    if linalg::rank(&rows) != r {
        return Err(Error::RayOutsideBody);
    }
    let cx = p.chart(x);
    let rho = p
        .chart_facets()
        .iter()
        .filter_map(|f| {
            let t = linalg::dot(&f.normal, &cx);
            t.is_positive().then(|| &f.offset / t)
        })
        .min()
        .ok_or(Error::RayOutsideBody)?;
    if rho.is_zero() {
        return Err(Error::RayOutsideBody);
    }
    Ok(rho)
}
