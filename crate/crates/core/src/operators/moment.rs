//! Asymmetric moment bodies `h^p(x) = ∫_P (±x . y)_+^p dy`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polytope::Polytope;
use crate::probes;
use crate::scalar::{pow_int, to_f64, Order, Rational, Value};
use crate::support::{EvalKind, SupportEval};
use crate::vector::Vector;

use super::{Body, Sign};

const MC_FIELD_SAMPLES: usize = 20_000;

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Divided difference `[t_0, ..., t_m] F` of `F(t) = t_+^k p! / k!`, `k = p + m`,
/// with repeated nodes handled through derivatives.
fn truncated_divided_difference(nodes: &[Rational], p: u32) -> Rational {
    let m = nodes.len() - 1;
    let k = p + m as u32;
    if nodes.iter().all(|t| !t.is_positive()) {
        return Rational::zero();
    }
    let mut t = nodes.to_vec();
    t.sort();
    let pf = Rational::from_integer(factorial(p));
    // j-th derivative divided by j!: t_+^{k-j} p! / ((k-j)! j!)
    let deriv = |x: &Rational, j: usize| -> Rational {
        if !x.is_positive() {
            return Rational::zero();
        }
        let denom = factorial(k - j as u32) * factorial(j as u32);
        pow_int(x, k - j as u32) * &pf / Rational::from_integer(denom)
    };
    // table[i] holds [t_i, ..., t_{i+len}] for the current len
    let mut table: Vec<Rational> = t.iter().map(|x| deriv(x, 0)).collect();
    for len in 1..=m {
        let mut next = Vec::with_capacity(m + 1 - len);
        for i in 0..=m - len {
            let (a, b) = (&t[i], &t[i + len]);
            next.push(if a == b { deriv(a, len) } else { (&table[i + 1] - &table[i]) / (b - a) });
        }
        table = next;
    }
    table.swap_remove(0)
}

/// Triangulation of a full-dimensional polytope as `(|det|, vertex list)` pairs.
fn weighted_simplices(p: &Polytope) -> Vec<(Rational, Vec<Vector>)> {
    p.triangulation()
        .iter()
        .map(|s| {
            let vs = p.vertex_list(s);
            let rows: Matrix = vs[1..].iter().map(|v| (v - &vs[0]).0).collect();
            (linalg::abs_det(&rows), vs)
        })
        .collect()
}

/// `∫_P (x . y)_+^p dy` for integer `p`, exact.
pub fn moment_power(p: &Polytope, x: &Vector, order: u32) -> Rational {
    if !p.is_full_dimensional() {
        return Rational::zero();
    }
    moment_power_on(&weighted_simplices(p), x, order)
}

fn moment_power_on(simplices: &[(Rational, Vec<Vector>)], x: &Vector, order: u32) -> Rational {
    simplices.iter().fold(Rational::zero(), |acc, (det, vs)| {
        let nodes: Vec<Rational> = vs.iter().map(|v| v.dot(x)).collect();
        acc + det * truncated_divided_difference(&nodes, order)
    })
}

/// Complete homogeneous symmetric polynomial `h_k(z_0, ..., z_m)`.
pub fn complete_homogeneous(z: &[Rational], k: u32) -> Rational {
    let k = k as usize;
    let mut h = vec![Rational::zero(); k + 1];
    h[0] = Rational::one();
    for zi in z {
        for j in 1..=k {
            let add = zi * &h[j - 1];
            h[j] += add;
        }
    }
    h.swap_remove(k)
}

/// `∫_P (x . y)_+^p dy` computed by splitting `P` at `x^⊥` and integrating the polynomial
/// `(x . y)^p` over a triangulation of the positive piece.
pub fn moment_power_by_split(p: &Polytope, x: &Vector, order: u32) -> Result<Rational> {
    if !p.is_full_dimensional() || x.is_zero() {
        return Ok(Rational::zero());
    }
    let piece = p.halfspace_split(x)?.positive;
    if !piece.is_full_dimensional() {
        return Ok(Rational::zero());
    }
    let n = p.n() as u32;
    let coef = Rational::new(factorial(order), factorial(order + n));
    Ok(weighted_simplices(&piece).iter().fold(Rational::zero(), |acc, (det, vs)| {
        let vals: Vec<Rational> = vs.iter().map(|v| v.dot(x)).collect();
        // vol * n! = det
        acc + det * &coef * complete_homogeneous(&vals, order)
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Seeded Monte-Carlo estimate of `∫_P (x . y)_+^p dy` for real `p >= 1`.
pub fn moment_power_monte_carlo(p: &Polytope, x: &Vector, order: f64, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("zero samples".into()));
    }
    if !p.is_full_dimensional() {
        return Ok(MonteCarloEstimate { value: 0.0, std_err: 0.0, samples, seed });
    }
    let n = p.n();
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    let simplices: Vec<(f64, Vec<Vec<f64>>)> = weighted_simplices(p)
        .into_iter()
        .map(|(det, vs)| (to_f64(&det) / fact, vs.iter().map(Vector::to_f64).collect()))
        .collect();
    let total: f64 = simplices.iter().map(|s| s.0).sum();
    let mut cumulative = Vec::with_capacity(simplices.len());
    let mut run = 0.0;
    for (vol, _) in &simplices {
        run += vol / total;
        cumulative.push(run);
    }
    let xf = x.to_f64();
    let mut rng = probes::rng(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut weights = vec![0.0; n + 1];
    for _ in 0..samples {
        let u: f64 = rng.gen();
        let k = cumulative.iter().position(|&c| u < c).unwrap_or(simplices.len() - 1);
        let vs = &simplices[k].1;
        let mut w_sum = 0.0;
        for w in weights.iter_mut() {
            *w = rng.sample(Exp1);
            w_sum += *w;
        }
        let mut dot = 0.0;
        for (w, v) in weights.iter().zip(vs) {
            dot += w / w_sum * v.iter().zip(&xf).map(|(a, b)| a * b).sum::<f64>();
        }
        let f = if dot > 0.0 { dot.powf(order) } else { 0.0 };
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
    Ok(MonteCarloEstimate {
        value: total * mean,
        std_err: total * (var / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// `M_p^± P`: a field of order `p` for finite `p` (exact for integer `p`, Monte-Carlo with
/// a fixed seed otherwise); for `p = ∞` the polytope `±P` (or `{o}` when `dim P < n`).
pub fn moment_body(p: &Polytope, order: Order, sign: Sign) -> Result<Body> {
    let n = p.n();
    let flip = sign == Sign::Minus;
    let label = format!("moment[{order}]{sign}");
    match order {
        Order::Infinity => {
            if !p.is_full_dimensional() {
                return Ok(Body::Polytope(Polytope::origin(n)));
            }
            Ok(Body::Polytope(if flip { p.neg() } else { p.clone() }))
        }
        Order::Int(k) => {
            if !p.is_full_dimensional() {
                return Ok(Body::Field(SupportEval::zero(n, order).with_label(label)));
            }
            let simplices = weighted_simplices(p);
            Ok(Body::Field(SupportEval::new(EvalKind::Combination, n, order, label, move |x| {
                let y = if flip { -x } else { x.clone() };
                Ok(Value::Exact(moment_power_on(&simplices, &y, k)))
            })))
        }
        Order::Real(r) => {
            let q = p.clone();
            Ok(Body::Field(SupportEval::new(EvalKind::Combination, n, order, label, move |x| {
                let y = if flip { -x } else { x.clone() };
                Ok(Value::Approx(moment_power_monte_carlo(&q, &y, r, MC_FIELD_SAMPLES, 0)?.value))
            })))
        }
    }
}

/// Field of `M_p^± P` for finite `p`.
pub fn moment_field(p: &Polytope, order: Order, sign: Sign) -> Result<SupportEval> {
    match moment_body(p, order, sign)? {
        Body::Field(f) => Ok(f),
        Body::Polytope(_) => Err(Error::InvalidOrder(f64::INFINITY)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn triangle_first_moment() {
        let t2 = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
        assert_eq!(moment_power(&t2, &Vector::from_ints(&[1, 0]), 1), rat(1, 6));
        assert_eq!(moment_power_by_split(&t2, &Vector::from_ints(&[1, 0]), 1).unwrap(), rat(1, 6));
        let sq = Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1))]).unwrap();
        assert_eq!(moment_power(&sq, &Vector::from_ints(&[1, 0]), 1), int(1));
    }

    #[test]
    fn vanishes_on_negative_side() {
        let t3 = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        assert_eq!(moment_power(&t3, &Vector::from_ints(&[-1, -2, 0]), 2), int(0));
        let seg = Polytope::standard_simplex(1, 3, &int(1)).unwrap();
        assert_eq!(moment_power(&seg, &Vector::from_ints(&[1, 0, 0]), 1), int(0));
    }

    #[test]
    fn divided_difference_matches_split_oracle() {
        let p = Polytope::convex_hull(&[
            Vector::from_ints(&[0, 0, 0]),
            Vector::from_ints(&[-1, 0, 0]),
            Vector::from_ints(&[2, 1, 0]),
            Vector::from_ints(&[0, -1, 1]),
            Vector::from_ints(&[0, 2, -1]),
            Vector::from_ints(&[1, 1, 2]),
        ])
        .unwrap();
        for x in probes::probe_set(3, 10, 5) {
            for k in 1..=3 {
                assert_eq!(moment_power(&p, &x, k), moment_power_by_split(&p, &x, k).unwrap(), "x = {x}, p = {k}");
            }
        }
    }

    #[test]
    fn complete_homogeneous_small() {
        // h_2(a, b) = a^2 + ab + b^2
        assert_eq!(complete_homogeneous(&[int(2), int(3)], 2), int(19));
        assert_eq!(complete_homogeneous(&[int(2), int(3)], 0), int(1));
    }

    #[test]
    fn monte_carlo_close_to_exact() {
        let t2 = Polytope::standard_simplex(2, 2, &int(1)).unwrap();
        let est = moment_power_monte_carlo(&t2, &Vector::from_ints(&[1, 0]), 1.0, 20_000, 3).unwrap();
        assert!((est.value - 1.0 / 6.0).abs() < 4.0 * est.std_err);
    }

    #[test]
    fn linf_moment_body() {
        let t3 = Polytope::standard_simplex(3, 3, &int(1)).unwrap();
        assert!(matches!(moment_body(&t3, Order::Infinity, Sign::Minus).unwrap(), Body::Polytope(q) if q == t3.neg()));
        let low = Polytope::standard_simplex(2, 3, &int(1)).unwrap();
        assert!(matches!(moment_body(&low, Order::Infinity, Sign::Plus).unwrap(), Body::Polytope(q) if q == Polytope::origin(3)));
    }
}
