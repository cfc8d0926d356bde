//! Support functions and p-homogeneous fields: evaluation, L_p combination and
//! sublinearity/homogeneity certification.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::Polytope;
use crate::probes;
use crate::scalar::{to_f64, Order, Rational, Value, ABS_FLOOR};
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalKind {
    PolytopeBacked,
    FacetSum,
    FaceLatticeSum,
    Combination,
}

pub type FieldFn = dyn Fn(&Vector) -> Result<Value> + Send + Sync;

/// A field `x -> h_Z(x)^p` on `R^n` (for `p = inf` simply `h_Z(x)`).
///
/// [`SupportEval::field`] returns the field value; [`SupportEval::eval`] the support value
/// `field^{1/p}`. For Φ-type fields that are not p-th powers of support functions only
/// `field` is meaningful.
#[derive(Clone)]
pub struct SupportEval {
    kind: EvalKind,
    n: usize,
    order: Order,
    label: String,
    f: Arc<FieldFn>,
}

impl fmt::Debug for SupportEval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportEval")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("order", &self.order)
            .field("label", &self.label)
            .finish()
    }
}

impl SupportEval {
    pub fn new(
        kind: EvalKind,
        n: usize,
        order: Order,
        label: impl Into<String>,
        f: impl Fn(&Vector) -> Result<Value> + Send + Sync + 'static,
    ) -> Self {
        SupportEval { kind, n, order, label: label.into(), f: Arc::new(f) }
    }

    /// `h_P` evaluated as a maximum over vertices.
    pub fn from_polytope(p: &Polytope) -> Self {
        let q = p.clone();
        SupportEval::new(EvalKind::PolytopeBacked, p.n(), Order::Int(1), "polytope", move |x| {
            Ok(Value::Exact(q.support(x)))
        })
    }

    /// The zero field (support function of `{o}`).
    pub fn zero(n: usize, order: Order) -> Self {
        SupportEval::new(EvalKind::Combination, n, order, "zero", |_| Ok(Value::zero()))
    }

    pub fn kind(&self) -> EvalKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn field(&self, x: &Vector) -> Result<Value> {
        x.check_dim(self.n)?;
        (self.f)(x)
    }

    pub fn eval(&self, x: &Vector) -> Result<Value> {
        Ok(self.field(x)?.root(self.order))
    }

    /// `h(x)^p` for the requested order, without a root/power round trip when the orders agree.
    pub fn power(&self, x: &Vector, p: Order) -> Result<Value> {
        if p == self.order {
            self.field(x)
        } else {
            Ok(self.eval(x)?.signed_pow(p))
        }
    }

    /// `x -> field(-x)`: the field of the reflected body.
    pub fn reflect(&self) -> SupportEval {
        let inner = self.clone();
        SupportEval::new(self.kind, self.n, self.order, format!("-({})", self.label), move |x| {
            inner.field(&-x)
        })
    }

    /// Same field, regarded as a field of a different order (e.g. `h^1` as `h^p` metadata).
    pub fn with_order(mut self, order: Order) -> Self {
        self.order = order;
        self
    }

    /// Linear combination `sum c_i f_i` of fields of one order.
    pub fn linear(terms: Vec<(Rational, SupportEval)>, label: impl Into<String>) -> Result<SupportEval> {
        let first = terms.first().ok_or(Error::EmptyInput)?;
        let (n, order) = (first.1.n, first.1.order);
        for (_, t) in &terms {
            if t.n != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.n });
            }
            if t.order != order {
                return Err(Error::InvalidParameter("fields of different order".into()));
            }
        }
        Ok(SupportEval::new(EvalKind::Combination, n, order, label, move |x| {
            let mut acc = Value::zero();
            for (c, t) in &terms {
                if !c.is_zero() {
                    acc = acc.add(&t.field(x)?.scale(c));
                }
            }
            Ok(acc)
        }))
    }
}

/// `c^p` as a value (exact for integer `p`).
pub fn coefficient_power(c: &Rational, p: Order) -> Value {
    Value::Exact(c.clone()).signed_pow(p)
}

/// `c1 K +_p c2 L` on support functions:
/// `h^p = c1^p h1^p + c2^p h2^p`, or `max(c1 h1, c2 h2)` for `p = inf`.
pub fn lp_combine(h1: &SupportEval, h2: &SupportEval, p: Order, c1: &Rational, c2: &Rational) -> Result<SupportEval> {
    lp_combine_many(&[(c1.clone(), h1.clone()), (c2.clone(), h2.clone())], p)
}

/// `c_1 K_1 +_p ... +_p c_k K_k`.
pub fn lp_combine_many(terms: &[(Rational, SupportEval)], p: Order) -> Result<SupportEval> {
    let first = terms.first().ok_or(Error::EmptyInput)?;
    let n = first.1.n;
    for (c, t) in terms {
        if t.n != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.n });
        }
        if c.is_negative() {
            return Err(Error::InvalidParameter("negative L_p coefficient".into()));
        }
    }
    let terms: Vec<(Rational, Value, SupportEval)> =
        terms.iter().map(|(c, t)| (c.clone(), coefficient_power(c, p), t.clone())).collect();
    let label = format!(
        "lp[{p}]({})",
        terms.iter().map(|(c, _, t)| format!("{c}*{}", t.label)).collect::<Vec<_>>().join(", ")
    );
    Ok(SupportEval::new(EvalKind::Combination, n, p, label, move |x| {
        let mut acc = Value::zero();
        for (c, cp, t) in &terms {
            if c.is_zero() {
                continue;
            }
            let v = match p {
                Order::Infinity => t.eval(x)?,
                _ => t.power(x, p)?,
            };
            if v.is_negative() && v.to_f64().abs() > ABS_FLOOR {
                return Err(Error::NegativeInput);
            }
            acc = match p {
                Order::Infinity => acc.max(&v.scale(c)),
                _ => acc.add(&cp.mul(&v)),
            };
        }
        Ok(acc)
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityWitness {
    pub x: Vector,
    pub y: Vector,
    pub hx: Value,
    pub hy: Value,
    pub hxy: Value,
    pub excess: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityReport {
    pub check: &'static str,
    pub params: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SubadditivityWitness>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
}

/// Tests `h(x + y) <= h(x) + h(y)` at one pair; returns the witness when violated.
pub fn subadditivity_at(h: &SupportEval, x: &Vector, y: &Vector, tol: f64) -> Result<Option<SubadditivityWitness>> {
    let hx = h.eval(x)?;
    let hy = h.eval(y)?;
    let hxy = h.eval(&(x + y))?;
    let excess = hxy.sub(&hx.add(&hy));
    let violated = match &excess {
        Value::Exact(e) => e.is_positive(),
        Value::Approx(e) => *e > tol * (1.0 + hx.to_f64().abs() + hy.to_f64().abs()),
    };
    Ok(violated.then(|| SubadditivityWitness { x: x.clone(), y: y.clone(), hx, hy, hxy, excess }))
}

/// Seeded search for a sublinearity violation of a 1-homogeneous `h`.
///
/// All pairs of the combinatorial probe set are tried first (these include the sign
/// patterns and special vectors), then `samples` random pairs. The largest violation
/// found is reported.
pub fn subadditivity_check(h: &SupportEval, samples: usize, seed: u64, tol: f64) -> Result<SubadditivityReport> {
    let n = h.n();
    let combo = probes::combinatorial_probes(n);
    let mut best: Option<SubadditivityWitness> = None;
    let mut consider = |w: Option<SubadditivityWitness>| {
        if let Some(w) = w {
            if best.as_ref().is_none_or(|b| w.excess.to_f64() > b.excess.to_f64()) {
                best = Some(w);
            }
        }
    };
    let mut count = 0;
    for i in 0..combo.len() {
        for j in i..combo.len() {
            consider(subadditivity_at(h, &combo[i], &combo[j], tol)?);
            count += 1;
        }
    }
    let mut r = probes::rng(seed);
    for _ in 0..samples {
        let x = probes::random_direction(&mut r, n);
        let y = probes::random_direction(&mut r, n);
        consider(subadditivity_at(h, &x, &y, tol)?);
        count += 1;
    }
    Ok(SubadditivityReport {
        check: "subadditivity",
        params: h.label().to_string(),
        pass: best.is_none(),
        witness: best,
        seed,
        samples: count,
        tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    pub check: &'static str,
    pub params: String,
    pub pass: bool,
    pub degree: String,
    /// Exponent recovered as `log(h(sP)/h(P)) / log(s)`, per scale.
    pub measured: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(String, Vector, f64)>,
    pub samples: usize,
    pub tol: f64,
}

/// Checks `h_{op(sP)}(x) = s^q h_{op(P)}(x)` at every scale and probe.
///
/// Comparisons are made on the fields (`h^p`), where the factor is `s^{q p}`; when `q p`
/// is an integer the check is exact on exact fields.
pub fn homogeneity_check(
    op: &dyn Fn(&Polytope) -> Result<SupportEval>,
    p: &Polytope,
    q: &Rational,
    scales: &[Rational],
    probes: &[Vector],
    tol: f64,
) -> Result<HomogeneityReport> {
    let base = op(p)?;
    let order = base.order();
    let field_exp: Rational = match order {
        Order::Int(k) => q * Rational::from_integer(k.into()),
        Order::Infinity => q.clone(),
        Order::Real(r) => crate::scalar::from_f64(to_f64(q) * r)?,
    };
    let mut measured = Vec::new();
    let mut witness = None;
    let mut samples = 0;
    for s in scales {
        let scaled = op(&p.scale(s)?)?;
        let factor: Value = if field_exp.is_integer() {
            let e = field_exp.to_integer();
            let k: u32 = e.magnitude().try_into().unwrap_or(u32::MAX);
            let pw = crate::scalar::pow_int(s, k);
            Value::Exact(if e.is_negative() { pw.recip() } else { pw })
        } else {
            Value::Approx(to_f64(s).powf(to_f64(&field_exp)))
        };
        let mut exps = Vec::new();
        for x in probes {
            samples += 1;
            let lhs = scaled.field(x)?;
            let base_val = base.field(x)?;
            let rhs = factor.mul(&base_val);
            if !lhs.approx_eq_tol(&rhs, tol) && witness.is_none() {
                witness = Some((s.to_string(), x.clone(), lhs.discrepancy(&rhs)));
            }
            let (a, b) = (lhs.to_f64(), base_val.to_f64());
            if a > 0.0 && b > 0.0 {
                let root = match order {
                    Order::Infinity => 1.0,
                    o => o.as_f64(),
                };
                exps.push((a / b).ln() / to_f64(s).ln() / root);
            }
        }
        measured.push(if exps.is_empty() { f64::NAN } else { exps.iter().sum::<f64>() / exps.len() as f64 });
    }
    Ok(HomogeneityReport {
        check: "homogeneity",
        params: base.label().to_string(),
        pass: witness.is_none(),
        degree: q.to_string(),
        measured,
        witness,
        samples,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn poly(pts: &[&[i64]]) -> Polytope {
        Polytope::convex_hull(&pts.iter().map(|p| Vector::from_ints(p)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn polytope_support_values() {
        let t2 = SupportEval::from_polytope(&Polytope::standard_simplex(2, 2, &int(1)).unwrap());
        assert_eq!(t2.eval(&Vector::from_ints(&[1, 1])).unwrap().exact(), Some(&int(1)));
        let seg = SupportEval::from_polytope(&Polytope::standard_simplex(1, 3, &int(1)).unwrap());
        assert_eq!(seg.eval(&Vector::from_ints(&[-1, 0, 0])).unwrap().exact(), Some(&int(0)));
        let cube = Polytope::cuboid(&[(int(-1), int(1)), (int(-1), int(1)), (int(-1), int(1))]).unwrap();
        let h = SupportEval::from_polytope(&cube);
        assert_eq!(h.eval(&Vector::from_ints(&[1, 2, 3])).unwrap().exact(), Some(&int(6)));
        assert!(matches!(h.eval(&Vector::from_ints(&[1, 2])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lp_combinations() {
        let a = SupportEval::from_polytope(&poly(&[&[0, 0], &[1, 0]]));
        let b = SupportEval::from_polytope(&poly(&[&[0, 0], &[0, 1]]));
        let x = Vector::from_ints(&[1, 1]);
        let sum = lp_combine(&a, &b, Order::Int(1), &int(1), &int(1)).unwrap();
        assert_eq!(sum.eval(&x).unwrap().exact(), Some(&int(2)));
        let three = SupportEval::from_polytope(&poly(&[&[0, 0], &[3, 0]]));
        let four = SupportEval::from_polytope(&poly(&[&[0, 0], &[0, 4]]));
        let l2 = lp_combine(&three, &four, Order::Int(2), &int(1), &int(1)).unwrap();
        assert_eq!(l2.eval(&x).unwrap().exact(), Some(&int(5)));
        let linf = lp_combine(&three, &four, Order::Infinity, &int(1), &rat(1, 2)).unwrap();
        assert_eq!(linf.eval(&x).unwrap().exact(), Some(&int(3)));
        let neg = SupportEval::new(EvalKind::Combination, 2, Order::Int(1), "neg", |_| Ok(Value::Exact(int(-1))));
        assert_eq!(lp_combine(&neg, &a, Order::Int(2), &int(1), &int(1)).unwrap().eval(&x).unwrap_err(), Error::NegativeInput);
    }

    #[test]
    fn linf_combination_is_hull() {
        let k = poly(&[&[0, 0], &[2, 1], &[-1, 1]]);
        let l = poly(&[&[0, 0], &[1, -2], &[0, 3]]);
        let both: Vec<Vector> = k.vertices().iter().chain(l.vertices()).cloned().collect();
        let hull = SupportEval::from_polytope(&Polytope::convex_hull(&both).unwrap());
        let comb = lp_combine(
            &SupportEval::from_polytope(&k),
            &SupportEval::from_polytope(&l),
            Order::Infinity,
            &int(1),
            &int(1),
        )
        .unwrap();
        for x in probes::probe_set(2, 30, 3) {
            assert!(comb.eval(&x).unwrap().approx_eq(&hull.eval(&x).unwrap()));
        }
    }

    #[test]
    fn support_functions_are_subadditive() {
        let h = SupportEval::from_polytope(&poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 2, 0], &[0, 0, 3], &[-1, -1, -1]]));
        let r = subadditivity_check(&h, 200, 11, 1e-12).unwrap();
        assert!(r.pass);
        assert_eq!(r.seed, 11);
    }

    #[test]
    fn non_convex_field_fails_subadditivity() {
        // h(x) = |x1| - |x2| is not sublinear
        let h = SupportEval::new(EvalKind::Combination, 2, Order::Int(1), "bad", |x: &Vector| {
            Ok(Value::Exact(x[0].abs() - x[1].abs()))
        });
        let r = subadditivity_check(&h, 0, 1, 0.0).unwrap();
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert!(subadditivity_at(&h, &w.x, &w.y, 0.0).unwrap().is_some());
    }

    #[test]
    fn identity_homogeneity() {
        let p = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        let op = |p: &Polytope| Ok(SupportEval::from_polytope(p));
        let r = homogeneity_check(&op, &p, &int(1), &[rat(1, 2), int(2), int(3)], &probes::probe_set(2, 5, 1), 1e-10)
            .unwrap();
        assert!(r.pass);
        assert!(r.measured.iter().all(|m| (m - 1.0).abs() < 1e-12));
        let wrong =
            homogeneity_check(&op, &p, &int(2), &[int(2)], &probes::probe_set(2, 0, 1), 1e-10).unwrap();
        assert!(!wrong.pass);
    }

    #[test]
    fn reflection() {
        let h = SupportEval::from_polytope(&poly(&[&[0, 0], &[1, 0], &[0, 1]]));
        assert_eq!(h.reflect().eval(&Vector::from_ints(&[-1, 0])).unwrap().exact(), Some(&int(1)));
    }
}
