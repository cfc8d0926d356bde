//! Exact vectors and linear maps, including the special linear transforms used to
//! split standard simplices.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{format_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(pub Vec<Rational>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Rational::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dot(&self, other: &Vector) -> Rational {
        linalg::dot(&self.0, &other.0)
    }

    pub fn scale(&self, c: &Rational) -> Vector {
        Vector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n, found: self.dim() })
        }
    }
}

impl Index<usize> for Vector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter()
            .map(crate::scalar::json_rational)
            .collect::<Result<Vec<_>>>()
            .map(Vector)
            .map_err(serde::de::Error::custom)
    }
}

/// An exact `n x n` matrix acting on column vectors, with its determinant cached.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    entries: Matrix,
    det: Rational,
}

impl LinearMap {
    pub fn new(entries: Matrix) -> Result<Self> {
        let n = entries.len();
        if let Some(bad) = entries.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        let det = linalg::det(&entries);
        Ok(LinearMap { entries, det })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    /// Builds the map whose `j`-th column is `cols[j]`, i.e. `A e_j = cols[j]`.
    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        let n = cols.len();
        for c in cols {
            c.check_dim(n)?;
        }
        Self::new((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_columns(&(0..n).map(|i| Vector::unit(n, i)).collect::<Vec<_>>())
            .expect("identity is square")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn det(&self) -> &Rational {
        &self.det
    }

    pub fn is_sl(&self) -> bool {
        self.det.is_one()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        Vector(self.entries.iter().map(|row| linalg::dot(row, &v.0)).collect())
    }

    pub fn transpose(&self) -> LinearMap {
        let n = self.dim();
        LinearMap {
            entries: (0..n).map(|i| (0..n).map(|j| self.entries[j][i].clone()).collect()).collect(),
            det: self.det.clone(),
        }
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        if self.det.is_zero() {
            return Err(Error::SingularMap);
        }
        let inv = linalg::inverse(&self.entries).ok_or(Error::SingularMap)?;
        Ok(LinearMap { entries: inv, det: self.det.recip() })
    }

    /// `A^{-t}`, the map acting on normals and on contravariant bodies.
    pub fn inverse_transpose(&self) -> Result<LinearMap> {
        Ok(self.inverse()?.transpose())
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let n = self.dim();
        let entries: Matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &self.entries[i][k] * &other.entries[k][j]))
                    .collect()
            })
            .collect();
        LinearMap { entries, det: &self.det * &other.det }
    }

    pub fn to_float(&self) -> FloatMap {
        FloatMap { entries: self.entries.iter().map(|r| r.iter().map(to_f64).collect()).collect() }
    }
}

/// Double-precision matrix for transforms with irrational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMap {
    pub entries: Vec<Vec<f64>>,
}

impl FloatMap {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// The four splitting transforms `phi_1 .. phi_4` for a parameter `0 < lambda < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiKind {
    One,
    Two,
    Three,
    Four,
}

impl PhiKind {
    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(PhiKind::One),
            2 => Ok(PhiKind::Two),
            3 => Ok(PhiKind::Three),
            4 => Ok(PhiKind::Four),
            _ => Err(Error::InvalidParameter(format!("transform index {k}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    Exact(LinearMap),
    Float(FloatMap),
}

fn check_lambda(lambda: &Rational, n: usize) -> Result<()> {
    if !(lambda > &Rational::zero() && lambda < &Rational::one()) {
        return Err(Error::InvalidParameter(format!("lambda = {} not in (0, 1)", format_rational(lambda))));
    }
    if !(3..=5).contains(&n) {
        return Err(Error::DimensionOutOfRange { dim: n, ambient: n });
    }
    Ok(())
}

/// `phi_kind` for `lambda`. `phi_1`, `phi_2` are exact; `phi_3`, `phi_4` carry the factor
/// `(1/lambda)^{1/n}` (resp. `(1/(1-lambda))^{1/n}`) and are returned in double precision.
pub fn transform_phi(kind: PhiKind, lambda: &Rational, n: usize) -> Result<Transform> {
    let base = transform_phi_scale_free(kind, lambda, n)?;
    match kind {
        PhiKind::One | PhiKind::Two => Ok(Transform::Exact(base)),
        PhiKind::Three | PhiKind::Four => {
            let l = to_f64(lambda);
            let t = if kind == PhiKind::Three { l } else { 1.0 - l };
            let factor = (1.0 / t).powf(1.0 / n as f64);
            let mut f = base.to_float();
            for row in &mut f.entries {
                for v in row.iter_mut() {
                    *v *= factor;
                }
            }
            Ok(Transform::Float(f))
        }
    }
}

/// Exact variant: `phi_1`, `phi_2` as defined; `phi_3`, `phi_4` without their global
/// dilation factor (so `phi_3 = (1/lambda)^{1/n} * transform_phi_scale_free(Three, ..)`).
pub fn transform_phi_scale_free(kind: PhiKind, lambda: &Rational, n: usize) -> Result<LinearMap> {
    check_lambda(lambda, n)?;
    let one = Rational::one();
    let mix = &Vector::unit(n, 0).scale(lambda) + &Vector::unit(n, 1).scale(&(&one - lambda));
    let mut cols: Vec<Vector> = (0..n).map(|i| Vector::unit(n, i)).collect();
    match kind {
        PhiKind::One => {
            cols[0] = mix;
            cols[n - 1] = Vector::unit(n, n - 1).scale(&lambda.recip());
        }
        PhiKind::Two => {
            cols[1] = mix;
            cols[n - 1] = Vector::unit(n, n - 1).scale(&(&one - lambda).recip());
        }
        PhiKind::Three => cols[0] = mix,
        PhiKind::Four => cols[1] = mix,
    }
    LinearMap::from_columns(&cols)
}
