//! Exact rational scalars, mixed exact/float values and the L_p order type.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number used for every exact computation.
pub type Rational = BigRational;

/// Relative tolerance used whenever one side of a comparison is not exact.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor paired with [`REL_TOL`].
pub const ABS_FLOOR: f64 = 1e-12;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(q: &Rational) -> f64 {
    match q.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            // numerator or denominator overflowed f64; divide in scaled integer space
            let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
            if n.is_finite() && d.is_finite() {
                n / d
            } else {
                let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
                let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }
}

/// Exact conversion of a finite double into a rational.
pub fn from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite coordinate {v}")))
}

/// Parses `"a"`, `"a/b"` or a decimal literal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(n));
    }
    // decimal literal, kept exact: "1.25" -> 125/100
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|e| Error::Parse(format!("{s}: {e}")))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(&digits).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut q = Rational::from_integer(n);
    if scale >= 0 {
        for _ in 0..scale {
            q *= &ten;
        }
    } else {
        for _ in 0..(-scale) {
            q /= &ten;
        }
    }
    Ok(q)
}

/// Serializes a rational as its `"num/den"` string.
pub fn serialize_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn pow_int(q: &Rational, k: u32) -> Rational {
    num_traits::pow(q.clone(), k as usize)
}

/// Exact rational k-th root when it exists (numerator and denominator perfect powers).
pub fn exact_root(q: &Rational, k: u32) -> Option<Rational> {
    if k == 1 {
        return Some(q.clone());
    }
    if q.is_negative() {
        return None;
    }
    let n = q.numer().nth_root(k);
    let d = q.denom().nth_root(k);
    if num_traits::pow(n.clone(), k as usize) == *q.numer()
        && num_traits::pow(d.clone(), k as usize) == *q.denom()
    {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// The order p of an L_p combination, `1 <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Int(u32),
    Real(f64),
    Infinity,
}

impl Order {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Order::Infinity);
        }
        if p.is_nan() || p < 1.0 || !p.is_finite() {
            return Err(Error::InvalidOrder(p));
        }
        if p.fract() == 0.0 && p <= u32::MAX as f64 {
            Ok(Order::Int(p as u32))
        } else {
            Ok(Order::Real(p))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Order::Int(k) => k as f64,
            Order::Real(p) => p,
            Order::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        !matches!(self, Order::Infinity)
    }

    pub fn integer(self) -> Option<u32> {
        match self {
            Order::Int(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Int(k) => write!(f, "{k}"),
            Order::Real(p) => write!(f, "{p}"),
            Order::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Int(k) => s.serialize_u32(*k),
            Order::Real(p) => s.serialize_f64(*p),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => f64::INFINITY,
                other => other.parse::<f64>().map_err(serde::de::Error::custom)?,
            },
        };
        Order::new(p).map_err(serde::de::Error::custom)
    }
}

/// A real number that is either known exactly or only as a double.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => to_f64(q),
            Value::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_negative(),
            Value::Approx(v) => *v < 0.0,
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn scale(&self, c: &Rational) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a * c),
            Value::Approx(v) => Value::Approx(v * to_f64(c)),
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(-a),
            Value::Approx(v) => Value::Approx(-v),
        }
    }

    pub fn max(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(if a >= b { a.clone() } else { b.clone() }),
            _ => Value::Approx(self.to_f64().max(other.to_f64())),
        }
    }

    /// `sgn(a)|a|^p`; exact for integer p on exact input.
    pub fn signed_pow(&self, p: Order) -> Value {
        match (self, p) {
            (Value::Exact(q), Order::Int(k)) => {
                let mag = pow_int(&q.abs(), k);
                Value::Exact(if q.is_negative() { -mag } else { mag })
            }
            (_, Order::Infinity) => self.clone(),
            _ => {
                let v = self.to_f64();
                Value::Approx(v.signum() * v.abs().powf(p.as_f64()))
            }
        }
    }

    /// Inverse of [`Value::signed_pow`] for a nonnegative field value: returns `v^{1/p}`,
    /// exact when the root is rational.
    pub fn root(&self, p: Order) -> Value {
        match (self, p) {
            (_, Order::Infinity) => self.clone(),
            (Value::Exact(q), Order::Int(k)) => match exact_root(q, k) {
                Some(r) => Value::Exact(r),
                None => Value::Approx(to_f64(q).max(0.0).powf(1.0 / k as f64)),
            },
            _ => Value::Approx(self.to_f64().max(0.0).powf(1.0 / p.as_f64())),
        }
    }

    /// Equality under the mixed tolerance policy: exact when both sides are rational,
    /// otherwise relative [`REL_TOL`] with absolute floor [`ABS_FLOOR`].
    pub fn approx_eq(&self, other: &Value) -> bool {
        self.approx_eq_tol(other, REL_TOL)
    }

    pub fn approx_eq_tol(&self, other: &Value, rel: f64) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= (rel * a.abs().max(b.abs())).max(ABS_FLOOR)
            }
        }
    }

    pub fn discrepancy(&self, other: &Value) -> f64 {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => to_f64(&(a - b)).abs(),
            _ => (self.to_f64() - other.to_f64()).abs(),
        }
    }

    pub fn partial_cmp_value(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<Rational> for Value {
    fn from(q: Rational) -> Self {
        Value::Exact(q)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => f.write_str(&format_rational(q)),
            Value::Approx(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Exact(q) => s.serialize_str(&format_rational(q)),
            Value::Approx(v) => s.serialize_f64(*v),
        }
    }
}

/// A rational that serializes as a `"num/den"` string and deserializes from a string
/// or a JSON number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Num(pub Rational);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rational(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        json_rational(&raw).map(Num).map_err(serde::de::Error::custom)
    }
}

pub fn json_rational(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => from_f64(n.as_f64().unwrap_or(f64::NAN)),
        },
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

/// `sgn(a)|a|^p` for a rational `a` and real `p`.
pub fn signed_power(a: &Rational, p: Order) -> Value {
    Value::Exact(a.clone()).signed_pow(p)
}

pub fn one() -> Rational {
    Rational::one()
}
