//! Numeric backends. Identity suites run on exact rationals, geometry on f64.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Q = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;
    fn from_q(q: &Q) -> Self;
    /// Constant with a precomputed float image.
    fn from_const(q: &Q, _f: f64) -> Self {
        Self::from_q(q)
    }
    /// Exact for rationals: every finite double is a dyadic rational.
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_q(&self) -> Q;
    fn total_cmp(&self, other: &Self) -> Ordering;
    fn abs(&self) -> Self;
    fn sin(&self) -> Self {
        Self::from_f64(self.to_f64().sin())
    }
    fn cos(&self) -> Self {
        Self::from_f64(self.to_f64().cos())
    }
    fn exp(&self) -> Self {
        Self::from_f64(self.to_f64().exp())
    }
    fn from_i64(x: i64) -> Self {
        Self::from_q(&Q::from_integer(BigInt::from(x)))
    }
    fn fmt_value(&self) -> String;
    fn parse_value(s: &str) -> Option<Self>;
    fn is_zero_val(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_const(_q: &Q, f: f64) -> Self {
        f
    }
    fn from_q(q: &Q) -> Self {
        num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Self {
        // fold -0.0 into 0.0 so bitwise point keys agree
        if x == 0.0 {
            0.0
        } else {
            x
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_q(&self) -> Q {
        Q::from_float(*self).unwrap_or_else(Q::zero)
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn fmt_value(&self) -> String {
        format!("{:?}", self)
    }
    fn parse_value(s: &str) -> Option<Self> {
        if let Some((a, b)) = s.split_once('/') {
            let a: f64 = a.parse().ok()?;
            let b: f64 = b.parse().ok()?;
            return Some(a / b);
        }
        s.parse().ok()
    }
}

impl Scalar for Q {
    const EXACT: bool = true;
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn from_f64(x: f64) -> Self {
        Q::from_float(x).unwrap_or_else(Q::zero)
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_q(&self) -> Q {
        self.clone()
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn fmt_value(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_value(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

/// Parses `p/q`, integers and plain decimals (`-0.125`, `3e-2`) exactly.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Q::new(a, b));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{}{}", ip, fp).parse().ok()?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Q::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

pub fn cmp_slices<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Total-order wrapper so points can key ordered maps.
#[derive(Clone, Debug, PartialEq)]
pub struct Pt<S>(pub Vec<S>);

impl<S: Scalar> Eq for Pt<S> {}
impl<S: Scalar> PartialOrd for Pt<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Pt<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_slices(&self.0, &other.0)
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale_vec<S: Scalar>(c: &S, a: &[S]) -> Vec<S> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn norm_f64<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

pub fn to_f64_vec<S: Scalar>(a: &[S]) -> Vec<f64> {
    a.iter().map(|x| x.to_f64()).collect()
}

pub fn from_f64_vec<S: Scalar>(a: &[f64]) -> Vec<S> {
    a.iter().map(|&x| S::from_f64(x)).collect()
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}
