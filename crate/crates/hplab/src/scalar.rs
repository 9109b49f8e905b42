//! Numeric field abstraction so coefficient grids can be built either in
//! `f64` or in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact conversion. Every finite `f64` is a dyadic rational, so the
    /// rational implementation loses nothing.
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        // Numerator and denominator can overflow f64 separately; fall back to
        // a scaled division when they do.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let shift = self.denom().bits().max(self.numer().bits()) as i64 - 900;
                let s = BigInt::from(2).pow(shift.max(0) as u32);
                let n = (self.numer() / &s).to_f64().unwrap_or(f64::INFINITY);
                let d = (self.denom() / &s).to_f64().unwrap_or(f64::INFINITY);
                n / d
            }
        }
    }
    fn abs_f64(&self) -> f64 {
        Scalar::to_f64(&self.abs())
    }
    fn is_exact() -> bool {
        true
    }
}

/// Rational number p/q, shorthand for tests and oracles.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_zero<S: Scalar>(v: &S) -> bool {
    v.is_zero()
}
