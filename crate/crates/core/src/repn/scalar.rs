use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Matrix entries: exact rationals or complex doubles.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact.
    const EXACT: bool;
    /// Largest entry treated as zero by relation checks.
    const TOLERANCE: f64;

    fn conj(&self) -> Self;
    fn modulus(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    fn from_integer(n: i64) -> Self;
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const TOLERANCE: f64 = 0.0;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn modulus(&self) -> f64 {
        self.to_f64().unwrap_or(f64::INFINITY).abs()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_integer(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const TOLERANCE: f64 = 1e-12;

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn from_integer(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}
