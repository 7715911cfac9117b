//! Numeric backends for map parameters and orbit points.
//!
//! Everything above this module is generic over [`Scalar`]. Exact backends
//! ([`Rational`], [`QuadSurd`]) decide every comparison correctly; floating
//! backends report a nonzero unit roundoff and the orbit code tracks error
//! bounds for them.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::surd::QuadSurd;

/// Arbitrary precision rational numbers.
pub type Rational = BigRational;

/// Scalar field used for map parameters and points of `[0, 1]`.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + FromPrimitive
    + ToPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    /// Relative rounding error of one arithmetic operation (0 when exact).
    fn unit_roundoff() -> f64;

    /// Total order; agrees with `PartialOrd` wherever that is defined.
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Largest integer not exceeding `self`.
    fn floor_i64(&self) -> i64;

    /// Approximate storage size in bits (numerator plus denominator for
    /// exact types, mantissa width for floats).
    fn bit_size(&self) -> u64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer conversion") / Self::from_i64(den).expect("integer conversion")
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn unit_roundoff() -> f64 {
        f64::EPSILON / 2.0
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }

    fn bit_size(&self) -> u64 {
        53
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn unit_roundoff() -> f64 {
        f32::EPSILON as f64 / 2.0
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f32::total_cmp(self, other)
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }

    fn bit_size(&self) -> u64 {
        24
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn unit_roundoff() -> f64 {
        0.0
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor out of i64 range")
    }

    fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for QuadSurd {
    const EXACT: bool = true;

    fn unit_roundoff() -> f64 {
        0.0
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn floor_i64(&self) -> i64 {
        self.floor()
    }

    fn bit_size(&self) -> u64 {
        self.bit_size()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        QuadSurd::from(Rational::from_ratio(num, den))
    }
}

/// Wrapper giving any scalar a total order, for use as a map key.
#[derive(Clone, Debug)]
pub struct Key<S>(pub S);

impl<S: Scalar> PartialEq for Key<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Key<S> {}

impl<S: Scalar> PartialOrd for Key<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Key<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Converts a scalar of one backend into `f64`-based parameters.
pub fn to_f64<S: Scalar>(x: &S) -> f64 {
    x.approx()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_floor_and_ratio() {
        let x = Rational::from_ratio(-7, 2);
        assert_eq!(x.floor_i64(), -4);
        assert_eq!(Rational::from_ratio(6, 3).floor_i64(), 2);
        assert_eq!(<f64 as Scalar>::from_ratio(1, 4), 0.25);
    }

    #[test]
    fn key_orders_floats_totally() {
        let mut v = vec![Key(0.5f64), Key(-1.0), Key(0.25)];
        v.sort();
        assert_eq!(v.iter().map(|k| k.0).collect::<Vec<_>>(), vec![-1.0, 0.25, 0.5]);
    }
}
