//! Scalar abstraction for box geometry and matching.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Numeric type usable for box coordinates, IoU values and assignment
/// weights.
///
/// Only field arithmetic and ordering are required, so exact rationals
/// qualify alongside `f32`/`f64`.
pub trait Scalar: Num + PartialOrd + Copy + Debug {
    /// Exact conversion from a small integer.
    fn from_i32(value: i32) -> Self;

    /// Lossy view used for reporting.
    fn to_f64(self) -> f64;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f32 {
    fn from_i32(value: i32) -> Self {
        value as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_i32(value: i32) -> Self {
        value as f64
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for Ratio<i64> {
    fn from_i32(value: i32) -> Self {
        Ratio::from_integer(value as i64)
    }

    fn to_f64(self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }
}
