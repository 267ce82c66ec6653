//! Scalar abstraction for weights on groups: `f64` for large instances,
//! exact rationals where identities are checked with zero tolerance.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::AddAssign;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive};

/// Float tolerance used wherever an exact scalar is not available.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Weight:
    num_traits::Num + Signed + Clone + PartialOrd + Debug + Send + Sync + for<'a> AddAssign<&'a Self> + Sum + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality up to the scalar's native tolerance.
    fn approx_eq(&self, other: &Self) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= FLOAT_TOLERANCE
        }
    }

    /// `a <= b` up to the scalar's native tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        if Self::EXACT {
            self <= other
        } else {
            self.to_f64() <= other.to_f64() + FLOAT_TOLERANCE
        }
    }
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-5
    }

    fn le_tol(&self, other: &Self) -> bool {
        *self <= *other + 1e-5
    }
}

impl Weight for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Huge numerators/denominators: divide after scaling.
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
}

impl Weight for Ratio<i128> {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Convenience: weight from an unsigned count.
pub fn from_count<W: Weight>(n: u64) -> W {
    W::from_ratio(n as i64, 1)
}
