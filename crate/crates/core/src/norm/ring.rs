//! Integer types the norm kernels run on. Values are scaled so that every
//! weight and every vector entry is an integer; the narrowest type whose range
//! covers an a-priori bound on all intermediate sums is picked at run time.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

pub trait Ring:
    Clone
    + Ord
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    /// Panics when `b` does not fit; callers check the magnitude bound first.
    fn from_big(b: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Ring for i64 {
    fn zero() -> Self {
        0
    }
    fn from_big(b: &BigInt) -> Self {
        b.to_i64().expect("value fits in i64")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ring for i128 {
    fn zero() -> Self {
        0
    }
    fn from_big(b: &BigInt) -> Self {
        b.to_i128().expect("value fits in i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_big(b: &BigInt) -> Self {
        b.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    I64,
    I128,
    Big,
}

/// Narrowest width that holds every integer of absolute value at most `bound`
/// with headroom for one further addition.
pub fn width_for(bound: &BigInt) -> Width {
    let bits = bound.bits();
    if bits <= 61 {
        Width::I64
    } else if bits <= 125 {
        Width::I128
    } else {
        Width::Big
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(width_for(&BigInt::from(1u64 << 60)), Width::I64);
        assert_eq!(width_for(&BigInt::from(1u64 << 62)), Width::I128);
        assert_eq!(width_for(&(BigInt::from(1) << 200)), Width::Big);
    }

    #[test]
    fn round_trip() {
        let b = BigInt::from(-12345);
        assert_eq!(<i64 as Ring>::from_big(&b).to_big(), b);
        assert_eq!(<i128 as Ring>::from_big(&b).to_big(), b);
        assert_eq!(Ring::abs(&-5i64), 5);
    }
}
