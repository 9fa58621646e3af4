//! The exact integer ring every computation in this crate is generic over.
//!
//! Anything that behaves like `Z` works: `i64` and `i128` for fast sweeps
//! over small coordinates, [`num_bigint::BigInt`] when entries may grow.
//! Rational intermediates use [`num_rational::Ratio`] over the same ring.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact integer type.
pub trait Scalar:
    Clone + Debug + Display + Hash + Ord + Integer + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn of(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("scalar type cannot hold an i64")
    }

    /// Parses a decimal integer literal.
    fn parse_decimal(s: &str) -> Option<Self> {
        Self::from_str_radix(s, 10).ok()
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Hash + Ord + Integer + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Rational numbers over a scalar ring.
pub type Rational<S> = Ratio<S>;

/// Returns the integer value of `q` if it has denominator one.
pub fn as_integer<S: Scalar>(q: &Rational<S>) -> Option<S> {
    if q.is_integer() {
        Some(q.to_integer())
    } else {
        None
    }
}
