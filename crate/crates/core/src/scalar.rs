//! Floating-point abstraction shared by the weighting, classifier and
//! evaluation code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used for term weights, model parameters and metrics.
///
/// Implemented for `f32` and `f64`. Counts stay integral everywhere; they are
/// lifted into the scalar type only at the point where a formula needs them.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly
    /// rounded) in both supported types, so this never fails.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal converts to scalar")
    }

    /// Lifts a count into the scalar type.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count converts to scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_and_counts() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::count(7), 7.0f32);
        assert_eq!(1.5f32.as_f64(), 1.5);
    }
}
