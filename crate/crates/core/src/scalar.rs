//! Numeric scalar abstraction.
//!
//! Mechanism logic is ordinal. Numbers only appear in the price ladder, in
//! scoring-based policies and in Bayesian expected utilities, and those parts
//! are generic over [`Scalar`] so that the same code runs on `f64` and on exact
//! rationals.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Ordered field-like scalar usable for prices, scores and probabilities.
pub trait Scalar:
    Num + PartialOrd + Clone + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn is_non_negative(&self) -> bool {
        *self >= Self::zero()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for Ratio<i64> {}
impl Scalar for Ratio<i128> {}

/// Converts an `f64` to the scalar type, failing on NaN or unrepresentable input.
pub fn from_f64<S: Scalar>(value: f64) -> Option<S> {
    if value.is_finite() {
        S::from_f64(value)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn rationals_convert_from_binary_fractions_exactly() {
        let q: Rational64 = from_f64(0.25).unwrap();
        assert_eq!(q, Rational64::new(1, 4));
        assert!(from_f64::<f64>(f64::NAN).is_none());
    }

    #[test]
    fn sign_check() {
        assert!(0.0f64.is_non_negative());
        assert!(!Rational64::new(-1, 3).is_non_negative());
    }
}
