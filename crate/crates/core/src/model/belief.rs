//! Beliefs about the seller's binary signal.

use crate::error::Error;
use serde::{Deserialize, Serialize};

/// A probability that the seller's signal is `h`.
///
/// The newtype guards the unit-interval invariant at API boundaries; numeric
/// kernels work on the raw `f64`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Belief(f64);

impl Belief {
    /// Wrap a probability, rejecting anything outside `[0, 1]`.
    pub fn new(value: f64) -> Result<Self, Error> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Belief(value))
        } else {
            Err(Error::invalid("belief", format!("{value} is not in [0, 1]")))
        }
    }

    /// Wrap a value that is within floating-point noise of `[0, 1]`,
    /// clamping it. Panics on values that are off by more than 1e-9.
    pub fn clamped(value: f64) -> Self {
        assert!(
            value > -1e-9 && value < 1.0 + 1e-9,
            "belief {value} is not within rounding noise of [0, 1]"
        );
        Belief(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(Belief::new(-0.1).is_err());
        assert!(Belief::new(1.1).is_err());
        assert!(Belief::new(f64::NAN).is_err());
        assert!(Belief::new(0.0).is_ok());
        assert!(Belief::new(1.0).is_ok());
    }

    #[test]
    fn clamps_rounding_noise() {
        assert_eq!(Belief::clamped(-1e-12).value(), 0.0);
        assert_eq!(Belief::clamped(1.0 + 1e-12).value(), 1.0);
    }
}
