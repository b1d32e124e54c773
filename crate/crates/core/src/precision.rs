use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Guard digits carried on top of the requested working precision.
pub const GUARD_DIGITS: u32 = 15;

/// Working precision and tolerances threaded through every numeric routine.
///
/// `digits` only affects [`crate::Mp`] computations; `f64` instantiations
/// run at hardware precision regardless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub digits: u32,
    pub tail_tol: f64,
    pub quad_tol: f64,
}

impl PrecisionContext {
    pub fn new(digits: u32, tail_tol: f64, quad_tol: f64) -> Result<Self> {
        if digits < 30 {
            return domain(format!("digits must be at least 30, got {digits}"));
        }
        for (name, t) in [("tail_tol", tail_tol), ("quad_tol", quad_tol)] {
            if !(t > 0.0 && t < 1e-5) {
                return domain(format!("{name} must lie in (0, 1e-5), got {t:e}"));
            }
        }
        Ok(Self { digits, tail_tol, quad_tol })
    }

    /// `digits` with `tail_tol = 10^-digits` and `quad_tol = 10^-min(digits-5, 20)`.
    pub fn with_digits(digits: u32) -> Result<Self> {
        let qd = (digits as i32 - 5).min(20);
        Self::new(digits, 10f64.powi(-(digits as i32)), 10f64.powi(-qd))
    }

    /// Bits used for internal evaluation, guard digits included.
    pub fn bits(&self) -> u32 {
        ((self.digits + GUARD_DIGITS) as f64 * std::f64::consts::LOG2_10).ceil() as u32
    }

    /// Same tolerances, `extra` more working digits.
    pub fn with_extra_digits(&self, extra: u32) -> Self {
        Self { digits: self.digits + extra, ..*self }
    }

    pub fn with_quad_tol(&self, quad_tol: f64) -> Self {
        Self { quad_tol, ..*self }
    }

    pub fn real<T: Real>(&self, x: f64) -> T {
        T::from_f64_p(x, self.bits())
    }

    pub fn parse<T: Real>(&self, s: &str) -> Result<T> {
        match T::parse_p(s, self.bits()) {
            Some(v) => Ok(v),
            None => domain(format!("cannot parse number {s:?}")),
        }
    }

    pub fn ratio<T: Real>(&self, num: i64, den: i64) -> T {
        T::ratio(num, den, self.bits())
    }

    pub fn pi<T: Real>(&self) -> T {
        T::pi_p(self.bits())
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { digits: 40, tail_tol: 1e-40, quad_tol: 1e-20 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_digits_and_loose_tolerances() {
        assert!(PrecisionContext::new(20, 1e-30, 1e-12).is_err());
        assert!(PrecisionContext::new(40, 1e-3, 1e-12).is_err());
        assert!(PrecisionContext::new(40, 1e-30, 0.0).is_err());
        assert!(PrecisionContext::new(40, 1e-30, 1e-12).is_ok());
    }

    #[test]
    fn bits_include_guard_digits() {
        let c = PrecisionContext::default();
        assert_eq!(c.bits(), 183);
        assert!(c.with_extra_digits(10).bits() > c.bits());
    }
}
