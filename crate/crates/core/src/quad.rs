//! Trapezoidal quadrature on the whole real line for integrands that decay
//! like a Gaussian. The rule converges geometrically in `1/h` for functions
//! analytic in a strip, so halving the step and comparing gives an honest
//! error estimate.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Real};

/// Maximum number of step halvings after the initial rule.
pub const MAX_HALVINGS: usize = 4;

#[derive(Debug, Clone)]
pub struct QuadResult<T: Real> {
    pub value: Complex<T>,
    pub err: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone)]
pub struct LineRule {
    /// Peak location.
    pub center: f64,
    /// Initial step.
    pub h: f64,
    /// Nodes on each side that are always evaluated.
    pub min_half_width: f64,
    /// Relative size below which the integrand counts as negligible.
    pub cutoff_log10: f64,
    pub tol: f64,
}

/// `∫_{-∞}^{∞} f(u) du` by the trapezoidal rule with step halving until two
/// successive steps agree to `tol` relative to the value.
pub fn trapezoid_line<T, F>(f: F, rule: &LineRule, bits: u32) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(&T) -> Result<Complex<T>>,
{
    let c = T::from_f64_p(rule.center, bits);
    let h0 = T::from_f64_p(rule.h, bits);
    let at = |k: i64, frac: Option<(usize, &T)>| -> Result<Complex<T>> {
        let x = match frac {
            None => c.clone() + h0.clone() * T::int(k),
            Some((j, h)) => c.clone() + h0.clone() * T::int(k) + h.clone() * (T::int(2 * j as i64 + 1) / T::int(2)),
        };
        f(&x)
    };
    // Initial rule; walk outward until the integrand is negligible.
    let mut sum = at(0, None)?;
    let mut peak = sum.log10_abs();
    let mut nodes = 1usize;
    let mut lo = 0i64;
    let mut hi = 0i64;
    for dir in [1i64, -1] {
        let mut k = dir;
        let mut quiet = 0;
        loop {
            let v = at(k, None)?;
            nodes += 1;
            let lv = v.log10_abs();
            peak = peak.max(lv);
            sum = sum + v;
            let beyond = (k as f64 * rule.h).abs() >= rule.min_half_width;
            if beyond && lv < peak + rule.cutoff_log10 {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 3 {
                break;
            }
            if k.unsigned_abs() > 200_000 {
                return Err(Error::NonConvergence("integrand does not decay along the ray".into()));
            }
            k += dir;
        }
        if dir > 0 {
            hi = k;
        } else {
            lo = k;
        }
    }
    let mut value = sum.scale_by(&h0);
    let mut h = h0.clone();
    let mut count = (hi - lo) as usize;
    for _ in 0..MAX_HALVINGS {
        let mut mid = Complex::<T>::zero();
        for j in 0..count {
            mid = mid + at(lo, Some((j, &h)))?;
        }
        nodes += count;
        let new_value = (value.clone() + mid.scale_by(&h)).scale_by(&T::ratio(1, 2, bits));
        let diff = (new_value.clone() - value.clone()).log10_abs() - new_value.log10_abs().max(peak - 40.0);
        value = new_value;
        h = h / T::int(2);
        count *= 2;
        if diff < rule.tol.log10() {
            let err = 10f64.powf(diff) * abs_val(&value);
            return Ok(QuadResult { value, err, nodes });
        }
    }
    Err(Error::NonConvergence(format!("trapezoid rule did not reach tol {} after {MAX_HALVINGS} halvings", rule.tol)))
}

fn abs_val<T: Real>(z: &Complex<T>) -> f64 {
    10f64.powf(z.log10_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        let rule = LineRule { center: 0.3, h: 0.7, min_half_width: 3.0, cutoff_log10: -25.0, tol: 1e-14 };
        let r = trapezoid_line(|x: &f64| Ok(Complex::new((-(x - 0.3).powi(2) / 0.5).exp(), 0.0)), &rule, 53).unwrap();
        let exact = (0.5f64 * std::f64::consts::PI).sqrt();
        assert!((r.value.re - exact).abs() < 1e-13);
    }
}
