//! Complementary error function of complex argument at working precision.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Real};

const LN10: f64 = std::f64::consts::LN_10;

/// Digits lost to cancellation when `erfc(z)` is summed from the Maclaurin
/// series of `erf`: the terms reach `e^{|z|²}` while the result is near
/// `e^{-Re z²}`.
fn series_loss_digits(x: f64, y: f64) -> f64 {
    ((x * x + y * y) + (x * x - y * y).max(0.0)) / LN10
}

/// `erfc(z)` to the precision of `z`.
pub fn erfc<T: Real>(z: &Complex<T>) -> Result<Complex<T>> {
    let bits = z.re.bits().max(z.im.bits());
    let (x, y) = (z.re.to_f64(), z.im.to_f64());
    if x < 0.0 {
        let two = Complex::real(T::int(2).with_bits(bits));
        return Ok(two - erfc(&-z.clone())?);
    }
    let loss = series_loss_digits(x, y);
    if loss > 200.0 || (x * x + y * y > 400.0 && x > 0.5 * y.abs()) {
        erfc_cf(z, bits)
    } else {
        erfc_series(z, bits, loss)
    }
}

/// `w(z) = e^{-z²} erfc(-iz)`.
pub fn faddeeva<T: Real>(z: &Complex<T>) -> Result<Complex<T>> {
    let mi = Complex::new(z.im.clone(), -z.re.clone());
    Ok((-(z.clone() * z.clone())).cexp() * erfc(&mi)?)
}

/// `1 - (2/√π) Σ (-1)^n z^{2n+1} / (n!(2n+1))` with guard digits.
pub fn erfc_series<T: Real>(z: &Complex<T>, bits: u32, loss_digits: f64) -> Result<Complex<T>> {
    if z.re.is_zero() && z.im.is_zero() {
        return Ok(Complex::<T>::one().with_bits(bits));
    }
    let wb = bits + ((loss_digits + 10.0) * 3.33) as u32;
    let zw = z.with_bits(wb);
    let z2 = zw.clone() * zw.clone();
    let mut term = zw.clone();
    let mut sum = zw.clone();
    let tol = -(wb as f64) * 0.30103;
    let mut peak = term.log10_abs();
    for n in 1..1_000_000i64 {
        term = -(term * z2.clone()) / T::int(n);
        let t = term.clone() / T::int(2 * n + 1);
        let lt = t.log10_abs();
        peak = peak.max(lt);
        sum = sum + t;
        if lt < peak + tol && (n as f64) > z2.cabs().to_f64() {
            let two_over_sqrt_pi = T::int(2) / T::pi_p(wb).sqrt();
            let one = Complex::<T>::one().with_bits(wb);
            return Ok((one - sum.scale_by(&two_over_sqrt_pi)).with_bits(bits));
        }
    }
    Err(Error::NonConvergence("erf series".into()))
}

/// Laplace continued fraction `erfc(z) = e^{-z²}/√π · 1/(z + ½/(z + 1/(z + 3/2/(z + …))))`,
/// evaluated by the modified Lentz method; requires `Re z > 0`.
pub fn erfc_cf<T: Real>(z: &Complex<T>, bits: u32) -> Result<Complex<T>> {
    let wb = bits + 20;
    let zw = z.with_bits(wb);
    let tiny = Complex::real(T::from_f64_p(1e-300, wb) * T::from_f64_p(1e-300, wb));
    let one = Complex::<T>::one().with_bits(wb);
    let is_zero = |c: &Complex<T>| c.re.is_zero() && c.im.is_zero();
    let mut f = zw.clone();
    let mut cc = f.clone();
    let mut d = Complex::<T>::zero();
    let tol = -(wb as f64) * 0.30103 + 2.0;
    for n in 1..2_000_000i64 {
        let a = Complex::real(T::ratio(n, 2, wb));
        d = zw.clone() + a.clone() * d;
        if is_zero(&d) {
            d = tiny.clone();
        }
        cc = zw.clone() + a / cc;
        if is_zero(&cc) {
            cc = tiny.clone();
        }
        d = d.cinv();
        let delta = cc.clone() * d.clone();
        f = f * delta.clone();
        if (delta - one.clone()).log10_abs() < tol {
            let pref = (-(zw.clone() * zw.clone())).cexp().scale_by(&(T::one() / T::pi_p(wb).sqrt()));
            return Ok((pref / f).with_bits(bits));
        }
    }
    Err(Error::NonConvergence("erfc continued fraction".into()))
}
