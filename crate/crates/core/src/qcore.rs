//! q-Pochhammer symbols, q-exponentials, the theta function and the
//! modified exponential kernel `E_q`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::precision::PrecisionContext;
use crate::scalar::{ComplexExt, Real};

/// Default upper limit for `q` in [`c_q`]; the constant diverges as `q → 1`.
pub const DEFAULT_Q_MAX: f64 = 0.999;

/// The base `q`, with `0 < |q| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QBase<T: Real> {
    pub q: Complex<T>,
    pub is_real_unit_interval: bool,
}

impl<T: Real> QBase<T> {
    pub fn real(q: T) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return domain(format!("q must lie in (0,1), got {q}"));
        }
        Ok(Self { q: Complex::real(q), is_real_unit_interval: true })
    }

    pub fn complex(q: Complex<T>) -> Result<Self> {
        let m = q.cabs();
        if !(m > T::zero() && m < T::one()) {
            return domain(format!("|q| must lie in (0,1), got {m}"));
        }
        let flag = q.im.is_zero() && q.re > T::zero();
        Ok(Self { q, is_real_unit_interval: flag })
    }

    pub fn parse(s: &str, ctx: &PrecisionContext) -> Result<Self> {
        Self::real(ctx.parse(s)?)
    }

    /// `q` as a real number; errors for complex `q`.
    pub fn real_q(&self) -> Result<T> {
        if self.is_real_unit_interval {
            Ok(self.q.re.clone())
        } else {
            domain("operation requires real q in (0,1)")
        }
    }

    /// `λ = -ln q > 0`.
    pub fn lambda(&self) -> Result<T> {
        Ok(-self.real_q()?.ln())
    }

    pub fn ln_q(&self) -> Complex<T> {
        self.q.cln()
    }

    pub fn abs_f64(&self) -> f64 {
        self.q.cabs().to_f64()
    }

    /// `q^x` for real `q` and complex exponent.
    pub fn pow(&self, x: &Complex<T>) -> Complex<T> {
        (x.clone() * self.ln_q()).cexp()
    }

    pub fn powi(&self, n: i64) -> Complex<T> {
        self.q.cpowi(n)
    }
}

/// A point on the Riemann surface of the logarithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint<T: Real> {
    pub modulus: T,
    pub arg: T,
}

impl<T: Real> SurfacePoint<T> {
    pub fn new(modulus: T, arg: T) -> Result<Self> {
        if !(modulus > T::zero()) || !modulus.is_finite() {
            return domain(format!("surface point needs a positive finite modulus, got {modulus}"));
        }
        Ok(Self { modulus, arg })
    }

    /// Principal-sheet point for a nonzero complex number.
    pub fn from_complex(z: &Complex<T>) -> Result<Self> {
        Self::new(z.cabs(), z.carg())
    }

    pub fn value(&self) -> Complex<T> {
        Complex::from_polar_t(&self.modulus, &self.arg)
    }

    /// `ln z` with the unreduced argument.
    pub fn ln(&self) -> Complex<T> {
        Complex::new(self.modulus.ln(), self.arg.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { modulus: self.modulus.clone() * s.clone(), arg: self.arg.clone() }
    }

    pub fn rotate(&self, theta: &T) -> Self {
        Self { modulus: self.modulus.clone(), arg: self.arg.clone() + theta.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            modulus: self.modulus.clone() * other.modulus.clone(),
            arg: self.arg.clone() + other.arg.clone(),
        }
    }

    pub fn inv(&self) -> Self {
        Self { modulus: T::one() / self.modulus.clone(), arg: -self.arg.clone() }
    }

    pub fn powc(&self, e: &Complex<T>) -> Complex<T> {
        (e.clone() * self.ln()).cexp()
    }
}

pub(crate) fn eps_of<T: Real>(x: &T) -> f64 {
    2f64.powi(-(x.bits() as i32))
}

/// Number of factors `N` with `|a| |q|^N / (1 - |q|) < tol`.
fn tail_count(log10_a: f64, abs_q: f64, tol: f64) -> usize {
    if log10_a == f64::NEG_INFINITY {
        return 0;
    }
    let lq = abs_q.log10();
    let need = log10_a - (1.0 - abs_q).log10() - tol.log10();
    if need <= 0.0 {
        return 1;
    }
    (need / -lq).ceil() as usize + 1
}

/// `(a;q)_∞ = ∏_{n≥0} (1 - a qⁿ)`, truncated by the geometric tail bound.
pub fn qpoch_inf<T: Real>(a: &Complex<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    let n = tail_count(a.log10_abs(), q.abs_f64(), ctx.tail_tol);
    if n > 50_000_000 {
        return Err(Error::NonConvergence("q too close to the unit circle".into()));
    }
    let one = Complex::<T>::one();
    let mut p = one.clone();
    let mut t = a.clone();
    for _ in 0..n {
        p = p * (one.clone() - t.clone());
        t = t * q.q.clone();
    }
    Ok(p)
}

/// Finite product `(a;q)_n`.
pub fn qpoch_n<T: Real>(a: &Complex<T>, q: &QBase<T>, n: usize) -> Complex<T> {
    let one = Complex::<T>::one();
    let mut p = one.clone();
    let mut t = a.clone();
    for _ in 0..n {
        p = p * (one.clone() - t.clone());
        t = t * q.q.clone();
    }
    p
}

/// `(a;q)_ν = (a;q)_∞ / (a q^ν;q)_∞`.
pub fn qpoch_nu<T: Real>(
    a: &Complex<T>,
    nu: &Complex<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<Complex<T>> {
    if nu.im.is_zero() && nu.re >= T::zero() && nu.re.floor() == nu.re && nu.re.to_f64() < 1e6 {
        return Ok(qpoch_n(a, q, nu.re.to_f64() as usize));
    }
    let shifted = a.clone() * q.pow(nu);
    let den = qpoch_inf(&shifted, q, ctx)?;
    if den.log10_abs() < -(ctx.digits as f64) + 2.0 {
        return Err(Error::PoleProximity(format!("(a q^nu; q)_inf vanishes for nu = {nu}")));
    }
    Ok(qpoch_inf(a, q, ctx)? / den)
}

/// `θ_q(τ) = (q, -τ, -q/τ; q)_∞` (Jacobi triple product).
pub fn theta<T: Real>(tau: &Complex<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    if tau.re.is_zero() && tau.im.is_zero() {
        return domain("theta is undefined at tau = 0");
    }
    let p1 = qpoch_inf(&q.q, q, ctx)?;
    let p2 = qpoch_inf(&(-tau.clone()), q, ctx)?;
    let p3 = qpoch_inf(&(-(q.q.clone() / tau.clone())), q, ctx)?;
    Ok(p1 * p2 * p3)
}

/// Bilateral series `Σ_{n∈ℤ} q^{n(n-1)/2} τⁿ`.
pub fn theta_series<T: Real>(tau: &Complex<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    if tau.re.is_zero() && tau.im.is_zero() {
        return domain("theta is undefined at tau = 0");
    }
    let one = Complex::<T>::one();
    let mut s = one.clone();
    let tau_inv = tau.cinv();
    // n ≥ 1: t_n = t_{n-1} q^{n-1} τ;  n ≤ -1: t_{-m} = t_{-m+1} q^m τ^{-1}
    for (step, q_start) in [(tau.clone(), one.clone()), (tau_inv, q.q.clone())] {
        let mut term = one.clone();
        let mut qn = q_start;
        let mut peak = 0f64;
        let mut n = 0usize;
        loop {
            term = term * qn.clone() * step.clone();
            qn = qn * q.q.clone();
            n += 1;
            let lt = term.log10_abs();
            peak = peak.max(lt);
            s = s + term.clone();
            if n > 8 && lt < peak + ctx.tail_tol.log10() - 2.0 && qn.log10_abs() + step.log10_abs() < 0.0 {
                break;
            }
            if n > 10_000_000 {
                return Err(Error::NonConvergence("theta series".into()));
            }
        }
    }
    Ok(s)
}

/// `E_q(τ) = exp( (ln τ - ½ ln q)² / (2 ln q) )` from an explicit `ln τ`.
pub fn eq_kernel_ln<T: Real>(ln_tau: &Complex<T>, ln_q: &T) -> Complex<T> {
    let half = T::ratio(1, 2, ln_q.bits());
    let shifted = ln_tau.clone() - Complex::real(ln_q.clone() * half.clone());
    let sq = shifted.clone() * shifted;
    sq.scale_by(&(half / ln_q.clone())).cexp()
}

/// The kernel `E_q(τ)` on the log surface (real `q` only).
pub fn eq_kernel<T: Real>(tau: &SurfacePoint<T>, q: &QBase<T>) -> Result<Complex<T>> {
    let lnq = q.real_q()?.ln();
    Ok(eq_kernel_ln(&tau.ln(), &lnq))
}

/// `e_q(z) = 1/(z;q)_∞`, `|z| < 1`; the product form is returned after a
/// cross-check against `Σ zⁿ/(q;q)_n`.
pub fn qexp_small<T: Real>(z: &Complex<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    if !(z.cabs() < T::one()) {
        return domain("e_q(z) requires |z| < 1");
    }
    let prod = qpoch_inf(z, q, ctx)?.cinv();
    let one = Complex::<T>::one();
    let mut term = one.clone();
    let mut s = one.clone();
    let mut qn = q.q.clone();
    let mut n = 0usize;
    let tol = ctx.tail_tol.log10();
    loop {
        term = term * z.clone() / (one.clone() - qn.clone());
        qn = qn * q.q.clone();
        s = s + term.clone();
        n += 1;
        if term.log10_abs() - s.log10_abs() < tol - 1.0 && n > 4 {
            break;
        }
        if n > 10_000_000 {
            return Err(Error::NonConvergence("e_q series".into()));
        }
    }
    check_agree(&prod, &s, ctx, "e_q product and series disagree")?;
    Ok(prod)
}

/// `E_q(z) = (-z;q)_∞`, cross-checked against `Σ q^{n(n-1)/2} zⁿ/(q;q)_n`.
pub fn qexp_big<T: Real>(z: &Complex<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    let prod = qpoch_inf(&(-z.clone()), q, ctx)?;
    let one = Complex::<T>::one();
    let mut term = one.clone();
    let mut s = one.clone();
    let mut qn = q.q.clone();
    let mut qtri = one.clone();
    let mut n = 0usize;
    let mut peak = 0f64;
    let tol = ctx.tail_tol.log10();
    loop {
        term = term * z.clone() * qtri.clone() / (one.clone() - qn.clone());
        qtri = qtri * q.q.clone();
        qn = qn * q.q.clone();
        s = s + term.clone();
        n += 1;
        let lt = term.log10_abs();
        peak = peak.max(lt);
        if n > 4 && lt < peak.max(s.log10_abs()) + tol - 1.0 && (qtri.clone() * z.clone()).log10_abs() < 0.0 {
            break;
        }
        if n > 10_000_000 {
            return Err(Error::NonConvergence("E_q series".into()));
        }
    }
    check_agree(&prod, &s, ctx, "E_q product and series disagree")?;
    Ok(prod)
}

fn check_agree<T: Real>(a: &Complex<T>, b: &Complex<T>, ctx: &PrecisionContext, what: &str) -> Result<()> {
    let scale = a.log10_abs().max(b.log10_abs());
    let diff = (a.clone() - b.clone()).log10_abs() - scale;
    let tol = (10.0 * ctx.tail_tol).max(1e6 * eps_of(&a.re)).log10();
    if diff > tol {
        return Err(Error::NonConvergence(format!("{what} (rel. diff 1e{diff:.1})")));
    }
    Ok(())
}

/// Both sides of the q-binomial theorem at `|z| < 1`: returns
/// `(Σ (a;q)_n/(q;q)_n zⁿ, (az;q)_∞/(z;q)_∞)`.
pub fn qbinomial<T: Real>(
    a: &Complex<T>,
    z: &Complex<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<(Complex<T>, Complex<T>)> {
    if !(z.cabs() < T::one()) {
        return domain("q-binomial series requires |z| < 1");
    }
    let one = Complex::<T>::one();
    let mut term = one.clone();
    let mut s = one.clone();
    let mut aq = a.clone();
    let mut qn = q.q.clone();
    let tol = ctx.tail_tol.log10();
    let mut n = 0usize;
    loop {
        term = term * (one.clone() - aq.clone()) / (one.clone() - qn.clone()) * z.clone();
        aq = aq * q.q.clone();
        qn = qn * q.q.clone();
        s = s + term.clone();
        n += 1;
        if n > 4 && term.log10_abs() - s.log10_abs() < tol - 1.0 {
            break;
        }
        if n > 10_000_000 {
            return Err(Error::NonConvergence("q-binomial series".into()));
        }
    }
    let prod = qpoch_inf(&(a.clone() * z.clone()), q, ctx)? / qpoch_inf(z, q, ctx)?;
    Ok((s, prod))
}

/// `Σ_{n≥1} cos(2πn x/ln q) / (n sinh(2π²n/ln q))`, the q-periodic part of
/// the large-argument formulas.
fn periodic_sum<T: Real>(x: &Complex<T>, lnq: &T, ctx: &PrecisionContext) -> Complex<T> {
    let b = ctx.bits();
    let pi = T::pi_p(b);
    let two_pi = pi.clone() * T::int(2);
    let mut s = Complex::<T>::zero();
    let tol = ctx.tail_tol.log10() - 2.0;
    let mut n = 1i64;
    loop {
        let nn = T::int(n);
        let arg = x.scale_by(&(two_pi.clone() * nn.clone() / lnq.clone()));
        let cosz = {
            let iz = Complex::new(-arg.im.clone(), arg.re.clone());
            let e1 = iz.cexp();
            let e2 = e1.cinv();
            (e1 + e2).scale_by(&T::ratio(1, 2, b))
        };
        let sh_arg = two_pi.clone() * pi.clone() * nn.clone() / lnq.clone();
        let e = sh_arg.exp();
        let sinh = (e.clone() - T::one() / e) / T::int(2);
        let term = cosz.scale_by(&(T::one() / (nn * sinh)));
        let lt = term.log10_abs();
        s = s + term;
        if lt < s.log10_abs().max(0.0) + tol || n > 100_000 {
            break;
        }
        n += 1;
    }
    s
}

/// Relative discrepancy of the large-`z` formula for `(-z;q)_∞`, `z > 1`.
pub fn large_z_check<T: Real>(z: &T, q: &QBase<T>, ctx: &PrecisionContext) -> Result<f64> {
    if !(*z > T::one()) {
        return domain("large_z_check requires z > 1");
    }
    let qr = q.real_q()?;
    let b = ctx.bits();
    let lnq = qr.ln();
    let lnz = z.ln();
    let lhs = qpoch_inf(&Complex::real(-z.clone()), q, ctx)?;
    let pi = T::pi_p(b);
    let mut expo = -(lnz.clone() * lnz.clone() / T::int(2) + pi.clone() * pi / T::int(6)) / lnq.clone();
    let per = periodic_sum(&Complex::real(lnz.clone()), &lnq, ctx);
    expo = expo + per.re;
    let pref = (-lnq.clone() / T::int(12)).exp() * z.sqrt();
    let den = qpoch_inf(&Complex::real(-qr / z.clone()), q, ctx)?;
    let rhs = Complex::real(pref * expo.exp()) / den;
    Ok(10f64.powf((lhs.clone() - rhs).log10_abs() - lhs.log10_abs()))
}

/// Checks that `θ_q(τ) E_q(τ)` is q-periodic and equals its closed form;
/// returns the largest relative discrepancy.
pub fn qperiodic_check<T: Real>(tau: &SurfacePoint<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<f64> {
    let qr = q.real_q()?;
    let lnq = qr.ln();
    let f = |p: &SurfacePoint<T>| -> Result<Complex<T>> {
        Ok(theta(&p.value(), q, ctx)? * eq_kernel_ln(&p.ln(), &lnq))
    };
    let base = f(tau)?;
    let shifted = f(&tau.scale(&qr))?;
    let b = ctx.bits();
    let pi = T::pi_p(b);
    let per = periodic_sum(&tau.ln(), &lnq, ctx);
    let expo = per + Complex::real(-(pi.clone() * pi) / (T::int(6) * lnq.clone()));
    let pref = (lnq.clone() / T::int(24)).exp();
    let closed = expo.cexp().scale_by(&pref) * qpoch_inf(&q.q, q, ctx)?;
    let scale = base.log10_abs();
    let d1 = (base.clone() - shifted).log10_abs() - scale;
    let d2 = (base - closed).log10_abs() - scale;
    Ok(10f64.powf(d1.max(d2)))
}

/// `C_q = 1/√(-2π ln q)` for real `q ∈ (0, q_max]`.
pub fn c_q_with_max<T: Real>(q: &QBase<T>, q_max: f64, ctx: &PrecisionContext) -> Result<T> {
    let qr = q.real_q()?;
    if qr.to_f64() > q_max {
        return domain(format!("C_q diverges as q -> 1; q = {qr} exceeds q_max = {q_max}"));
    }
    let pi = T::pi_p(ctx.bits());
    Ok(T::one() / (-(pi * T::int(2)) * qr.ln()).sqrt())
}

pub fn c_q<T: Real>(q: &QBase<T>, ctx: &PrecisionContext) -> Result<T> {
    c_q_with_max(q, DEFAULT_Q_MAX, ctx)
}
