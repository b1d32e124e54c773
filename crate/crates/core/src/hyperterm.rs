//! The q-hyperterminant
//! `F_q(z; N, σ) = σ^{1-N} C_q ∫₀^∞ t^{N-1} E_q(t) / (t + σz) dt`.
//!
//! With `t = e^v` the integrand is `q^{-N(N-1)/2}` times a Gaussian centred
//! at `v* = (N - ½)|ln q|` divided by `e^v + σz`. Quadrature runs along
//! `Im v = φ`. When a pole of `1/(e^v + σz)` is close to that line, its
//! principal part is subtracted and integrated against the Gaussian in
//! closed form with `erfc`. Other sheets of `z` are reached by rotating `φ`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::precision::PrecisionContext;
use crate::qcore::{c_q, eq_kernel_ln, QBase, SurfacePoint};
use crate::qlaplace::{initial_step, SummedValue};
use crate::quad::{trapezoid_line, LineRule};
use crate::scalar::{abs_f64, ComplexExt, Real};
use crate::special::erfc;

const PI: f64 = std::f64::consts::PI;
const LN10: f64 = std::f64::consts::LN_10;

/// Angular distance from pole to ray below which the pole is subtracted.
pub const SUBTRACT_BELOW: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct HyperArgs<T: Real> {
    pub z: SurfacePoint<T>,
    pub n: Complex<T>,
    pub sigma: Complex<T>,
}

impl<T: Real> HyperArgs<T> {
    pub fn new(z: SurfacePoint<T>, n: Complex<T>, sigma: Complex<T>) -> Self {
        Self { z, n, sigma }
    }

    /// `ln σ + ln z`, with `ln σ` principal and `ln z` on the log surface.
    pub fn ln_sigma_z(&self) -> Complex<T> {
        self.sigma.cln() + self.z.ln()
    }

    fn with_z(&self, z: SurfacePoint<T>) -> Self {
        Self { z, ..self.clone() }
    }
}

fn cexp_of<T: Real>(x: Complex<T>) -> Complex<T> {
    x.cexp()
}

/// `q^x` for complex `x`, real `q`.
fn qpow<T: Real>(x: &Complex<T>, ln_q: &T) -> Complex<T> {
    cexp_of(x.scale_by(ln_q))
}

/// Quadrature along `arg t = φ`; valid while `|arg(σz) - φ| < π`.
pub fn fq_on_ray<T: Real>(args: &HyperArgs<T>, phi: f64, q: &QBase<T>, ctx: &PrecisionContext) -> Result<SummedValue<T>> {
    let lam = q.lambda()?.to_f64();
    let lnsz0 = args.ln_sigma_z();
    let theta = lnsz0.im.to_f64();
    if (theta - phi).abs() >= PI {
        return domain(format!("arg(sigma z) = {theta} is not within pi of the ray angle {phi}"));
    }
    let dist = PI - (theta - phi).abs();
    let subtract = dist < SUBTRACT_BELOW;
    let im_ustar = args.n.im.to_f64() * lam;
    let amp = (phi - im_ustar).powi(2) / (2.0 * lam) / LN10;
    let cancel = if subtract { (-dist.log10()).max(0.0) } else { 0.0 };
    let wctx = ctx.with_extra_digits((amp + cancel + 5.0).ceil() as u32);
    let bits = wctx.bits();
    let qr = q.real_q()?.with_bits(bits);
    let ln_q = qr.ln();
    let lam_t = -ln_q.clone();
    let n = args.n.with_bits(bits);
    let half = T::ratio(1, 2, bits);
    let one = Complex::<T>::one().with_bits(bits);
    let ustar = (n.clone() - Complex::real(half.clone())).scale_by(&lam_t);
    let ln_sigma = args.sigma.with_bits(bits).cln();
    let lnsz = ln_sigma.clone() + args.z.ln().with_bits(bits);
    let sz = lnsz.cexp();
    let qb = QBase::real(qr.clone())?;
    let cq = c_q(&qb, &wctx)?;
    // σ^{1-N} C_q q^{-N(N-1)/2}
    let pref = cexp_of((one.clone() - n.clone()) * ln_sigma.clone())
        .scale_by(&cq)
        * qpow(&(-(n.clone() * (n.clone() - one.clone())).scale_by(&half)), &ln_q);
    let pi_t = T::pi_p(bits);
    let ipi = Complex::new(T::zero(), pi_t.clone());
    let v_p = if theta > phi { lnsz.clone() - ipi.clone() } else { lnsz.clone() + ipi.clone() };
    let r = -sz.cinv();
    let phi_t = T::from_f64_p(phi, bits);
    let inv_two_lam = T::one() / (lam_t.clone() * T::int(2));
    let f = |u: &T| -> Result<Complex<T>> {
        let v = Complex::new(u.clone(), phi_t.clone());
        let x = v.clone() - ustar.clone();
        let g = (-(x.clone() * x)).scale_by(&inv_two_lam).cexp();
        let mut d = (v.cexp() + sz.clone()).cinv();
        if subtract {
            d = d - r.clone() / (v - v_p.clone());
        }
        Ok(g * d)
    };
    let strip = if subtract { PI + (theta - phi).abs() } else { dist };
    let digits = wctx.digits as f64;
    let rule = LineRule {
        center: ustar.re.to_f64(),
        h: initial_step(lam, strip, digits, 0),
        min_half_width: 6.0 * lam.sqrt(),
        cutoff_log10: -(digits + 5.0) - amp,
        tol: ctx.quad_tol,
    };
    let quad = trapezoid_line(f, &rule, bits)?;
    let mut total = quad.value.clone();
    if subtract {
        let s2l = (lam_t.clone() * T::int(2)).sqrt();
        let c = (phi_t.clone() - ustar.im.clone()) / s2l.clone();
        let zeta = (v_p - ustar.clone()).scale_by(&(T::one() / s2l));
        total = total - r * line_cauchy_gauss(&zeta, &c)?;
    }
    let value = (pref.clone() * total).with_bits(ctx.bits());
    let err = quad.err * abs_f64(&pref);
    Ok(SummedValue { value, err_estimate: err, n_used: quad.nodes, sheet: args.z.clone(), cut_at: None, degraded: subtract })
}

/// `J = ∫ e^{-x²} / (ζ - x) dx` along `Im x = c`.
fn line_cauchy_gauss<T: Real>(zeta: &Complex<T>, c: &T) -> Result<Complex<T>> {
    let bits = zeta.re.bits();
    let pi_t = T::pi_p(bits);
    let ipi = Complex::new(T::zero(), pi_t);
    let e = (-(zeta.clone() * zeta.clone())).cexp();
    let iz = Complex::new(-zeta.im.clone(), zeta.re.clone());
    if zeta.im > *c {
        Ok(-(ipi * e * erfc(&-iz)?))
    } else {
        Ok(ipi * e * erfc(&iz)?)
    }
}

/// `F_q(z; N, σ)` on any sheet: the straight ray for `|arg(σz)| < π`, a
/// rotated ray otherwise. Errors exactly on the Stokes rays `arg(σz) = ±π`.
pub fn fq_eval<T: Real>(args: &HyperArgs<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<SummedValue<T>> {
    let theta = args.ln_sigma_z().im.to_f64();
    if (theta.abs() - PI).abs() < 1e-14 {
        return domain("arg(sigma z) = ±pi: the pole lies on the integration ray");
    }
    let phi = if theta.abs() < PI { 0.0 } else { theta - theta.signum() * PI / 2.0 };
    fq_on_ray(args, phi, q, ctx)
}

/// `Σ_{m<M} (-1)^m σ^{-N-m} z^{-m-1} q^{-(N+m)(N+m-1)/2}`.
pub fn fq_truncated_series<T: Real>(args: &HyperArgs<T>, m_terms: usize, q: &QBase<T>) -> Result<Complex<T>> {
    let ln_q = q.real_q()?.ln();
    let bits = ln_q.bits().max(args.n.re.bits());
    let half = T::ratio(1, 2, bits);
    let ln_sigma = args.sigma.cln();
    let zv = args.z.value();
    let mut s = Complex::<T>::zero();
    for m in 0..m_terms {
        let nm = args.n.clone() + Complex::real(T::int(m as i64));
        let pw = cexp_of(-(nm.clone() * ln_sigma.clone()));
        let qp = qpow(&(-(nm.clone() * (nm - Complex::real(T::int(1)))).scale_by(&half)), &ln_q);
        let t = pw * qp * zv.cpowi(-(m as i64) - 1);
        s = if m % 2 == 0 { s + t } else { s - t };
    }
    Ok(s)
}

/// Relative residual of `F(z;N,σ) − Σ_{m<M}(…) = (−z)^{−M} F(z;N+M,σ)`.
pub fn fq_truncation_check<T: Real>(
    args: &HyperArgs<T>,
    m_terms: usize,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<f64> {
    let f0 = fq_eval(args, q, ctx)?;
    let shifted = HyperArgs { n: args.n.clone() + Complex::real(T::int(m_terms as i64)), ..args.clone() };
    let fm = fq_eval(&shifted, q, ctx)?;
    let lhs = f0.value.clone() - fq_truncated_series(args, m_terms, q)?;
    let rhs = (-args.z.value()).cpowi(-(m_terms as i64)) * fm.value;
    Ok(rel_diff(&lhs, &rhs, &f0.value))
}

fn rel_diff<T: Real>(a: &Complex<T>, b: &Complex<T>, scale: &Complex<T>) -> f64 {
    let s = a.log10_abs().max(b.log10_abs()).max(scale.log10_abs());
    10f64.powf((a.clone() - b.clone()).log10_abs() - s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// σ-entry 1.
    SigmaOne,
    /// N-entry 1.
    NOne,
}

/// Equivalent arguments with `σ = 1` or `N = 1` and the prefactor `p` such
/// that `F(args) = p · F(canonical)`.
pub fn fq_normalize<T: Real>(args: &HyperArgs<T>, route: Normalization, q: &QBase<T>) -> Result<(HyperArgs<T>, Complex<T>)> {
    let ln_q = q.real_q()?.ln();
    let bits = ln_q.bits();
    let half = T::ratio(1, 2, bits);
    let one = Complex::<T>::one();
    let ln_sigma = args.sigma.cln();
    match route {
        Normalization::SigmaOne => {
            let shift = ln_sigma.clone().scale_by(&(T::one() / ln_q.clone()));
            let expo = shift.clone().scale_by(&half) - Complex::real(half.clone());
            let pref = cexp_of(expo * ln_sigma);
            Ok((HyperArgs { z: args.z.clone(), n: args.n.clone() + shift, sigma: one }, pref))
        }
        Normalization::NOne => {
            let nm1 = args.n.clone() - one.clone();
            let nm2 = nm1.clone() - one.clone();
            let pref = cexp_of(-(nm1.clone() * ln_sigma.clone())) * qpow(&(-(nm1.clone() * nm2).scale_by(&half)), &ln_q);
            let sigma = cexp_of(ln_sigma + nm1.scale_by(&ln_q));
            Ok((HyperArgs { z: args.z.clone(), n: one, sigma }, pref))
        }
    }
}

/// Writes `σ = σ₀ q^{-j}` and returns `(z; N - j, σ₀)` with prefactor
/// `q^{j(j+1)/2} / σ₀^j`.
pub fn fq_shift_sigma<T: Real>(args: &HyperArgs<T>, j: i64, q: &QBase<T>) -> Result<(HyperArgs<T>, Complex<T>)> {
    let qr = q.real_q()?;
    let sigma0 = args.sigma.clone() * Complex::real(qr.powi(j));
    let pref = Complex::real(qr.powi(j * (j + 1) / 2)) / sigma0.cpowi(j);
    Ok((HyperArgs { z: args.z.clone(), n: args.n.clone() - Complex::real(T::int(j)), sigma: sigma0 }, pref))
}

/// Relative residuals of the inhomogeneous first-order relation and of the
/// homogeneous three-term relation in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCheck {
    pub inhomogeneous: f64,
    pub homogeneous: f64,
}

pub fn fq_recurrence_check<T: Real>(args: &HyperArgs<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<RecurrenceCheck> {
    let qr = q.real_q()?;
    let ln_q = qr.ln();
    let half = T::ratio(1, 2, ln_q.bits());
    let one = Complex::<T>::one();
    let w0 = fq_eval(args, q, ctx)?.value;
    let wp = fq_eval(&args.with_z(args.z.scale(&qr)), q, ctx)?.value;
    let wm = fq_eval(&args.with_z(args.z.scale(&(T::one() / qr.clone()))), q, ctx)?.value;
    let q1n = qpow(&(one.clone() - args.n.clone()), &ln_q);
    let sz = args.sigma.clone() * args.z.value();
    let rhs = cexp_of((one.clone() - args.n.clone()) * args.sigma.cln())
        * qpow(&(-(args.n.clone() * (args.n.clone() - one.clone())).scale_by(&half)), &ln_q);
    let a = q1n.clone() * wp.clone();
    let b = sz.clone() * w0.clone();
    let inh = rel_diff(&(a.clone() + b), &rhs, &a);
    let t2 = (sz.clone() - q1n) * w0;
    let t3 = sz.scale_by(&(T::one() / qr)) * wm;
    let scale = [a.log10_abs(), t2.log10_abs(), t3.log10_abs()].into_iter().fold(f64::NEG_INFINITY, f64::max);
    let hom = 10f64.powf((a + t2 - t3).log10_abs() - scale);
    Ok(RecurrenceCheck { inhomogeneous: inh, homogeneous: hom })
}

/// `z^{N-1} E_q(-σz)` with `-σz = σz e^{iπ}`.
pub fn fq_elementary<T: Real>(args: &HyperArgs<T>, q: &QBase<T>) -> Result<Complex<T>> {
    let ln_q = q.real_q()?.ln();
    let bits = ln_q.bits();
    let ipi = Complex::new(T::zero(), T::pi_p(bits));
    let lz = args.z.ln();
    let pw = cexp_of((args.n.clone() - Complex::<T>::one()) * lz.clone());
    Ok(pw * eq_kernel_ln(&(args.sigma.cln() + lz + ipi), &ln_q))
}

/// Relative residual of the homogeneous relation for the elementary
/// solution `z^{N-1} E_q(-σz)`.
pub fn fq_elementary_residual<T: Real>(args: &HyperArgs<T>, q: &QBase<T>) -> Result<f64> {
    let qr = q.real_q()?;
    let ln_q = qr.ln();
    let one = Complex::<T>::one();
    let w0 = fq_elementary(args, q)?;
    let wp = fq_elementary(&args.with_z(args.z.scale(&qr)), q)?;
    let wm = fq_elementary(&args.with_z(args.z.scale(&(T::one() / qr.clone()))), q)?;
    let q1n = qpow(&(one - args.n.clone()), &ln_q);
    let sz = args.sigma.clone() * args.z.value();
    let a = q1n.clone() * wp;
    let b = (sz.clone() - q1n) * w0;
    let c = sz.scale_by(&(T::one() / qr)) * wm;
    let scale = [a.log10_abs(), b.log10_abs(), c.log10_abs()].into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(10f64.powf((a + b - c).log10_abs() - scale))
}

/// Both sides of `Σ_j (σzq^{N-2})^j/(q;q)_j F(zq^{-j}) = σ^{1-N} q^{-(N-1)(N-2)/2} / (σzq^{N-1};q)_∞`
/// for `|σzq^{N-1}| < 1`; the sum stops once terms drop below `tail_tol`.
pub fn fq_normalizing_sum<T: Real>(
    args: &HyperArgs<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<(Complex<T>, Complex<T>)> {
    let qr = q.real_q()?;
    let ln_q = qr.ln();
    let half = T::ratio(1, 2, ln_q.bits());
    let one = Complex::<T>::one();
    let sz = args.sigma.clone() * args.z.value();
    let x = sz.clone() * qpow(&(args.n.clone() - one.clone()), &ln_q);
    if abs_f64(&x) >= 1.0 {
        return domain("the normalizing sum needs |sigma z q^(N-1)| < 1");
    }
    let ratio = x.scale_by(&(T::one() / qr.clone()));
    let mut lhs = Complex::<T>::zero();
    let mut coef = one.clone();
    let mut qk = one.clone();
    let mut peak = f64::NEG_INFINITY;
    let tol = ctx.tail_tol.log10().max(-(ctx.digits as f64));
    let mut z = args.z.clone();
    for j in 0..10_000 {
        let f = fq_eval(&args.with_z(z.clone()), q, ctx)?.value;
        let t = coef.clone() * f;
        let lt = t.log10_abs();
        peak = peak.max(lt);
        lhs = lhs + t;
        if j > 2 && lt < peak + tol {
            break;
        }
        qk = qk * q.q.clone();
        coef = coef * ratio.clone() / (one.clone() - qk.clone());
        z = z.scale(&(T::one() / qr.clone()));
    }
    let nm1 = args.n.clone() - one.clone();
    let nm2 = nm1.clone() - one.clone();
    let rhs = cexp_of(-(nm1.clone() * args.sigma.cln())) * qpow(&(-(nm1 * nm2).scale_by(&half)), &ln_q)
        / crate::qcore::qpoch_inf(&x, q, ctx)?;
    Ok((lhs, rhs))
}

/// Relative residual of `zσ F(z;N,σ) = F(1/z; 2-N, 1/σ)`.
pub fn fq_reflect<T: Real>(args: &HyperArgs<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<f64> {
    let lhs = args.z.value() * args.sigma.clone() * fq_eval(args, q, ctx)?.value;
    let refl = HyperArgs {
        z: args.z.inv(),
        n: Complex::real(T::int(2)) - args.n.clone(),
        sigma: args.sigma.cinv(),
    };
    let rhs = fq_eval(&refl, q, ctx)?.value;
    Ok(rel_diff(&lhs, &rhs, &lhs))
}

/// The Stokes term `2πi C_q (-z)^{N-1} E_q(-σz)` with `-z = z e^{iπ}`.
pub fn stokes_term<T: Real>(args: &HyperArgs<T>, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    let bits = ctx.bits();
    let cq = c_q(q, ctx)?;
    let two_pi_i = Complex::new(T::zero(), T::pi_p(bits) * T::int(2));
    Ok(two_pi_i.scale_by(&cq) * fq_elementary(args, q)? * cexp_of((args.n.clone() - Complex::<T>::one()).scale_by(&T::pi_p(bits)) * Complex::i()))
}

/// `F(z e^{2πi}) − F(z)` from two quadratures (the second on a rotated ray),
/// and the closed form `−2πi C_q (−z)^{N−1} E_q(−σz)`.
pub fn fq_stokes_jump<T: Real>(
    z: &SurfacePoint<T>,
    n: &Complex<T>,
    sigma: &Complex<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<(Complex<T>, Complex<T>)> {
    let args = HyperArgs::new(z.clone(), n.clone(), sigma.clone());
    let two_pi = T::pi_p(ctx.bits()) * T::int(2);
    let turned = args.with_z(z.rotate(&two_pi));
    let jump = fq_eval(&turned, q, ctx)?.value - fq_eval(&args, q, ctx)?.value;
    let predicted = -stokes_term(&args, q, ctx)?;
    Ok((jump, predicted))
}

/// Parameters of the uniform expansion across the Stokes ray.
#[derive(Debug, Clone)]
pub struct UniformParams<T: Real> {
    pub tau_p: Complex<T>,
    pub c_coeffs: Vec<Complex<T>>,
}

#[derive(Debug, Clone)]
pub struct UniformValue<T: Real> {
    pub value: Complex<T>,
    pub params: UniformParams<T>,
    /// `|τ_p N|` is large enough that the plain expansion already applies.
    pub ordinary_regime: bool,
}

/// `c₀ = 1/(1 + q^{1/2-N}/(σz))`, `(n+1)c_{n+1} = N√(-ln q)(Σ c_m c_{n-m} − c_n)`.
pub fn uniform_params<T: Real>(args: &HyperArgs<T>, count: usize, q: &QBase<T>, bits: u32) -> Result<UniformParams<T>> {
    let qr = q.real_q()?.with_bits(bits);
    let ln_q = qr.ln();
    let lam_sqrt = (-ln_q.clone()).sqrt();
    let half = T::ratio(1, 2, bits);
    let one = Complex::<T>::one().with_bits(bits);
    let n = args.n.with_bits(bits);
    let lnsz = args.sigma.with_bits(bits).cln() + args.z.ln().with_bits(bits);
    let sign = if lnsz.im.to_f64() >= 0.0 { -1 } else { 1 };
    let ln_msz = lnsz.clone() + Complex::new(T::zero(), T::pi_p(bits) * T::int(sign));
    let tau_p = (ln_msz + (n.clone() - Complex::real(half.clone())).scale_by(&ln_q)) / n.scale_by(&lam_sqrt);
    let c0 = (one.clone() + qpow(&(Complex::real(half) - n.clone()), &ln_q) / lnsz.cexp()).cinv();
    let k = n.scale_by(&lam_sqrt);
    let mut c = vec![c0];
    for m in 0..count.saturating_sub(1) {
        let mut s = Complex::<T>::zero();
        for j in 0..=m {
            s = s + c[j].clone() * c[m - j].clone();
        }
        let next = k.clone() * (s - c[m].clone()) / T::int(m as i64 + 1);
        c.push(next);
    }
    Ok(UniformParams { tau_p, c_coeffs: c })
}

/// Uniform erfc expansion of `F_q(z; N, σ)` near the Stokes ray with `terms`
/// terms of the correction sum.
pub fn fq_uniform<T: Real>(
    z: &SurfacePoint<T>,
    n: &Complex<T>,
    sigma: &Complex<T>,
    q: &QBase<T>,
    terms: usize,
    ctx: &PrecisionContext,
) -> Result<UniformValue<T>> {
    let args = HyperArgs::new(z.clone(), n.clone(), sigma.clone());
    // the correction sum cancels like τ_p^{-2n-1} near the Stokes ray
    let rough = uniform_params(&args, 1, q, ctx.bits())?;
    let lt = rough.tau_p.log10_abs().min(0.0);
    let extra = (-(2.0 * terms as f64 + 1.0) * lt).ceil() as u32 + 10;
    let wctx = ctx.with_extra_digits(extra);
    let bits = wctx.bits();
    let p = uniform_params(&args, 2 * terms.max(1), q, bits)?;
    let qr = q.real_q()?.with_bits(bits);
    let ln_q = qr.ln();
    let lam_sqrt = (-ln_q.clone()).sqrt();
    let half = T::ratio(1, 2, bits);
    let one = Complex::<T>::one().with_bits(bits);
    let nn = n.with_bits(bits);
    let lnsz = sigma.with_bits(bits).cln() + z.ln().with_bits(bits);
    let sign = if lnsz.im.to_f64() >= 0.0 { -1 } else { 1 };
    let ipi = Complex::new(T::zero(), T::pi_p(bits) * T::int(sign));
    let ln_mz = z.ln().with_bits(bits) + ipi.clone();
    let ln_msz = lnsz.clone() + ipi;
    let qb = QBase::real(qr.clone())?;
    let cq = c_q(&qb, &wctx)?;
    let arg = (Complex::<T>::i() * p.tau_p.clone() * nn.clone()).scale_by(&(T::one() / T::int(2).sqrt().with_bits(bits)));
    let lead = Complex::new(T::zero(), -T::pi_p(bits)).scale_by(&cq)
        * cexp_of((nn.clone() - one.clone()) * ln_mz)
        * eq_kernel_ln(&ln_msz, &ln_q)
        * erfc(&arg)?;
    let k = nn.scale_by(&lam_sqrt);
    let n2 = nn.clone() * nn.clone();
    let mut s = Complex::<T>::zero();
    let mut dfact = one.clone();
    let mut n2k = one.clone();
    for m in 0..terms {
        if m > 0 {
            dfact = dfact.scale_by(&T::int(2 * m as i64 - 1));
            n2k = n2k * n2.clone();
        }
        let g = p.c_coeffs[2 * m].clone() - p.tau_p.cpowi(-(2 * m as i64) - 1) / k.clone();
        s = s + dfact.clone() * g / n2k.clone();
    }
    let alg = qpow(&(-(nn.clone() * (nn.clone() - one)).scale_by(&half)), &ln_q) / (cexp_of(nn * sigma.with_bits(bits).cln()) * z.value().with_bits(bits));
    let value = (lead + alg * s).with_bits(ctx.bits());
    let ordinary_regime = (p.tau_p.log10_abs() + n.log10_abs()) > 1.0;
    Ok(UniformValue { value, params: p, ordinary_regime })
}
