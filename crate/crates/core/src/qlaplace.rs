//! q-Laplace transforms along rays, with both the `E_q` and the `1/θ_q`
//! kernel, and the Borel–Laplace sums of ₂φ₀ and of the qP1 solution.
//!
//! With `t = e^{u+iφ}` the `E_q` kernel becomes an exact Gaussian in `u`
//! centred at `ln|z| + ½ ln q`, so the trapezoidal rule in `u` converges
//! geometrically.
//!
//! The Borel transform of the qP1 series grows like `exp(ln²t / |ln q|)`
//! along every ray, faster than the kernel decays. Its Laplace integral is
//! therefore cut at the minimum of the integrand (near `t ≈ 1/|z|`); the
//! size of the integrand there is added to `err_estimate`. That ambiguity is
//! of the order of the square of the Stokes exponential `E_q(1/z)`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::precision::PrecisionContext;
use crate::qborel::{BorelEval, HeineBorel};
use crate::qcore::{theta, QBase, SurfacePoint};
use crate::quad::{trapezoid_line, LineRule};
use crate::scalar::{ComplexExt, Real};

const LN10: f64 = std::f64::consts::LN_10;

/// Integration ray `arg t = angle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaySpec {
    pub angle: f64,
    /// Initial nodes per standard deviation of the kernel (0 = automatic).
    pub node_count: usize,
    /// Angular distance from the ray to the nearest singularity of the
    /// Borel transform (limits the step size).
    pub clustering: f64,
    /// Cut a divergent contour at the integrand's minimum instead of failing.
    pub truncate_divergent: bool,
}

impl RaySpec {
    pub fn along(angle: f64) -> Self {
        Self { angle, node_count: 0, clustering: std::f64::consts::PI, truncate_divergent: false }
    }

    /// Ray for a Borel transform whose singularities lie on the negative
    /// real axis: `arg z` clamped into `[-π + margin, π - margin]`.
    pub fn for_negative_axis_poles(arg_z: f64, margin: f64) -> Self {
        let pi = std::f64::consts::PI;
        let angle = arg_z.clamp(-pi + margin, pi - margin);
        Self { angle, node_count: 0, clustering: pi - angle.abs(), truncate_divergent: false }
    }

    /// Errors when a pole lies within `10⁻³·|pole|` of the ray.
    pub fn check_poles(&self, poles: &[Complex<f64>]) -> Result<()> {
        for p in poles {
            let r = p.norm();
            if r == 0.0 {
                continue;
            }
            let mut d = (p.arg() - self.angle).rem_euclid(2.0 * std::f64::consts::PI);
            if d > std::f64::consts::PI {
                d = 2.0 * std::f64::consts::PI - d;
            }
            let dist = if d >= std::f64::consts::FRAC_PI_2 { r } else { r * d.sin() };
            if dist < 1e-3 * r {
                return Err(Error::PoleProximity(format!("ray at angle {} passes within {dist:e} of pole {p}", self.angle)));
            }
        }
        Ok(())
    }
}

/// Result of a Laplace integral, tagged with the point on the log surface.
#[derive(Debug, Clone)]
pub struct SummedValue<T: Real> {
    pub value: Complex<T>,
    pub err_estimate: f64,
    pub n_used: usize,
    pub sheet: SurfacePoint<T>,
    /// `ln|t|` where a divergent contour was cut, if it was.
    pub cut_at: Option<f64>,
    /// Set when the result relies on a regularization (contour cut or pole
    /// subtraction) rather than plain quadrature.
    pub degraded: bool,
}

#[derive(Serialize, Deserialize)]
struct SheetJson {
    #[serde(rename = "mod")]
    modulus: f64,
    arg: f64,
}

#[derive(Serialize, Deserialize)]
struct SummedJson {
    re: String,
    im: String,
    err: f64,
    nodes: usize,
    z: SheetJson,
}

impl<T: Real> SummedValue<T> {
    /// `{re, im, err, nodes, z:{mod,arg}}`; `re`/`im` are printed to `digits`.
    pub fn to_json(&self, digits: usize) -> String {
        let j = SummedJson {
            re: format!("{:.*}", digits, self.value.re),
            im: format!("{:.*}", digits, self.value.im),
            err: self.err_estimate,
            nodes: self.n_used,
            z: SheetJson { modulus: self.sheet.modulus.to_f64(), arg: self.sheet.arg.to_f64() },
        };
        serde_json::to_string(&j).expect("summed value serializes")
    }
}

fn lambda_f64<T: Real>(q: &QBase<T>) -> Result<f64> {
    Ok(q.lambda()?.to_f64())
}

/// Step that resolves a Gaussian of variance `lam` and stays inside an
/// analyticity strip of half-width `strip` to `digits` digits.
pub(crate) fn initial_step(lam: f64, strip: f64, digits: f64, per_sigma: usize) -> f64 {
    let target = LN10 * (digits + 5.0);
    let h_gauss = std::f64::consts::PI * (2.0 * lam / target).sqrt();
    let h_strip = if strip.is_finite() { 2.0 * std::f64::consts::PI * strip / target } else { f64::INFINITY };
    let mut h = h_gauss.min(h_strip);
    if per_sigma > 0 {
        h = h.min(lam.sqrt() / per_sigma as f64);
    }
    h
}

/// Scans `log10|f(u)|` to the right of the kernel peak. Returns the cut
/// point and the log10 size of the integrand there when the integrand
/// bottoms out above the negligible level and then grows.
fn find_divergent_cut<T: Real>(
    f: &dyn Fn(&T) -> Result<Complex<T>>,
    peak_u: f64,
    step: f64,
    negligible: f64,
    bits: u32,
) -> Result<Option<(f64, f64)>> {
    let at = |u: f64| -> Result<f64> { Ok(f(&T::from_f64_p(u, bits))?.log10_abs()) };
    let peak = at(peak_u)?;
    let mut best = (peak_u, peak);
    let mut quiet = 0;
    for k in 1..4000 {
        let u = peak_u + k as f64 * step;
        let v = at(u)?;
        if v < best.1 {
            best = (u, v);
        }
        if v < peak + negligible {
            quiet += 1;
            if quiet >= 4 {
                return Ok(None);
            }
        } else {
            quiet = 0;
        }
        if v > best.1 + 4.0 && best.1 > peak + negligible {
            // refine the minimum on a finer grid
            let mut fine = best;
            let lo = best.0 - step;
            for j in 0..=40 {
                let uu = lo + j as f64 * step / 20.0;
                let vv = at(uu)?;
                if vv < fine.1 {
                    fine = (uu, vv);
                }
            }
            return Ok(Some(fine));
        }
    }
    Err(Error::NonConvergence("integrand neither decays nor turns around along the ray".into()))
}

/// `C_q ∫₀^{∞e^{iφ}} B(t) E_q(t/z) dt/t` for real `q ∈ (0,1)`.
pub fn laplace_e<T: Real, B: BorelEval<T> + ?Sized>(
    b: &B,
    z: &SurfacePoint<T>,
    ray: &RaySpec,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<SummedValue<T>> {
    let lam = lambda_f64(q)?;
    if z.modulus <= T::zero() {
        return domain("z must be nonzero");
    }
    let psi = ray.angle - z.arg.to_f64();
    let boost = (psi * psi / (2.0 * lam) / LN10).ceil().max(0.0) as u32;
    let wctx = ctx.with_extra_digits(boost + 5);
    let bits = wctx.bits();
    let ln_q = q.real_q()?.with_bits(bits).ln();
    let two_ln_q = ln_q.clone() * T::int(2);
    let phi = T::from_f64_p(ray.angle, bits);
    let ln_z = Complex::new(z.modulus.with_bits(bits).ln(), z.arg.with_bits(bits));
    let half_ln_q = ln_q.clone() / T::int(2);
    let cq = T::one() / (T::int(2) * T::pi_p(bits) * (-ln_q.clone())).sqrt();
    let f = |u: &T| -> Result<Complex<T>> {
        let lt = Complex::new(u.clone(), phi.clone());
        let t = lt.cexp();
        let bt = b.eval(&t)?;
        let x = lt - ln_z.clone() - Complex::real(half_ln_q.clone());
        let k = (x.clone() * x).scale_by(&(T::one() / two_ln_q.clone())).cexp();
        Ok(bt * k.scale_by(&cq))
    };
    let center = z.modulus.ln().to_f64() - lam / 2.0;
    let digits = wctx.digits as f64;
    let h = initial_step(lam, ray.clustering, digits, ray.node_count);
    let negligible = -(digits + 5.0) - psi * psi / (2.0 * lam) / LN10;
    let cut = find_divergent_cut(&f, center, lam.sqrt() / 2.0, negligible, bits)?;
    let base_rule = LineRule {
        center,
        h,
        min_half_width: 6.0 * lam.sqrt(),
        cutoff_log10: negligible - 2.0,
        tol: ctx.quad_tol,
    };
    let (r, cut_info) = match cut {
        None => (trapezoid_line(f, &base_rule, bits)?, None),
        Some((u_cut, size)) => {
            if !ray.truncate_divergent {
                return Err(Error::NonConvergence(format!(
                    "Laplace integrand grows beyond ln|t| = {u_cut:.3}; contour truncation not allowed"
                )));
            }
            // smooth cut: the window beats the growth exp((u-u_c)²/2λ) and keeps the integrand entire
            let w = lam.sqrt() / 2.0;
            let uc = T::from_f64_p(u_cut, bits);
            let inv_w = T::from_f64_p(1.0 / w, bits);
            let half = T::ratio(1, 2, bits);
            let windowed = |u: &T| -> Result<Complex<T>> {
                let s = ((u.clone() - uc.clone()) * inv_w.clone()).erfc() * half.clone();
                Ok(f(u)?.scale_by(&s))
            };
            let rule = LineRule { min_half_width: (u_cut - center).abs() + 8.0 * w, ..base_rule };
            (trapezoid_line(windowed, &rule, bits)?, Some((u_cut, size)))
        }
    };
    let mut err = r.err;
    if let Some((_, size)) = cut_info {
        err += 10f64.powf(size) * lam.sqrt() * 3.0;
    }
    let value = r.value.with_bits(ctx.bits());
    Ok(SummedValue { value, err_estimate: err, n_used: r.nodes, sheet: z.clone(), cut_at: cut_info.map(|c| c.0), degraded: cut_info.is_some() })
}

/// `(-1/ln q) ∫₀^{∞e^{iφ}} B(t) / θ_q(t/z) dt/t`, integrated over one
/// q-period and summed over periods with `1/θ(q^{-k}τ) = τ^{-k} q^{k(k+1)/2}/θ(τ)`.
pub fn laplace_theta<T: Real, B: BorelEval<T> + ?Sized>(
    b: &B,
    z: &SurfacePoint<T>,
    ray: &RaySpec,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<SummedValue<T>> {
    let lam = lambda_f64(q)?;
    let psi = ray.angle - z.arg.to_f64();
    if (psi.abs() - std::f64::consts::PI).abs() < 1e-6 || psi.abs() > std::f64::consts::PI {
        return domain("the 1/theta kernel ray must satisfy |arg t - arg z| < pi");
    }
    let boost = (psi * psi / (2.0 * lam) / LN10).ceil() as u32;
    let wctx = ctx.with_extra_digits(boost + 5);
    let bits = wctx.bits();
    let qb = QBase::real(q.real_q()?.with_bits(bits))?;
    let lam_t = qb.lambda()?;
    let ln_z = Complex::new(z.modulus.with_bits(bits).ln(), z.arg.with_bits(bits));
    let phi = T::from_f64_p(ray.angle, bits);
    let pref = T::one() / lam_t.clone();
    let center = z.modulus.ln().to_f64() - lam / 2.0;
    let digits = wctx.digits as f64;
    let tol_log = -(digits + 5.0) - psi * psi / (2.0 * lam) / LN10;
    let qv = qb.q.clone();
    // Integrand summed over periods at u (u in one period).
    let periodized = |u: &T| -> Result<(Complex<T>, usize)> {
        let lt = Complex::new(u.clone(), phi.clone());
        let tau = (lt.clone() - ln_z.clone()).cexp();
        let th = theta(&tau, &qb, &wctx)?;
        let base = th.cinv();
        let mut sum = Complex::<T>::zero();
        let mut peak = f64::NEG_INFINITY;
        let mut count = 0;
        for dir in [0i64, 1, -1] {
            let mut k: i64 = if dir == 0 { 0 } else { dir };
            let mut quiet = 0;
            // factor for t → t q^{-k}: 1/θ(q^{-k}τ) = τ^{-k} q^{k(k+1)/2} / θ(τ)
            loop {
                let t = (lt.clone() + Complex::real(lam_t.clone() * T::int(k))).cexp();
                let factor = tau.cpowi(-k) * qv.cpowi(k * (k + 1) / 2);
                let v = b.eval(&t)? * base.clone() * factor;
                count += 1;
                let lv = v.log10_abs();
                peak = peak.max(lv);
                sum = sum + v;
                if dir == 0 {
                    break;
                }
                if lv < peak + tol_log {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                if quiet >= 2 {
                    break;
                }
                if k.abs() > 100_000 {
                    return Err(Error::NonConvergence("theta-kernel period sum diverges".into()));
                }
                k += dir;
            }
        }
        Ok((sum.scale_by(&pref), count))
    };
    let mut n = if ray.node_count > 0 { ray.node_count } else { 8 };
    let h_max = initial_step(lam, ray.clustering, digits, 0);
    while lam / (n as f64) > h_max {
        n *= 2;
    }
    let u0 = T::from_f64_p(center, bits);
    let mut total_nodes = 0;
    let mut sum = Complex::<T>::zero();
    for j in 0..n {
        let u = u0.clone() + lam_t.clone() * T::int(j as i64) / T::int(n as i64);
        let (v, c) = periodized(&u)?;
        total_nodes += c;
        sum = sum + v;
    }
    let mut value = sum.scale_by(&(lam_t.clone() / T::int(n as i64)));
    for _ in 0..crate::quad::MAX_HALVINGS {
        let mut mid = Complex::<T>::zero();
        for j in 0..n {
            let u = u0.clone() + lam_t.clone() * T::int(2 * j as i64 + 1) / T::int(2 * n as i64);
            let (v, c) = periodized(&u)?;
            total_nodes += c;
            mid = mid + v;
        }
        let new_value = (value.clone() + mid.scale_by(&(lam_t.clone() / T::int(n as i64)))).scale_by(&T::ratio(1, 2, bits));
        let diff = (new_value.clone() - value.clone()).log10_abs() - new_value.log10_abs();
        value = new_value;
        n *= 2;
        if diff < ctx.quad_tol.log10() {
            let err = 10f64.powf(diff + value.log10_abs());
            return Ok(SummedValue {
                value: value.with_bits(ctx.bits()),
                err_estimate: err,
                n_used: total_nodes,
                sheet: z.clone(),
                cut_at: None,
                degraded: false,
            });
        }
    }
    Err(Error::NonConvergence("theta-kernel quadrature did not converge".into()))
}

/// Angular margin kept between the ray and the negative real axis.
pub const RAY_MARGIN: f64 = 0.25;

/// q-Borel–Laplace sum of `₂φ₀(a,b;−;q,z)` on the log surface.
pub fn sum_2phi0<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<SummedValue<T>> {
    let ray = RaySpec::for_negative_axis_poles(z.arg.to_f64(), RAY_MARGIN);
    sum_2phi0_on_ray(a, b, z, &ray, q, ctx)
}

pub fn sum_2phi0_on_ray<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    z: &SurfacePoint<T>,
    ray: &RaySpec,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<SummedValue<T>> {
    let pi = std::f64::consts::PI;
    ray.check_poles(&[Complex::from_polar(1.0, pi)])?;
    let hctx = ctx.with_extra_digits(5);
    let borel = HeineBorel { a: a.with_bits(hctx.bits()), b: b.with_bits(hctx.bits()), q: q.clone(), ctx: hctx };
    laplace_e(&borel, z, ray, q, ctx)
}

/// Borel–Laplace sum `v_I(z) = C_q ∫₀^∞ B_I(t) E_q(e^{iπ} t/z) dt/t`.
///
/// Evaluated as `laplace_e` at `z e^{-iπ}`; the contour is truncated where
/// the integrand turns around (see the module notes).
pub fn sum_qp1<T: Real, B: BorelEval<T> + ?Sized>(
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
    borel_eval: &B,
) -> Result<SummedValue<T>> {
    let pi = T::pi_p(z.arg.bits().max(ctx.bits()));
    let zz = SurfacePoint { modulus: z.modulus.clone(), arg: z.arg.clone() - pi };
    let mut ray = RaySpec::for_negative_axis_poles(zz.arg.to_f64(), RAY_MARGIN);
    ray.truncate_divergent = true;
    let mut r = laplace_e(borel_eval, &zz, &ray, q, ctx)?;
    r.sheet = z.clone();
    let t_end = Complex::from_polar_t(&T::from_f64_p(r.cut_at.unwrap_or(0.0).exp(), ctx.bits()), &T::from_f64_p(ray.angle, ctx.bits()));
    let cont = borel_eval.continuation_error(&t_end);
    r.err_estimate += cont * crate::scalar::abs_f64(&r.value);
    Ok(r)
}

/// Relative residual of `(1-abqz)w(zq²) - (1-(a+b)zq)w(zq) - zq w(z)`.
pub fn phi20_residual<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<(f64, [SummedValue<T>; 3])> {
    let qr = q.real_q()?;
    let w0 = sum_2phi0(a, b, z, q, ctx)?;
    let w1 = sum_2phi0(a, b, &z.scale(&qr), q, ctx)?;
    let w2 = sum_2phi0(a, b, &z.scale(&(qr.clone() * qr.clone())), q, ctx)?;
    let zq = z.value() * q.q.clone();
    let one = Complex::<T>::one();
    let t2 = (one.clone() - a.clone() * b.clone() * zq.clone()) * w2.value.clone();
    let t1 = (one.clone() - (a.clone() + b.clone()) * zq.clone()) * w1.value.clone();
    let t0 = zq * w0.value.clone();
    let scale = [t2.log10_abs(), t1.log10_abs(), t0.log10_abs()].into_iter().fold(f64::NEG_INFINITY, f64::max);
    let res = (t2 - t1 - t0).log10_abs() - scale;
    Ok((10f64.powf(res), [w0, w1, w2]))
}

/// Functional-equation residual `|z v(qz) v(z)² v(z/q) − v(z) + 1|` relative to
/// `|v(z)|`, plus the combined error estimate of the three sums.
pub fn qp1_residual<T: Real, B: BorelEval<T> + ?Sized>(
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
    borel_eval: &B,
) -> Result<(f64, f64, [SummedValue<T>; 3])> {
    let qr = q.real_q()?;
    let v0 = sum_qp1(z, q, ctx, borel_eval)?;
    let vp = sum_qp1(&z.scale(&qr), q, ctx, borel_eval)?;
    let vm = sum_qp1(&z.scale(&(T::one() / qr)), q, ctx, borel_eval)?;
    let res = z.value() * vp.value.clone() * v0.value.clone() * v0.value.clone() * vm.value.clone() - v0.value.clone()
        + Complex::one();
    let rel = 10f64.powf(res.log10_abs() - v0.value.log10_abs());
    let err = (v0.err_estimate * 2.0 + vp.err_estimate + vm.err_estimate) / crate::scalar::abs_f64(&v0.value);
    Ok((rel, err, [v0, vp, vm]))
}

/// `t ↦ tⁿ`, the moment test function.
pub fn monomial<T: Real>(n: i64) -> impl Fn(&Complex<T>) -> Result<Complex<T>> + Send + Sync {
    move |t: &Complex<T>| Ok(t.cpowi(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40, 1e-40, 1e-12).unwrap()
    }

    #[test]
    fn moments_e_kernel() {
        let c = ctx();
        let q = QBase::real(c.parse::<Mp>("0.6").unwrap()).unwrap();
        let z = SurfacePoint::new(c.parse::<Mp>("0.3").unwrap(), Mp::new(c.bits(), 0.0)).unwrap();
        for n in [0i64, 1, 2, 5] {
            let r = laplace_e(&monomial::<Mp>(n), &z, &RaySpec::along(0.0), &q, &c).unwrap();
            let expect = q.powi(-(n * (n - 1) / 2)) * z.value().cpowi(n);
            assert!((r.value - expect.clone()).log10_abs() - expect.log10_abs() < -12.0, "n = {n}");
        }
    }

    #[test]
    fn theta_kernel_zeroth_moment() {
        let c = ctx();
        for qs in ["0.3", "0.6"] {
            let q = QBase::real(c.parse::<Mp>(qs).unwrap()).unwrap();
            let z = SurfacePoint::new(Mp::new(c.bits(), 1.0), Mp::new(c.bits(), 0.0)).unwrap();
            let r = laplace_theta(&monomial::<Mp>(0), &z, &RaySpec::along(0.0), &q, &c).unwrap();
            assert!((r.value - Complex::one()).log10_abs() < -12.0);
        }
    }

    #[test]
    fn qp1_sum_small_z_and_functional_equation() {
        let c = ctx();
        let q = QBase::real(c.parse::<Mp>("0.7").unwrap()).unwrap();
        let half_pi = Mp::pi_p(c.bits()) / Mp::int(2);
        let borel = crate::qborel::EntireBorelQp1::for_laplace(&q, &c, 1e-3 * 0.7).unwrap();
        let z = SurfacePoint::new(c.parse::<Mp>("0.001").unwrap(), half_pi.clone()).unwrap();
        let v = sum_qp1(&z, &q, &c, &borel).unwrap();
        let approx = Complex::<Mp>::one() + z.value();
        assert!((v.value.clone() - approx).log10_abs() < -5.0);
        for (m, a) in [("0.02", 1.0), ("0.05", 1.5707963267948966), ("0.03", 2.5)] {
            let z = SurfacePoint::new(c.parse::<Mp>(m).unwrap(), Mp::new(c.bits(), a)).unwrap();
            let (res, err, vs) = qp1_residual(&z, &q, &c, &borel).unwrap();
            eprintln!("z = {m} e^{{i{a}}}: residual {res:e}, err {err:e}, v = {:?}, cut {:?}", vs[0].value, vs[0].cut_at);
            assert!(res < (10.0 * c.quad_tol).max(err));
        }
    }

    #[test]
    fn phi20_sum_satisfies_recurrence() {
        let c = ctx();
        let q = QBase::real(c.parse::<Mp>("0.5").unwrap()).unwrap();
        let a = Complex::new(c.parse::<Mp>("0.2").unwrap(), Mp::new(c.bits(), 0.0));
        let b = Complex::new(c.parse::<Mp>("0.3").unwrap(), Mp::new(c.bits(), 0.0));
        for (m, arg) in [("0.05", 0.0), ("0.2", 1.0), ("0.1", -2.0)] {
            let z = SurfacePoint::new(c.parse::<Mp>(m).unwrap(), Mp::new(c.bits(), arg)).unwrap();
            let (res, _) = phi20_residual(&a, &b, &z, &q, &c).unwrap();
            assert!(res < 10.0 * c.quad_tol, "z = {m} e^(i{arg}): residual {res:e}");
        }
    }
}
