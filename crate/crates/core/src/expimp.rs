//! Optimal truncation and the level-one re-expansion of the remainder in
//! q-hyperterminants, for ₂φ₀ and for the formal qP1 solution; plus a direct
//! two-sheet measurement of the Stokes jump.

use num_complex::Complex;
use num_traits::Zero;

use crate::coeffs::{phi20_coeffs, qp1_c_numeric, qp1_d_numeric};
use crate::error::Result;
use crate::hyperterm::{fq_eval, HyperArgs};
use crate::precision::PrecisionContext;
use crate::qborel::{residues_closed, BorelEval};
use crate::qcore::{c_q, eq_kernel_ln, QBase, SurfacePoint};
use crate::qlaplace::{sum_2phi0, sum_qp1};
use crate::scalar::{abs_f64, ComplexExt, Real};
use crate::stokes::{k_closed, k_extract};

/// Default number of exponentially small terms kept.
pub const DEFAULT_JMAX: usize = 3;

#[derive(Debug, Clone)]
pub struct ImprovedValue<T: Real> {
    /// Optimally truncated series `Σ_{n<N}`.
    pub base_sum: Complex<T>,
    /// Hyperterminant re-expansion of the remainder, `j ≤ jmax`.
    pub tail: Complex<T>,
    pub total: Complex<T>,
    pub n: usize,
    pub jmax: usize,
    pub err_estimate: f64,
    /// Size of the first omitted `j` term.
    pub omitted: f64,
    pub warning: Option<String>,
}

/// `round(|ln|z| / ln q|) + offset`, at least 1.
pub fn optimal_n<T: Real>(z: &SurfacePoint<T>, q: &QBase<T>, offset: i64) -> usize {
    let r = (z.modulus.ln().to_f64() / q.abs_f64().ln()).abs().round() as i64 + offset;
    r.max(1) as usize
}

fn n_complex<T: Real>(n: usize, bits: u32) -> Complex<T> {
    Complex::real(T::int(n as i64).with_bits(bits))
}

/// Sums `Σ_{j≤jmax} w_j F_q(ζ; N, q^{-j})` and the `j = jmax+1` term.
fn hyper_tail<T: Real>(
    weights: &[Complex<T>],
    zeta: &SurfacePoint<T>,
    n: usize,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<(Complex<T>, f64, f64)> {
    let bits = ctx.bits();
    let jmax = weights.len() - 2;
    let mut sum = Complex::<T>::zero();
    let mut err = 0.0;
    let mut omitted = 0.0;
    for (j, w) in weights.iter().enumerate() {
        let args = HyperArgs::new(zeta.clone(), n_complex(n, bits), q.powi(-(j as i64)));
        let f = fq_eval(&args, q, ctx)?;
        let term = w.clone() * f.value;
        if j > jmax {
            omitted = abs_f64(&term);
        } else {
            err += f.err_estimate * abs_f64(w);
            sum = sum + term;
        }
    }
    Ok((sum, err, omitted))
}

/// `Σ_{n<N} c_n z^n − (−z)^{N−1} Σ_{j≤jmax} d_j(a,b) F_q(1/z; N, q^{-j})`.
pub fn improved_2phi0<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    jmax: usize,
    n: Option<usize>,
    ctx: &PrecisionContext,
) -> Result<ImprovedValue<T>> {
    let n = n.unwrap_or_else(|| optimal_n(z, q, 0));
    let zv = z.value();
    let coeffs = phi20_coeffs(a, b, n, q, ctx);
    let base = partial_sum(&coeffs[..n], &zv);
    let d = residues_closed(a, b, jmax + 1, q, ctx)?;
    let (s, err, omitted) = hyper_tail(&d, &z.inv(), n, q, ctx)?;
    let tail = -((-zv).cpowi(n as i64 - 1) * s);
    let scale = abs_f64(&(-z.value()).cpowi(n as i64 - 1));
    Ok(finish(base, tail, n, jmax, err * scale, omitted * scale, None))
}

/// `K₀ … K_count−1`: closed forms up to `j = 4`, a late-coefficient fit beyond.
pub fn qp1_multipliers<T: Real>(
    q: &QBase<T>,
    count: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<Complex<T>>, Option<String>)> {
    let mut k = Vec::with_capacity(count);
    for j in 0..count.min(5) {
        k.push(k_closed(j, q, ctx)?);
    }
    if count <= 5 {
        return Ok((k, None));
    }
    let jmax = count - 1;
    let fctx = ctx.with_extra_digits(20 * jmax as u32);
    let qf = q.q.with_bits(fctx.bits());
    let nmax = 40 + 12 * jmax;
    let d = qp1_d_numeric(nmax, &qf);
    let fit = k_extract(&d, &qf, jmax, nmax / 2..=nmax)?;
    let v = fit.numeric().expect("numeric fit");
    for kj in &v[5..] {
        k.push(kj.with_bits(ctx.bits()));
    }
    Ok((k, Some(format!("K_j for j > 4 come from a numeric fit of d_n (residual {:e})", fit.residual))))
}

/// `Σ_{n<N} c_n z^n − z^{N−1} Σ_{j≤jmax} q^j K_j F_q(−1/z; N, q^{-j})`,
/// with `−1/z = e^{iπ}/z`.
pub fn improved_qp1<T: Real>(
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    jmax: usize,
    n: Option<usize>,
    ctx: &PrecisionContext,
) -> Result<ImprovedValue<T>> {
    let bits = ctx.bits();
    let n = n.unwrap_or_else(|| optimal_n(z, q, 0));
    let zv = z.value();
    let c = qp1_c_numeric(n, &q.q.with_bits(bits));
    let base = partial_sum(&c[..n], &zv);
    let (k, warning) = qp1_multipliers(q, jmax + 2, ctx)?;
    let w: Vec<Complex<T>> = k.iter().enumerate().map(|(j, kj)| kj.clone() * q.powi(j as i64)).collect();
    let zeta = z.inv().rotate(&T::pi_p(bits));
    let (s, err, omitted) = hyper_tail(&w, &zeta, n, q, ctx)?;
    let tail = -(zv.cpowi(n as i64 - 1) * s);
    let scale = abs_f64(&zv.cpowi(n as i64 - 1));
    Ok(finish(base, tail, n, jmax, err * scale, omitted * scale, warning))
}

fn partial_sum<T: Real>(c: &[Complex<T>], z: &Complex<T>) -> Complex<T> {
    c.iter().rev().fold(Complex::<T>::zero(), |acc, cn| acc * z.clone() + cn.clone())
}

fn finish<T: Real>(
    base: Complex<T>,
    tail: Complex<T>,
    n: usize,
    jmax: usize,
    err: f64,
    omitted: f64,
    warning: Option<String>,
) -> ImprovedValue<T> {
    let total = base.clone() + tail.clone();
    ImprovedValue { base_sum: base, tail, total, n, jmax, err_estimate: err + omitted, omitted, warning }
}

#[derive(Clone, Copy)]
pub enum JumpKind<'a, T: Real> {
    /// `w(e^{−2πi}z) − w(z)`.
    Phi20 { a: &'a Complex<T>, b: &'a Complex<T> },
    /// `v_I(z) − v_I(e^{2πi}z)`, `arg z ∈ (0, 2π)`.
    Qp1 { borel: &'a dyn BorelEval<T> },
}

#[derive(Debug, Clone)]
pub struct JumpMeasure<T: Real> {
    pub measured: Complex<T>,
    pub predicted: Complex<T>,
    /// Individual `j` terms of the prediction.
    pub terms: Vec<Complex<T>>,
    /// Quadrature error of the measurement plus a bound on the omitted terms
    /// (geometric from the first two).
    pub tolerance: f64,
}

/// Measures the Stokes jump by summing on two sheets and compares it with
/// the residue sum truncated at `jmax`.
///
/// The prediction is `2πi C_q E_q(e^{iπ}/z) Σ_j d_j q^{j(j+1)/2} (−z)^j` for
/// ₂φ₀ and `2πi C_q Σ_j q^j K_j E_q(q^{−j}/z)` for qP1, with `1/z` taken on
/// the sheet of `z`.
pub fn jump_measure<T: Real>(
    kind: JumpKind<'_, T>,
    z: &SurfacePoint<T>,
    q: &QBase<T>,
    jmax: usize,
    ctx: &PrecisionContext,
) -> Result<JumpMeasure<T>> {
    let bits = ctx.bits();
    let pi = T::pi_p(bits);
    let two_pi = pi.clone() * T::int(2);
    let ln_q = q.real_q()?.ln();
    let cq = c_q(q, ctx)?;
    let pref = Complex::new(T::zero(), two_pi.clone() * cq);
    let mut terms = Vec::with_capacity(jmax + 2);
    let (measured, err) = match kind {
        JumpKind::Phi20 { a, b } => {
            let w0 = sum_2phi0(a, b, z, q, ctx)?;
            let w1 = sum_2phi0(a, b, &z.rotate(&-two_pi.clone()), q, ctx)?;
            let d = residues_closed(a, b, jmax + 2, q, ctx)?;
            let ln_tau = -z.ln() + Complex::new(T::zero(), pi.clone());
            let e = eq_kernel_ln(&ln_tau, &ln_q);
            let mz = -z.value();
            for (j, dj) in d.iter().enumerate() {
                let j = j as i64;
                terms.push(pref.clone() * e.clone() * dj.clone() * q.powi(j * (j + 1) / 2) * mz.cpowi(j));
            }
            (w1.value - w0.value.clone(), w0.err_estimate + w1.err_estimate)
        }
        JumpKind::Qp1 { borel } => {
            let v0 = sum_qp1(z, q, ctx, borel)?;
            let v1 = sum_qp1(&z.rotate(&two_pi), q, ctx, borel)?;
            let (k, _) = qp1_multipliers(q, jmax + 3, ctx)?;
            let base = -z.ln();
            for (j, kj) in k.iter().enumerate() {
                let ln_tau = base.clone() - Complex::real(ln_q.clone() * T::int(j as i64));
                terms.push(pref.clone() * kj.clone() * q.powi(j as i64) * eq_kernel_ln(&ln_tau, &ln_q));
            }
            (v0.value - v1.value.clone(), v0.err_estimate + v1.err_estimate)
        }
    };
    let after = abs_f64(&terms.pop().expect("jmax + 3 terms"));
    let first = abs_f64(&terms.pop().expect("jmax + 3 terms"));
    let r = after / first;
    let omitted = if r < 0.5 { first / (1.0 - r) } else { 10.0 * first };
    let predicted = terms.iter().fold(Complex::<T>::zero(), |acc, t| acc + t.clone());
    Ok(JumpMeasure { measured, predicted, terms, tolerance: err + omitted })
}

/// `|jump| / |E_q|`-scale: `log10|measured| − log10|E_q(1/|z|)|`.
pub fn jump_scale_log10<T: Real>(m: &JumpMeasure<T>, z: &SurfacePoint<T>, q: &QBase<T>) -> Result<f64> {
    let ln_q = q.real_q()?.ln();
    let ln_tau = Complex::real(-z.modulus.ln());
    Ok(m.measured.log10_abs() - eq_kernel_ln(&ln_tau, &ln_q).log10_abs())
}

/// Truncation error of the plain series for comparison: `|Σ_{n<N} c_n zⁿ − oracle|`.
pub fn truncation_error<T: Real>(v: &ImprovedValue<T>, oracle: &Complex<T>) -> (f64, f64) {
    (
        abs_f64(&(v.base_sum.clone() - oracle.clone())),
        abs_f64(&(v.total.clone() - oracle.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qborel::EntireBorelQp1;
    use crate::scalar::Mp;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40, 1e-40, 1e-12).unwrap()
    }

    fn mc(c: &PrecisionContext, x: f64) -> Complex<Mp> {
        Complex::new(Mp::new(c.bits(), x), Mp::new(c.bits(), 0.0))
    }

    #[test]
    fn optimal_n_rounds_log_ratio() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.5)).unwrap();
        let z = SurfacePoint::new(Mp::new(c.bits(), 0.125), Mp::new(c.bits(), 0.3)).unwrap();
        assert_eq!(optimal_n(&z, &q, 0), 3);
        let z = SurfacePoint::new(Mp::new(c.bits(), 0.01), Mp::new(c.bits(), 0.0)).unwrap();
        assert_eq!(optimal_n(&z, &q, 0), 7);
        assert_eq!(optimal_n(&z, &q, -1), 6);
    }

    #[test]
    fn qp1_optimal_term_is_near_minimal() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.7)).unwrap();
        let z = SurfacePoint::new(q.real_q().unwrap().powi(5), Mp::new(c.bits(), 1.0)).unwrap();
        let n = optimal_n(&z, &q, 0);
        let cn = qp1_c_numeric(2 * n, &q.q);
        let mag: Vec<f64> = cn.iter().enumerate().map(|(k, ck)| ck.log10_abs() + k as f64 * z.modulus.log10_abs()).collect();
        let min = mag.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(mag[n] - min < 3f64.log10(), "N = {n}: {mag:?}");
    }

    #[test]
    fn phi20_improvement_beats_truncation() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.5)).unwrap();
        let (a, b) = (mc(&c, 0.2), mc(&c, 0.3));
        let z = SurfacePoint::new(q.real_q().unwrap().powi(5), Mp::pi_p(c.bits()) / Mp::int(4)).unwrap();
        let oracle = sum_2phi0(&a, &b, &z, &q, &c).unwrap().value;
        let v = improved_2phi0(&a, &b, &z, &q, 3, None, &c).unwrap();
        let (plain, improved) = truncation_error(&v, &oracle);
        assert!(plain / improved >= 100.0);
        // N-shift consistency
        for dn in [-1i64, 1] {
            let w = improved_2phi0(&a, &b, &z, &q, 3, Some((v.n as i64 + dn) as usize), &c).unwrap();
            assert!(abs_f64(&(w.total - v.total.clone())) < 10.0 * (w.err_estimate + v.err_estimate).max(improved));
        }
    }

    #[test]
    fn phi20_jump_matches_residue_sum() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.5)).unwrap();
        let (a, b) = (mc(&c, 0.2), mc(&c, 0.3));
        let z = SurfacePoint::new(Mp::new(c.bits(), 0.05), Mp::new(c.bits(), 0.5)).unwrap();
        let m = jump_measure(JumpKind::Phi20 { a: &a, b: &b }, &z, &q, 6, &c).unwrap();
        let rel = abs_f64(&(m.measured.clone() - m.predicted.clone())) / abs_f64(&m.measured);
        assert!(rel < (10.0 * c.quad_tol).max(m.tolerance / abs_f64(&m.measured)));
    }

    #[test]
    fn qp1_jump_leading_term() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.7)).unwrap();
        let z = SurfacePoint::new(Mp::new(c.bits(), 0.03), Mp::new(c.bits(), 2.0)).unwrap();
        let borel = EntireBorelQp1::for_laplace(&q, &c, 0.03 * 0.7).unwrap();
        let m4 = jump_measure(JumpKind::Qp1 { borel: &borel }, &z, &q, 4, &c).unwrap();
        let rel4 = abs_f64(&(m4.measured.clone() - m4.predicted.clone())) / abs_f64(&m4.measured);
        assert!(rel4 < m4.tolerance / abs_f64(&m4.measured), "rel {rel4:e}");
        let m = jump_measure(JumpKind::Qp1 { borel: &borel }, &z, &q, 2, &c).unwrap();
        let rel0 = abs_f64(&(m.measured.clone() - m.terms[0].clone())) / abs_f64(&m.measured);
        let rel = abs_f64(&(m.measured.clone() - m.predicted.clone())) / abs_f64(&m.measured);
        let ratio = abs_f64(&m.terms[1]) / abs_f64(&m.terms[0]);
        assert!(rel0 < 0.5);
        assert!(rel < rel0 && rel < m.tolerance / abs_f64(&m.measured));
        assert!(ratio > 0.01 * z.modulus.to_f64() && ratio < 100.0 * z.modulus.to_f64());
    }

    #[test]
    fn qp1_improvement_against_sum() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.7)).unwrap();
        for (p, gain) in [(10, 10.0), (12, 100.0)] {
            let z = SurfacePoint::new(q.real_q().unwrap().powi(p), Mp::pi_p(c.bits()) / Mp::int(2)).unwrap();
            let borel = EntireBorelQp1::for_laplace(&q, &c, z.modulus.to_f64() * 0.7).unwrap();
            let oracle = sum_qp1(&z, &q, &c, &borel).unwrap();
            let v = improved_qp1(&z, &q, 2, None, &c).unwrap();
            let (plain, improved) = truncation_error(&v, &oracle.value);
            assert!(plain / improved > gain, "|z| = q^{p}: plain {plain:e}, improved {improved:e}");
            assert!(improved < 3.0 * v.err_estimate);
        }
    }
}
