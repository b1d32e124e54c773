//! Padé continuation of the regular solution of
//! `w(qz) w(z)² w(z/q) = w(z) − z` and its pole / zero / fixed-point lattice.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coeffs::regular_e_numeric;
use crate::error::{domain, Result};
use crate::linalg::{horner, lstsq, poly_roots};
use crate::precision::PrecisionContext;
use crate::qborel::{pade, PowerSeries, RationalApprox};
use crate::qcore::QBase;
use crate::scalar::{ComplexExt, Real};

/// Roots closer than this (relative) are merged into one point.
pub const MERGE_REL: f64 = 1e-4;
/// A point is stable when the companion approximant moves it less than this (relative).
pub const STABLE_REL: f64 = 1e-4;
/// Chain matching tolerance relative to `|z_p|`.
pub const CHAIN_REL: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct RegularApprox<T: Real> {
    pub approx: RationalApprox<T>,
    pub coeffs: Vec<Complex<T>>,
    /// `|e_n|^{-1/n}` over the last quarter of the coefficients.
    pub empirical_radius: f64,
    pub warning: Option<String>,
}

impl<T: Real> RegularApprox<T> {
    pub fn eval(&self, z: &Complex<T>) -> Complex<T> {
        self.approx.eval(z)
    }
}

/// `[L/M]` Padé approximant of `Σ e_n zⁿ` on cube-root branch `branch`.
pub fn solve_regular<T: Real>(
    branch: u8,
    q: &QBase<T>,
    order: usize,
    l: usize,
    m: usize,
    ctx: &PrecisionContext,
) -> Result<RegularApprox<T>> {
    if order < l + m {
        return domain(format!("order {order} is below L + M = {}", l + m));
    }
    let qb = q.q.with_bits(ctx.bits());
    let coeffs = regular_e_numeric(order, branch, &qb)?;
    let series = PowerSeries::new(coeffs.clone(), "z", ctx);
    let approx = pade(&series, l, m)?;
    let lo = (3 * order / 4).max(1);
    let empirical_radius = (lo..=order)
        .map(|n| 10f64.powf(-coeffs[n].log10_abs() / n as f64))
        .fold(f64::INFINITY, f64::min);
    let mut warnings = Vec::new();
    if !(empirical_radius > 1e-3) {
        warnings.push(format!("coefficients grow fast (empirical radius {empirical_radius:e}); the expansion may diverge"));
    }
    if approx.degenerate {
        warnings.push("Padé block is numerically singular".into());
    }
    let warning = (!warnings.is_empty()).then(|| warnings.join("; "));
    Ok(RegularApprox { approx, coeffs, empirical_radius, warning })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Pole,
    Zero,
    Stationary,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticePoint {
    pub x: f64,
    pub y: f64,
    pub kind: PointKind,
    pub multiplicity: usize,
    /// Relative displacement against the companion approximant.
    pub moved: f64,
}

impl LatticePoint {
    pub fn z(&self) -> Complex<f64> {
        Complex::new(self.x, self.y)
    }
}

/// Indices into the zero / stationary lists, matched around one pole.
#[derive(Debug, Clone, Serialize)]
pub struct Chain {
    pub pole: usize,
    pub zero_in: Option<usize>,
    pub zero_out: Option<usize>,
    pub stationary_in: Option<usize>,
    pub stationary_out: Option<usize>,
}

impl Chain {
    pub fn complete(&self) -> bool {
        self.zero_in.is_some() && self.zero_out.is_some() && self.stationary_in.is_some() && self.stationary_out.is_some()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub poles: Vec<LatticePoint>,
    pub zeros: Vec<LatticePoint>,
    pub stationary: Vec<LatticePoint>,
    /// Points that moved too much between the two approximants.
    pub unstable: Vec<LatticePoint>,
    pub chains: Vec<Chain>,
    pub max_stable_move: f64,
}

impl LatticeReport {
    /// Pole closest to the origin.
    pub fn nearest_pole(&self) -> Option<&LatticePoint> {
        self.poles.iter().min_by(|a, b| a.z().norm().partial_cmp(&b.z().norm()).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Stable points as CSV rows `x,y,type`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,type\n");
        for p in self.poles.iter().chain(&self.zeros).chain(&self.stationary) {
            let t = match p.kind {
                PointKind::Pole => "pole",
                PointKind::Zero => "zero",
                PointKind::Stationary => "stationary",
            };
            let tidy = |v: f64| if v.abs() < 5e-11 { 0.0 } else { v };
            s.push_str(&format!("{:.10},{:.10},{t}\n", tidy(p.x), tidy(p.y)));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice report serializes")
    }
}

fn cluster<T: Real>(roots: Vec<Complex<T>>) -> Vec<(Complex<T>, usize)> {
    let mut out: Vec<(Complex<T>, usize)> = Vec::new();
    for r in roots {
        let hit = out.iter_mut().find(|(c, _)| (c.clone() - r.clone()).log10_abs() - c.log10_abs() < MERGE_REL.log10());
        match hit {
            Some((c, k)) => {
                let kk = T::int(*k as i64);
                *c = (c.clone().scale_by(&kk) + r) / T::int(*k as i64 + 1);
                *k += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out
}

/// `P(z) − z Q(z)`.
fn fixed_point_poly<T: Real>(a: &RationalApprox<T>) -> Vec<Complex<T>> {
    let n = a.numerator.len().max(a.denominator.len() + 1);
    let mut p = vec![Complex::<T>::zero(); n];
    for (k, c) in a.numerator.iter().enumerate() {
        p[k] = p[k].clone() + c.clone();
    }
    for (k, c) in a.denominator.iter().enumerate() {
        p[k + 1] = p[k + 1].clone() - c.clone();
    }
    p
}

fn points<T: Real>(
    main: &[Complex<T>],
    other: &[Complex<T>],
    kind: PointKind,
    radius: f64,
) -> Result<(Vec<LatticePoint>, Vec<LatticePoint>)> {
    let a = cluster(poly_roots(main)?);
    let b = cluster(poly_roots(other)?);
    let (mut stable, mut unstable) = (Vec::new(), Vec::new());
    for (r, k) in a {
        let abs = r.cabs().to_f64();
        if abs > radius {
            continue;
        }
        let moved = b
            .iter()
            .map(|(o, _)| 10f64.powf((o.clone() - r.clone()).log10_abs()))
            .fold(f64::INFINITY, f64::min)
            / abs;
        let p = LatticePoint { x: r.re.to_f64(), y: r.im.to_f64(), kind, multiplicity: k, moved };
        if moved < STABLE_REL {
            stable.push(p);
        } else {
            unstable.push(p);
        }
    }
    let key = |p: &LatticePoint| p.z().norm();
    stable.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal));
    Ok((stable, unstable))
}

fn nearest(list: &[LatticePoint], target: Complex<f64>, tol: f64) -> Option<usize> {
    list.iter()
        .enumerate()
        .map(|(i, p)| (i, (p.z() - target).norm()))
        .filter(|(_, d)| *d < tol)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
}

/// Stable poles, zeros and fixed points (`w(z) = z`) of `approx` in
/// `|z| ≤ radius`, checked against `companion` (a lower-order approximant),
/// with chains `q^{±1} z_p` (zeros) and `q^{±2} z_p` (fixed points).
pub fn lattice<T: Real>(
    approx: &RationalApprox<T>,
    companion: &RationalApprox<T>,
    q: &QBase<T>,
    radius: f64,
) -> Result<LatticeReport> {
    let big = radius * 1.5;
    let (poles, mut unstable) = points(&approx.denominator, &companion.denominator, PointKind::Pole, radius)?;
    let (zeros, u2) = points(&approx.numerator, &companion.numerator, PointKind::Zero, big)?;
    let (stationary, u3) = points(&fixed_point_poly(approx), &fixed_point_poly(companion), PointKind::Stationary, big)?;
    unstable.extend(u2);
    unstable.extend(u3);
    let qv = Complex::new(q.q.re.to_f64(), q.q.im.to_f64());
    let chains = poles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let z = p.z();
            let tol = CHAIN_REL * z.norm();
            Chain {
                pole: i,
                zero_in: nearest(&zeros, z * qv, tol),
                zero_out: nearest(&zeros, z / qv, tol),
                stationary_in: nearest(&stationary, z * qv * qv, tol),
                stationary_out: nearest(&stationary, z / (qv * qv), tol),
            }
        })
        .collect();
    let max_stable_move = poles.iter().chain(&zeros).chain(&stationary).map(|p| p.moved).fold(0.0, f64::max);
    Ok(LatticeReport { poles, zeros, stationary, unstable, chains, max_stable_move })
}

#[derive(Debug, Clone)]
pub struct AlphaFit<T: Real> {
    /// Exponent: `w ≈ A (z − z₀)^{−2α}` at a pole, `A (z − z₀)^{α}` at a zero.
    pub alpha: Complex<T>,
    /// `ln A` averaged over the sampled directions.
    pub ln_amplitude: Complex<T>,
    pub residual: f64,
    /// Regression residual below `10⁻²`.
    pub quality_ok: bool,
}

/// Local exponent from `d ln w / d ln(z − z₀)` sampled on radial lines
/// around `z0`, at radii from `r_min` to `r_max` (relative to `|z0|`).
/// `pole` selects the `−2α` (pole) or `α` (zero) normalization.
pub fn alpha_fit<T: Real>(
    f: &dyn Fn(&Complex<T>) -> Complex<T>,
    z0: &Complex<T>,
    pole: bool,
    r_min: f64,
    r_max: f64,
) -> Result<AlphaFit<T>> {
    let bits = z0.re.bits();
    let abs = z0.cabs().to_f64();
    let dirs = 8;
    let samples = 24;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for d in 0..dirs {
        let th = 2.0 * std::f64::consts::PI * (d as f64 + 0.125) / dirs as f64;
        let mut prev_arg: Option<f64> = None;
        let mut unwrap = 0.0;
        for s in 0..samples {
            let lr = T::from_f64_p((r_min * abs).ln() + ((r_max / r_min).ln()) * s as f64 / (samples - 1) as f64, bits);
            let dz = Complex::from_polar_t(&lr.exp(), &T::from_f64_p(th, bits));
            let w = f(&(z0.clone() + dz));
            let lw = w.cln();
            let a = lw.im.to_f64();
            if let Some(p) = prev_arg {
                let jump = a + unwrap - p;
                unwrap -= (jump / (2.0 * std::f64::consts::PI)).round() * 2.0 * std::f64::consts::PI;
            }
            prev_arg = Some(a + unwrap);
            let y = Complex::new(lw.re, lw.im + T::from_f64_p(unwrap, bits));
            let mut row = vec![Complex::<T>::zero(); dirs + 1];
            row[0] = Complex::real(lr);
            row[1 + d] = Complex::one();
            rows.push(row);
            rhs.push(y);
        }
    }
    let scale = (rhs.len() as f64).sqrt();
    let (x, res, _) = lstsq(rows, rhs)?;
    let slope = x[0].clone();
    let alpha = if pole { slope.scale_by(&T::ratio(-1, 2, bits)) } else { slope };
    let ln_amplitude = x[1..].iter().fold(Complex::<T>::zero(), |a, c| a + c.clone()) / T::int(dirs as i64);
    let residual = res.to_f64() / scale;
    Ok(AlphaFit { alpha, ln_amplitude, residual, quality_ok: residual < 1e-2 })
}

/// Fits at a pole of a regular approximant.
pub fn alpha_fit_pole<T: Real>(approx: &RationalApprox<T>, pole: &Complex<T>) -> Result<AlphaFit<T>> {
    alpha_fit(&|z: &Complex<T>| approx.eval(z), pole, true, 1e-4, 1e-3)
}

/// Fits at a zero of a regular approximant.
pub fn alpha_fit_zero<T: Real>(approx: &RationalApprox<T>, zero: &Complex<T>) -> Result<AlphaFit<T>> {
    alpha_fit(&|z: &Complex<T>| approx.eval(z), zero, false, 1e-4, 1e-3)
}

/// Max relative difference between two approximants on `|z| = r`.
pub fn approx_agreement<T: Real>(a: &RationalApprox<T>, b: &RationalApprox<T>, r: f64, samples: usize) -> f64 {
    let bits = a.numerator[0].re.bits();
    (0..samples)
        .map(|k| {
            let z = Complex::from_polar_t(
                &T::from_f64_p(r, bits),
                &T::from_f64_p(2.0 * std::f64::consts::PI * k as f64 / samples as f64, bits),
            );
            let (va, vb) = (a.eval(&z), b.eval(&z));
            10f64.powf((va.clone() - vb).log10_abs() - va.log10_abs())
        })
        .fold(0.0, f64::max)
}

/// Value and derivative of the approximant at the origin.
pub fn origin_jet<T: Real>(a: &RationalApprox<T>) -> (Complex<T>, Complex<T>) {
    let p0 = a.numerator[0].clone();
    let q0 = a.denominator[0].clone();
    let p1 = a.numerator.get(1).cloned().unwrap_or_else(Complex::zero);
    let q1 = a.denominator.get(1).cloned().unwrap_or_else(Complex::zero);
    let w0 = p0.clone() / q0.clone();
    let w1 = (p1 * q0.clone() - p0 * q1) / (q0.clone() * q0);
    (w0, w1)
}

/// `w` of the approximant on a grid: convenience for plotting.
pub fn eval_poly<T: Real>(p: &[Complex<T>], z: &Complex<T>) -> Complex<T> {
    horner(p, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp;

    fn setup() -> (PrecisionContext, QBase<Mp>) {
        let c = PrecisionContext::with_digits(80).unwrap();
        let q = QBase::real(c.parse::<Mp>("0.7").unwrap()).unwrap();
        (c, q)
    }

    #[test]
    fn approximant_reproduces_origin_jet() {
        let (c, q) = setup();
        let r = solve_regular(0, &q, 20, 10, 10, &c).unwrap();
        let (w0, w1) = origin_jet(&r.approx);
        assert!((w0 - Complex::<Mp>::one()).log10_abs() < -60.0);
        let qq = q.q.clone();
        let e1 = -(qq.clone() + Complex::one() + qq.cinv()).cinv();
        assert!((w1 - e1).log10_abs() < -60.0);
    }

    #[test]
    fn figure_one_lattice() {
        let (c, q) = setup();
        let a = solve_regular(0, &q, 80, 40, 40, &c).unwrap();
        let b = solve_regular(0, &q, 72, 36, 36, &c).unwrap();
        assert!(approx_agreement(&a.approx, &b.approx, 1.0, 32) < 1e-8);
        let rep = lattice(&a.approx, &b.approx, &q, 3.0).unwrap();
        let zp = rep.nearest_pole().unwrap();
        eprintln!("z_p = {} {} (mult {}), moved {:e}", zp.x, zp.y, zp.multiplicity, zp.moved);
        eprintln!("{}", rep.to_csv());
        assert!((zp.x - 1.2946).abs() < 5e-4 && zp.y.abs() < 5e-4);
        let ch = rep.chains.iter().find(|ch| rep.poles[ch.pole].x == zp.x).unwrap();
        assert!(ch.complete(), "{ch:?}");
        let pole = Complex::new(Mp::new(c.bits(), zp.x), Mp::new(c.bits(), zp.y));
        let fit = alpha_fit_pole(&a.approx, &pole).unwrap();
        eprintln!("alpha = {:?}, residual {:e}", fit.alpha, fit.residual);
        assert!((fit.alpha.re.to_f64() - 1.0).abs() < 0.02 && fit.alpha.im.to_f64().abs() < 0.02);
        let z_in = &rep.zeros[ch.zero_in.unwrap()];
        let zero = Complex::new(Mp::new(c.bits(), z_in.x), Mp::new(c.bits(), z_in.y));
        let zfit = alpha_fit_zero(&a.approx, &zero).unwrap();
        assert!((zfit.alpha.re.to_f64() - fit.alpha.re.to_f64()).abs() < 0.05);
    }

    #[test]
    fn planted_double_pole_gives_unit_exponent() {
        let bits = 200;
        let zp = Complex::new(Mp::new(bits, 0.8), Mp::new(bits, 0.3));
        let f = |z: &Complex<Mp>| {
            let d = z.clone() - zp.clone();
            (d.clone() * d).cinv().scale_by(&Mp::new(bits, -2.5))
        };
        let fit = alpha_fit(&f, &zp, true, 1e-4, 1e-2).unwrap();
        assert!((fit.alpha - Complex::new(Mp::new(bits, 1.0), Mp::new(bits, 0.0))).log10_abs() < -40.0);
        assert!(fit.quality_ok);
    }

    #[test]
    fn empty_window_has_no_points() {
        let (c, q) = setup();
        let a = solve_regular(0, &q, 40, 20, 20, &c).unwrap();
        let b = solve_regular(0, &q, 36, 18, 18, &c).unwrap();
        let rep = lattice(&a.approx, &b.approx, &q, 0.5).unwrap();
        assert!(rep.poles.is_empty());
        assert_eq!(rep.to_csv().lines().count(), 1 + rep.zeros.len() + rep.stationary.len());
    }
}
