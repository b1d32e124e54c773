//! q-Borel transforms, Padé continuation, pole and residue extraction, and
//! evaluators for the Borel transforms of ₂φ₀ and of the qP1 solution.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeffs::qp1_d_numeric;
use crate::error::{domain, Error, Result};
use crate::linalg::{horner, horner_d, lstsq, poly_roots, solve};
use crate::precision::PrecisionContext;
use crate::qcore::{qpoch_inf, QBase};
use crate::scalar::{ComplexExt, Real};

#[derive(Debug, Clone)]
pub struct PowerSeries<T: Real> {
    pub coeffs: Vec<Complex<T>>,
    pub var_name: String,
    pub ctx: PrecisionContext,
}

impl<T: Real> PowerSeries<T> {
    pub fn new(coeffs: Vec<Complex<T>>, var_name: &str, ctx: &PrecisionContext) -> Self {
        Self { coeffs, var_name: var_name.to_string(), ctx: ctx.clone() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &Complex<T>) -> Complex<T> {
        horner(&self.coeffs, t)
    }
}

/// Multiplies coefficient `n` by `q^{n(n-1)/2}`, and by `(-1)^n` when
/// `alternate_sign`.
pub fn borel<T: Real>(series: &PowerSeries<T>, q: &QBase<T>, alternate_sign: bool) -> PowerSeries<T> {
    let mut w = Complex::<T>::one();
    let mut qn = Complex::<T>::one();
    let coeffs = series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                w = w.clone() * qn.clone();
                qn = qn.clone() * q.q.clone();
            }
            let v = c.clone() * w.clone();
            if alternate_sign && n % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    PowerSeries { coeffs, var_name: "t".into(), ctx: series.ctx.clone() }
}

/// `[L/M]` Padé approximant `P/Q` with `Q(0) = 1`.
#[derive(Debug, Clone)]
pub struct RationalApprox<T: Real> {
    pub numerator: Vec<Complex<T>>,
    pub denominator: Vec<Complex<T>>,
    pub l: usize,
    pub m: usize,
    /// Set when the Hankel block is numerically singular at the working precision.
    pub degenerate: bool,
    /// Relative residual of the defining linear system (log10).
    pub residual_log10: f64,
}

impl<T: Real> RationalApprox<T> {
    pub fn eval(&self, t: &Complex<T>) -> Complex<T> {
        horner(&self.numerator, t) / horner(&self.denominator, t)
    }
}

pub fn pade<T: Real>(series: &PowerSeries<T>, l: usize, m: usize) -> Result<RationalApprox<T>> {
    if series.order() < l + m {
        return domain(format!("Padé [{l}/{m}] needs order >= {}, series has {}", l + m, series.order()));
    }
    let a = |k: i64| -> Complex<T> {
        if k < 0 {
            Complex::zero()
        } else {
            series.coeffs[k as usize].clone()
        }
    };
    let mut den = vec![Complex::<T>::one()];
    let mut degenerate = false;
    let mut residual_log10 = f64::NEG_INFINITY;
    if m > 0 {
        // Σ_{j=1}^{M} b_j a_{L+i-j} = -a_{L+i}, i = 1..M
        let rows: Vec<Vec<Complex<T>>> =
            (1..=m).map(|i| (1..=m).map(|j| a(l as i64 + i as i64 - j as i64)).collect()).collect();
        let rhs: Vec<Complex<T>> = (1..=m).map(|i| -a((l + i) as i64)).collect();
        let sol = solve(rows.clone(), rhs.clone()).map_err(|_| Error::Degenerate(format!("singular Padé block [{l}/{m}]")))?;
        let digits = series.ctx.digits as f64;
        degenerate = sol.min_pivot_log10 < -digits + 5.0;
        let scale = rhs.iter().map(|x| x.log10_abs()).fold(f64::NEG_INFINITY, f64::max);
        for (row, r) in rows.iter().zip(&rhs) {
            let mut s = -r.clone();
            for (aij, xj) in row.iter().zip(&sol.x) {
                s = s + aij.clone() * xj.clone();
            }
            residual_log10 = residual_log10.max(s.log10_abs() - scale);
        }
        den.extend(sol.x);
    }
    let numerator = (0..=l)
        .map(|i| {
            let mut s = Complex::<T>::zero();
            for (j, bj) in den.iter().enumerate().take(i.min(m) + 1) {
                s = s + bj.clone() * a(i as i64 - j as i64);
            }
            s
        })
        .collect();
    Ok(RationalApprox { numerator, denominator: den, l, m, degenerate, residual_log10 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleJson {
    pub re: f64,
    pub im: f64,
    pub res_re: f64,
    pub res_im: f64,
    pub stability: f64,
}

#[derive(Debug, Clone)]
pub struct Pole<T: Real> {
    pub location: Complex<T>,
    pub residue: Complex<T>,
    pub stability: f64,
}

/// Poles accepted by the stability filter, sorted by modulus.
#[derive(Debug, Clone)]
pub struct PoleReport<T: Real> {
    pub poles: Vec<Pole<T>>,
    /// Candidates inside the window that failed the filter.
    pub rejected: Vec<Pole<T>>,
}

/// Stability threshold for accepting a pole.
pub const STABILITY_THRESHOLD: f64 = 0.5;

/// Maps a relative location change to a score in `[0, 1]`; a change of
/// `1e-4` scores exactly the threshold `0.5`, `1e-8` or smaller scores 1.
pub fn stability_score(rel_move_log10: f64) -> f64 {
    (-rel_move_log10 / 8.0).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct PoleWindow {
    pub radius: f64,
}

impl PoleWindow {
    /// `|t| ≤ q^{-(jmax + 1/2)}`.
    pub fn for_jmax(q_abs: f64, jmax: usize) -> Self {
        Self { radius: q_abs.powf(-(jmax as f64 + 0.5)) }
    }
}

impl<T: Real> PoleReport<T> {
    pub fn to_json(&self) -> String {
        let poles: Vec<PoleJson> = self
            .poles
            .iter()
            .map(|p| PoleJson {
                re: p.location.re.to_f64(),
                im: p.location.im.to_f64(),
                res_re: p.residue.re.to_f64(),
                res_im: p.residue.im.to_f64(),
                stability: p.stability,
            })
            .collect();
        serde_json::json!({ "poles": poles }).to_string()
    }

    /// The accepted pole nearest to `t`.
    pub fn nearest(&self, t: &Complex<T>) -> Option<&Pole<T>> {
        self.poles.iter().min_by(|a, b| {
            let da = (a.location.clone() - t.clone()).log10_abs();
            let db = (b.location.clone() - t.clone()).log10_abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

fn window_roots<T: Real>(approx: &RationalApprox<T>, window: PoleWindow) -> Result<Vec<Complex<T>>> {
    let lr = window.radius.log10();
    Ok(poly_roots(&approx.denominator)?.into_iter().filter(|r| r.log10_abs() <= lr).collect())
}

/// Denominator roots of `approx` inside `window`, with residues `P/Q'` and
/// stability from comparing against `[L+2/M+2]` (or `[L-2/M-2]` when the
/// series is too short).
pub fn poles<T: Real>(approx: &RationalApprox<T>, series: &PowerSeries<T>, window: PoleWindow) -> Result<PoleReport<T>> {
    let (l, m) = (approx.l, approx.m);
    let other = if series.order() >= l + m + 4 {
        Some(pade(series, l + 2, m + 2)?)
    } else if l >= 2 && m >= 2 {
        Some(pade(series, l - 2, m - 2)?)
    } else {
        None
    };
    let roots = poly_roots(&approx.denominator)?;
    let other_roots = match &other {
        Some(o) => poly_roots(&o.denominator)?,
        None => Vec::new(),
    };
    let lr = window.radius.log10();
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for r in roots.into_iter().filter(|r| r.log10_abs() <= lr) {
        let (_, dq) = horner_d(&approx.denominator, &r);
        let residue = horner(&approx.numerator, &r) / dq;
        let mv = other_roots
            .iter()
            .map(|o| (o.clone() - r.clone()).log10_abs())
            .fold(f64::INFINITY, f64::min)
            - r.log10_abs();
        let stability = if other_roots.is_empty() { 0.0 } else { stability_score(mv) };
        let p = Pole { location: r, residue, stability };
        if stability >= STABILITY_THRESHOLD {
            accepted.push(p);
        } else {
            rejected.push(p);
        }
    }
    let key = |p: &Pole<T>| p.location.log10_abs();
    accepted.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    rejected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    Ok(PoleReport { poles: accepted, rejected })
}

/// Stability of a single approximant's poles without a companion series.
pub fn roots_in_window<T: Real>(approx: &RationalApprox<T>, window: PoleWindow) -> Result<Vec<Complex<T>>> {
    window_roots(approx, window)
}

/// `₂φ₁(a,b;0;q,-t) = Σ (a;q)_n (b;q)_n / (q;q)_n (-t)^n` for `|t| < 1`.
pub fn phi21_series<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    t: &Complex<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<Complex<T>> {
    if t.cabs().to_f64() >= 1.0 {
        return domain("the 2phi1 series needs |t| < 1");
    }
    let one = Complex::<T>::one();
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut qk = one.clone();
    let tol = ctx.tail_tol.log10() - 1.0;
    for _ in 0..10_000_000usize {
        let r = (one.clone() - a.clone() * qk.clone()) * (one.clone() - b.clone() * qk.clone())
            / (one.clone() - qk.clone() * q.q.clone());
        term = -(term * r * t.clone());
        qk = qk * q.q.clone();
        sum = sum + term.clone();
        if term.log10_abs() - sum.log10_abs() < tol && t.log10_abs() < 0.0 {
            // tail is geometric with ratio ≈ |t|
            let rest = term.log10_abs() - (1.0 - t.cabs().to_f64()).log10();
            if rest - sum.log10_abs() < tol {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence("2phi1 series".into()))
}

/// `B_q(t) = (-bt;q)_∞/(-t;q)_∞ · ₁φ₁(b; -bt; q, -at)`, valid for all `t`
/// away from `-q^{-j}`.
pub fn heine_b<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    t: &Complex<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<Complex<T>> {
    let one = Complex::<T>::one();
    let mut qj = one.clone();
    let qa = q.abs_f64();
    for j in 0.. {
        let d = one.clone() + t.clone() * qj.clone();
        if d.cabs().to_f64() < 1e-10 {
            return Err(Error::PoleProximity(format!("t is within 1e-10 of the pole -q^-{j}")));
        }
        if abs_f64(t) * qa.powi(j) < 0.5 {
            break;
        }
        qj = qj * q.q.clone();
    }
    // Σ_n R_n P_n with R_n = (b;q)_n/(q;q)_n q^{n(n-1)/2} (a t)^n and
    // P_n = (-b t q^n; q)_∞, computed downward.
    let mut r = vec![one.clone()];
    let mut qn = one.clone();
    let tol = ctx.tail_tol.log10() - 2.0;
    let at = a.clone() * t.clone();
    let mut best = 0f64;
    loop {
        let n = r.len() - 1;
        let next = r[n].clone() * (one.clone() - b.clone() * qn.clone()) / (one.clone() - qn.clone() * q.q.clone())
            * qn.clone()
            * at.clone();
        qn = qn * q.q.clone();
        let lv = next.log10_abs();
        best = best.max(lv);
        r.push(next);
        if n > 2 && (lv < best + tol || lv == f64::NEG_INFINITY) {
            break;
        }
        if n > 100_000 {
            return Err(Error::NonConvergence("1phi1 series".into()));
        }
    }
    let nn = r.len() - 1;
    let qnn = q.powi(nn as i64);
    let mut p = qpoch_inf(&(-(b.clone() * t.clone() * qnn.clone())), q, ctx)?;
    let mut sum = r[nn].clone() * p.clone();
    let mut qk = qnn;
    for n in (0..nn).rev() {
        qk = qk / q.q.clone();
        p = p * (one.clone() + b.clone() * t.clone() * qk.clone());
        sum = sum + r[n].clone() * p.clone();
    }
    Ok(sum / qpoch_inf(&(-t.clone()), q, ctx)?)
}

fn abs_f64<T: Real>(z: &Complex<T>) -> f64 {
    crate::scalar::abs_f64(z)
}

/// `d_j(a,b)` for `j = 0..=jmax` from the two-term recurrence.
pub fn residues_closed<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    jmax: usize,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<Vec<Complex<T>>> {
    let one = Complex::<T>::one();
    let d0 = qpoch_inf(a, q, ctx)? * qpoch_inf(b, q, ctx)? / qpoch_inf(&q.q, q, ctx)?;
    let mut d = vec![d0];
    let mut prev2 = Complex::<T>::zero();
    for j in 1..=jmax {
        let qmj = q.powi(-(j as i64));
        let rhs = (one.clone() - (a.clone() + b.clone()) * qmj.clone()) * d[j - 1].clone()
            + a.clone() * b.clone() * qmj.clone() * prev2.clone();
        prev2 = d[j - 1].clone();
        d.push(rhs / (one.clone() - qmj));
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy)]
pub enum LateKind<'a, T: Real> {
    Phi20 { a: &'a Complex<T>, b: &'a Complex<T> },
    Qp1,
}

#[derive(Debug, Clone)]
pub struct LateFit<T: Real> {
    /// Fitted `r_j`: coefficient of `q^{jn}`.
    pub r: Vec<Complex<T>>,
    pub residual: f64,
    pub ill_conditioned: bool,
}

/// Least-squares fit of late coefficients to `Σ_{j ≤ jmax} r_j q^{jn}`.
///
/// For ₂φ₀ the data are `(a;q)_n(b;q)_n/(q;q)_n`; for qP1 they are
/// `d_n(q) = q^{n(n-1)/2} c_n`, so `r_j = K_j q^j`.
pub fn late_terms_check<T: Real>(
    kind: LateKind<'_, T>,
    n_range: std::ops::RangeInclusive<usize>,
    jmax: usize,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Result<LateFit<T>> {
    let (n0, n1) = (*n_range.start(), *n_range.end());
    if n1 < n0 || n1 - n0 < jmax {
        return Err(Error::IllConditioned(format!("range {n0}..={n1} too short for {} unknowns", jmax + 1)));
    }
    let y: Vec<Complex<T>> = match kind {
        LateKind::Phi20 { a, b } => {
            let one = Complex::<T>::one();
            let mut v = one.clone();
            let mut out = vec![v.clone()];
            let mut qk = one.clone();
            for _ in 0..n1 {
                v = v * (one.clone() - a.clone() * qk.clone()) * (one.clone() - b.clone() * qk.clone())
                    / (one.clone() - qk.clone() * q.q.clone());
                qk = qk * q.q.clone();
                out.push(v.clone());
            }
            out
        }
        LateKind::Qp1 => qp1_d_numeric(n1, &q.q.with_bits(ctx.bits())),
    };
    let rows: Vec<Vec<Complex<T>>> =
        (n0..=n1).map(|n| (0..=jmax).map(|j| q.powi((j * (n - n0)) as i64)).collect()).collect();
    let rhs: Vec<Complex<T>> = (n0..=n1).map(|n| y[n].clone()).collect();
    let (x, res, cond) = lstsq(rows, rhs)?;
    let r = x.into_iter().enumerate().map(|(j, c)| c * q.powi(-((j * n0) as i64))).collect();
    Ok(LateFit { r, residual: res.to_f64(), ill_conditioned: cond < -(ctx.digits as f64) / 2.0 })
}

/// Evaluator of a Borel transform in the whole `t`-plane.
pub trait BorelEval<T: Real>: Send + Sync {
    fn eval(&self, t: &Complex<T>) -> Result<Complex<T>>;
    /// Estimated relative continuation error at `t` (0 when exact).
    fn continuation_error(&self, _t: &Complex<T>) -> f64 {
        0.0
    }
}

impl<T: Real, F> BorelEval<T> for F
where
    F: Fn(&Complex<T>) -> Result<Complex<T>> + Send + Sync,
{
    fn eval(&self, t: &Complex<T>) -> Result<Complex<T>> {
        self(t)
    }
}

/// ₂φ₀ Borel transform through Heine's transformation.
pub struct HeineBorel<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub q: QBase<T>,
    pub ctx: PrecisionContext,
}

impl<T: Real> BorelEval<T> for HeineBorel<T> {
    fn eval(&self, t: &Complex<T>) -> Result<Complex<T>> {
        heine_b(&self.a, &self.b, t, &self.q, &self.ctx)
    }
}

/// `B_I(t)` from its entire factor: `G(t) = (-t;q)_∞ B_I(t) = Σ g_n t^n`,
/// then `B_I = G / (-t;q)_∞`. The coefficients `g_n` decay like
/// `q^{n²/6}`, so the series converges everywhere; they are formed at
/// raised precision because of cancellation in the Cauchy product.
pub struct EntireBorelQp1<T: Real> {
    g: Vec<Complex<T>>,
    q: QBase<T>,
    ctx: PrecisionContext,
    max_log10_t: f64,
}

impl<T: Real> EntireBorelQp1<T> {
    /// Builds `g_n` for `n` large enough to evaluate at `|t| ≤ 10^{max_log10_t}`.
    pub fn new(q: &QBase<T>, ctx: &PrecisionContext, max_log10_t: f64) -> Result<Self> {
        let lam = -(q.abs_f64().ln());
        if !q.is_real_unit_interval {
            return domain("the entire-factor continuation needs real q");
        }
        let digits = ctx.digits as f64 + 10.0;
        let lt = max_log10_t.max(0.0) * std::f64::consts::LN_10;
        // |g_n t^n| ≈ exp(-λn²/6 + n ln|t|)
        let a = lam / 6.0;
        let nterms = ((lt + (lt * lt + 4.0 * a * digits * std::f64::consts::LN_10).sqrt()) / (2.0 * a)).ceil() as usize + 8;
        let extra_digits = (nterms as f64).powi(2) * lam / 2.0 / std::f64::consts::LN_10 + 20.0;
        let hi = ctx.with_extra_digits(extra_digits.ceil() as u32);
        let bits = hi.bits();
        let qh = q.q.with_bits(bits);
        let d = qp1_d_numeric(nterms, &qh);
        let one = Complex::<T>::one().with_bits(bits);
        // e_m = q^{m(m-1)/2} / (q;q)_m
        let mut e = vec![one.clone()];
        let mut poch = one.clone();
        let mut qtri = one.clone();
        let mut qm = one.clone();
        for _ in 1..=nterms {
            poch = poch * (one.clone() - qm.clone() * qh.clone());
            qtri = qtri * qm.clone();
            qm = qm * qh.clone();
            e.push(qtri.clone() / poch.clone());
        }
        let g = (0..=nterms)
            .map(|n| {
                let mut s = Complex::<T>::zero();
                for k in 0..=n {
                    let bk = if k % 2 == 0 { d[k].clone() } else { -d[k].clone() };
                    s = s + bk * e[n - k].clone();
                }
                s.with_bits(ctx.bits() + 64)
            })
            .collect();
        Ok(Self { g, q: q.clone(), ctx: ctx.clone(), max_log10_t })
    }

    /// Sized for Laplace integrals at `|z| ≥ min_abs_z`, which are cut near
    /// `|t| ≈ q^{-1/2}/|z|`. The cut search runs until the integrand has grown
    /// four decades past its minimum (`√(8λ ln 10)` in `ln|t|`) and the
    /// smoothed window reaches `4√λ` further.
    pub fn for_laplace(q: &QBase<T>, ctx: &PrecisionContext, min_abs_z: f64) -> Result<Self> {
        let lam = -(q.abs_f64().ln());
        let search = (8.0 * lam * std::f64::consts::LN_10).sqrt();
        let u = -min_abs_z.ln() + lam / 2.0 + search + 4.0 * lam.sqrt() + 2.0;
        Self::new(q, ctx, u.max(1.0) / std::f64::consts::LN_10)
    }

    pub fn entire_factor(&self, t: &Complex<T>) -> Result<Complex<T>> {
        let lt = t.log10_abs();
        if lt > self.max_log10_t + 1e-9 {
            return Err(Error::NonConvergence(format!("|t| = 10^{lt:.2} beyond the prepared range")));
        }
        let tb = t.with_bits(self.ctx.bits() + 64);
        let mut sum = Complex::<T>::zero();
        let mut tn = Complex::<T>::one();
        let mut peak = f64::NEG_INFINITY;
        let tol = -(self.ctx.digits as f64) - 8.0;
        let lam = -(self.q.abs_f64().ln());
        // index beyond which |g_n t^n| decreases
        let n_peak = 3.0 * lt.max(0.0) * std::f64::consts::LN_10 / lam;
        for (n, gn) in self.g.iter().enumerate() {
            let term = gn.clone() * tn.clone();
            let lv = term.log10_abs();
            peak = peak.max(lv);
            sum = sum + term;
            if n > 4 && n as f64 > n_peak && lv < peak + tol {
                return Ok(sum);
            }
            tn = tn * tb.clone();
        }
        Err(Error::NonConvergence("entire factor series truncated too early".into()))
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.g
    }
}

impl<T: Real> BorelEval<T> for EntireBorelQp1<T> {
    fn eval(&self, t: &Complex<T>) -> Result<Complex<T>> {
        let one = Complex::<T>::one();
        let mut qj = one.clone();
        for j in 0.. {
            if (one.clone() + t.clone() * qj.clone()).cabs().to_f64() < 1e-12 {
                return Err(Error::PoleProximity(format!("t is at the pole -q^-{j}")));
            }
            if abs_f64(t) * self.q.abs_f64().powi(j) < 0.5 {
                break;
            }
            qj = qj * self.q.q.clone();
        }
        let g = self.entire_factor(t)?;
        Ok((g / qpoch_inf(&(-t.clone()), &self.q, &self.ctx)?).with_bits(self.ctx.bits()))
    }
}

/// `B_I` through a Padé approximant of its Taylor series, with the
/// continuation error estimated from a second, higher approximant.
pub struct PadeBorelQp1<T: Real> {
    pub series: PowerSeries<T>,
    pub approx: RationalApprox<T>,
    pub check: RationalApprox<T>,
    pub report: PoleReport<T>,
}

impl<T: Real> PadeBorelQp1<T> {
    /// `[m/m]` from the first `2m+4` coefficients.
    pub fn new(q: &QBase<T>, ctx: &PrecisionContext, m: usize, window: PoleWindow) -> Result<Self> {
        let series = qp1_borel_series(q, ctx, 2 * m + 4);
        let approx = pade(&series, m, m)?;
        let check = pade(&series, m + 2, m + 2)?;
        let report = poles(&approx, &series, window)?;
        Ok(Self { series, approx, check, report })
    }

    /// Smallest pole stability among accepted poles within `|t| ≤ r`.
    pub fn min_stability_within(&self, r: f64) -> f64 {
        self.report
            .poles
            .iter()
            .filter(|p| abs_f64(&p.location) <= r)
            .map(|p| p.stability)
            .fold(1.0, f64::min)
    }
}

impl<T: Real> BorelEval<T> for PadeBorelQp1<T> {
    fn eval(&self, t: &Complex<T>) -> Result<Complex<T>> {
        Ok(self.approx.eval(t))
    }

    fn continuation_error(&self, t: &Complex<T>) -> f64 {
        let a = self.approx.eval(t);
        let b = self.check.eval(t);
        10f64.powf((a.clone() - b).log10_abs() - a.log10_abs())
    }
}

/// Taylor coefficients `(-1)^n d_n(q)` of `B_I` at context precision.
pub fn qp1_borel_series<T: Real>(q: &QBase<T>, ctx: &PrecisionContext, order: usize) -> PowerSeries<T> {
    let d = qp1_d_numeric(order, &q.q.with_bits(ctx.bits()));
    let coeffs = d.into_iter().enumerate().map(|(n, x)| if n % 2 == 0 { x } else { -x }).collect();
    PowerSeries::new(coeffs, "t", ctx)
}

/// Taylor coefficients of the ₂φ₁ Borel transform of ₂φ₀.
pub fn phi20_borel_series<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    q: &QBase<T>,
    ctx: &PrecisionContext,
    order: usize,
) -> PowerSeries<T> {
    let w = crate::coeffs::phi20_coeffs(a, b, order, q, ctx);
    borel(&PowerSeries::new(w, "z", ctx), q, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_digits(40).unwrap()
    }

    fn mc(x: f64, y: f64) -> Complex<Mp> {
        let b = ctx().bits();
        Complex::new(Mp::new(b, x), Mp::new(b, y))
    }

    #[test]
    fn pade_reconstructs_rational_input() {
        let c = ctx();
        let coeffs: Vec<_> = (0..6).map(|n| mc(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let s = PowerSeries::new(coeffs, "t", &c);
        let p = pade(&s, 0, 1).unwrap();
        assert!((p.denominator[1].clone() - mc(1.0, 0.0)).log10_abs() < -35.0);
        let poly: Vec<_> = [3.0, -1.0, 2.0, 0.5, 7.0, -4.0].iter().map(|&x| mc(x, 0.0)).collect();
        let p = pade(&PowerSeries::new(poly.clone(), "t", &c), 5, 0).unwrap();
        for (a, b) in p.numerator.iter().zip(&poly) {
            assert!((a.clone() - b.clone()).log10_abs() < -35.0);
        }
    }

    #[test]
    fn planted_pole_recovered() {
        let c = ctx();
        // 3/(t - (2+i)) + 1/(1 - t/5)
        let p0 = mc(2.0, 1.0);
        let coeffs: Vec<_> = (0..12)
            .map(|n| {
                let a = -(mc(3.0, 0.0) / p0.clone().cpowi(n as i64 + 1));
                a + mc(0.2, 0.0).cpowi(n as i64)
            })
            .collect();
        let s = PowerSeries::new(coeffs, "t", &c);
        let approx = pade(&s, 1, 2).unwrap();
        let rep = poles(&approx, &s, PoleWindow { radius: 10.0 }).unwrap();
        let p = rep.nearest(&p0).unwrap();
        assert!((p.location.clone() - p0).log10_abs() < -20.0);
        assert!((p.residue.clone() - mc(3.0, 0.0)).log10_abs() < -20.0);
    }

    #[test]
    fn heine_matches_series_inside_disk() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.5)).unwrap();
        let (a, b) = (mc(0.2, 0.0), mc(0.3, 0.0));
        let t = mc(0.3, 0.4);
        let h = heine_b(&a, &b, &t, &q, &c).unwrap();
        let s = phi21_series(&a, &b, &t, &q, &c).unwrap();
        assert!((h - s).log10_abs() < -35.0);
        let one = heine_b(&a, &b, &mc(0.0, 0.0), &q, &c).unwrap();
        assert!((one - mc(1.0, 0.0)).log10_abs() < -38.0);
    }

    #[test]
    fn late_fit_planted_geometric() {
        let c = ctx();
        let q = QBase::real(Mp::new(c.bits(), 0.5)).unwrap();
        // (a;q)_n (b;q)_n/(q;q)_n with a=q, b=0 is exactly 1: r = (1, 0, ...)
        let a = q.q.clone();
        let b = mc(0.0, 0.0);
        let fit = late_terms_check(LateKind::Phi20 { a: &a, b: &b }, 5..=20, 2, &q, &c).unwrap();
        assert!((fit.r[0].clone() - mc(1.0, 0.0)).log10_abs() < -30.0);
        assert!(fit.r[1].log10_abs() < -30.0);
    }
}
