//! Stokes multipliers `K_j(q)`: the residues of the qP1 Borel transform at
//! `t = -q^{-j}`.
//!
//! Three independent routes are provided: a numeric fit of the late
//! coefficients `d_n`, the exact Taylor series of `K₀` read off the stable
//! low-order coefficients of `d_n`, and an exact linear system obtained by
//! substituting the exponentially small correction into the linearized
//! equation. The conjectured closed forms are kept separate so they can be
//! tested against all three.

use std::ops::RangeInclusive;

use num_complex::Complex;
use num_traits::One;
use rug::Integer;
use serde_json::{json, Value};

use crate::coeffs::{qp1_c, riccati_f, simple_c};
use crate::error::{domain, Result};
use crate::linalg::lstsq;
use crate::poly::{qq_poch, LaurentPolyQ, RatFuncQ, SparsePolyJson};
use crate::precision::PrecisionContext;
use crate::qcore::{qpoch_inf, qpoch_n, QBase};
use crate::scalar::{ComplexExt, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierMode {
    Numeric,
    Symbolic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Multipliers<T: Real> {
    /// `K₀ … K_jmax` at a fixed `q`.
    Numeric(Vec<Complex<T>>),
    /// `K_j / K₀` as rational functions of `q` (entry 0 is 1).
    Symbolic(Vec<RatFuncQ>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet<T: Real> {
    pub k: Multipliers<T>,
    pub jmax: usize,
    /// Least-squares residual of a numeric fit; zero for exact results.
    pub residual: f64,
    pub warning: Option<String>,
}

impl<T: Real> MultiplierSet<T> {
    pub fn mode(&self) -> MultiplierMode {
        match self.k {
            Multipliers::Numeric(_) => MultiplierMode::Numeric,
            Multipliers::Symbolic(_) => MultiplierMode::Symbolic,
        }
    }

    pub fn numeric(&self) -> Option<&[Complex<T>]> {
        match &self.k {
            Multipliers::Numeric(v) => Some(v),
            _ => None,
        }
    }

    pub fn ratios(&self) -> Option<&[RatFuncQ]> {
        match &self.k {
            Multipliers::Symbolic(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let k: Vec<Value> = match &self.k {
            Multipliers::Numeric(v) => v
                .iter()
                .map(|c| json!({"re": format!("{:.*}", digits, c.re), "im": format!("{:.*}", digits, c.im)}))
                .collect(),
            Multipliers::Symbolic(v) => v
                .iter()
                .map(|r| json!({"num_poly": SparsePolyJson::from(&r.num), "den_poly": SparsePolyJson::from(&r.den)}))
                .collect(),
        };
        let mode = match self.mode() {
            MultiplierMode::Numeric => "numeric",
            MultiplierMode::Symbolic => "symbolic",
        };
        let mut out = json!({"mode": mode, "jmax": self.jmax, "K": k, "residual": self.residual});
        if let Some(w) = &self.warning {
            out["warning"] = json!(w);
        }
        out
    }
}

/// Fits `d_n ≈ Σ_{j≤jmax} K_j q^{j(n+1)}` over `n ∈ n_range` by least squares.
/// `d[n]` must hold `d_n(q)` for every `n` in the range.
pub fn k_extract<T: Real>(
    d: &[Complex<T>],
    q: &Complex<T>,
    jmax: usize,
    n_range: RangeInclusive<usize>,
) -> Result<MultiplierSet<T>> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if hi >= d.len() {
        return domain(format!("d table has order {} but the fit needs n = {hi}", d.len().saturating_sub(1)));
    }
    if hi < lo + jmax {
        return domain("fit range is shorter than the number of unknowns");
    }
    let bits = q.re.bits();
    let mut rows = Vec::with_capacity(hi - lo + 1);
    let mut rhs = Vec::with_capacity(hi - lo + 1);
    for n in lo..=hi {
        let base = q.cpowi(n as i64 + 1);
        let mut row = Vec::with_capacity(jmax + 1);
        let mut p = Complex::<T>::one().with_bits(bits);
        for _ in 0..=jmax {
            row.push(p.clone());
            p = p * base.clone();
        }
        rows.push(row);
        rhs.push(d[n].clone());
    }
    let (k, res, cond) = lstsq(rows, rhs)?;
    let digits = bits as f64 * 0.30103;
    let warning = (cond < -(digits - 10.0)).then(|| {
        format!("fit is ill-conditioned (|R| ratio 1e{cond:.0}); lower jmax or widen n_range")
    });
    Ok(MultiplierSet { k: Multipliers::Numeric(k), jmax, residual: res.to_f64(), warning })
}

/// Exact Taylor coefficients of `K₀` through `q^nmax`: the coefficient of
/// `qⁿ` is the (stable) coefficient of `qⁿ` in `d_{n+1}`.
/// `d` may be truncated in degree as long as degree `nmax` is kept.
pub fn k0_series(d: &[LaurentPolyQ], nmax: usize) -> Result<LaurentPolyQ> {
    if d.len() < nmax + 2 {
        return domain(format!("k0_series needs d_0..d_{}", nmax + 1));
    }
    let coeffs = (0..=nmax).map(|n| d[n + 1].coeff(n as i64)).collect();
    Ok(LaurentPolyQ::from_coeffs(0, coeffs))
}

/// `1/(q;q)_∞²`.
pub fn k0_closed<T: Real>(q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    let p = qpoch_inf(&q.q, q, ctx)?;
    Ok((p.clone() * p).cinv())
}

fn lp(low: i64, c: &[i64]) -> LaurentPolyQ {
    LaurentPolyQ::from_i64s(low, c)
}

fn rat(num: LaurentPolyQ, den: LaurentPolyQ) -> RatFuncQ {
    RatFuncQ::new(num, den)
}

/// Printed leading terms of the bracket in `K₄/K₀ = -q^{-16}(…)`.
pub const K4_BRACKET_PRINTED: [i64; 9] = [4, 8, 20, 22, 5, -34, -71, -74, -51];

/// `K_j/K₀` in closed form for `1 ≤ j ≤ 4`. Only the first terms of `K₄`
/// are known in print, so `j = 4` comes from [`transseries_solve`].
pub fn k_closed_ratio(j: usize) -> Result<RatFuncQ> {
    let one_minus = LaurentPolyQ::one_minus_qn;
    let r = match j {
        0 => RatFuncQ::one(),
        1 => {
            // -q^{-1} (4(1-q) + 5q) / (1-q)
            rat(-lp(-1, &[4, 1]), one_minus(1))
        }
        2 => {
            let den = &one_minus(1) * &one_minus(2);
            let head = &lp(0, &[4, -1, -10]) * &den;
            let tail = lp(3, &[24, 10, -9]);
            rat(-(&head - &tail).shift(-4), den)
        }
        3 => {
            let den = &(&one_minus(1) * &one_minus(2)) * &one_minus(3);
            let head = &lp(0, &[4, 8, 2, -10, -23, -15, 6]) * &den;
            let tail = lp(7, &[52, 60, 38, -12, -20, 7]);
            rat(-(&head + &tail).shift(-9), den)
        }
        4 => {
            let set = transseries_solve(4)?;
            set.ratios().expect("symbolic")[4].clone()
        }
        _ => return domain("closed forms exist for j <= 4; use transseries_solve"),
    };
    Ok(r)
}

/// `K_j` at a numeric `q` from the closed forms.
pub fn k_closed<T: Real>(j: usize, q: &QBase<T>, ctx: &PrecisionContext) -> Result<Complex<T>> {
    let r = k_closed_ratio(j)?;
    Ok(k0_closed(q, ctx)? * r.eval(&q.q, ctx.bits()))
}

/// Power series of the bracket `B_j` in `K_j/K₀ = -q^{-j²} B_j`.
pub fn k_bracket_series(ratio: &RatFuncQ, j: usize, terms: usize) -> Vec<Integer> {
    let b = RatFuncQ::new(-ratio.num.shift((j * j) as i64), ratio.den.clone());
    let (low, s) = b.series(terms);
    let mut out = vec![Integer::new(); terms];
    for (k, c) in s.into_iter().enumerate() {
        let at = low + k as i64;
        if (0..terms as i64).contains(&at) {
            out[at as usize] = c;
        }
    }
    out
}

fn scaled(c: &[LaurentPolyQ], s: i64) -> Vec<LaurentPolyQ> {
    c.iter().enumerate().map(|(n, p)| p.shift(s * n as i64)).collect()
}

fn series_mul(a: &[LaurentPolyQ], b: &[LaurentPolyQ], order: usize) -> Vec<LaurentPolyQ> {
    (0..=order)
        .map(|m| {
            let mut acc = LaurentPolyQ::zero();
            for k in 0..=m {
                if k < a.len() && m - k < b.len() {
                    acc = &acc + &(&a[k] * &b[m - k]);
                }
            }
            acc
        })
        .collect()
}

/// Rows of the linear system for `K₀ … K_jmax`.
///
/// Writing the level-one correction as `v₁(z) = E_q(1/z) Σ_j a_j z^j` with
/// `a_j = q^{j(j+3)/2} K_j`, the kernel shifts `v₁(z/q) = z^{-1}E_q(1/z)Σ a_j q^{-j} z^j`
/// and `v₁(qz) = qz E_q(1/z) Σ a_j q^j z^j` turn the linearized equation into
/// `A(z)S(z/q) + zB(z)S(z) + qz²D(z)S(qz) = S(z)` with `A = v₀(qz)v₀(z)²`,
/// `B = 2v₀(qz)v₀(z)v₀(z/q)`, `D = v₀(z/q)v₀(z)²`. Row `m` (for `1 ≤ m ≤ jmax`)
/// is the coefficient of `z^m`, given as the multiplier of each `K_k`,
/// shifted to start at `q⁰`, stripped of integer content and signed so the
/// `K₀` entry has positive lowest coefficient.
///
/// `v0_order` is the number of formal-series coefficients of `v₀` used.
pub fn transseries_equations(jmax: usize, v0_order: usize) -> Result<Vec<Vec<LaurentPolyQ>>> {
    if jmax < 1 {
        return domain("transseries system needs jmax >= 1");
    }
    let c = qp1_c(v0_order.max(1)).polys();
    let v0 = &c;
    let v0_up = scaled(&c, 1);
    let v0_down = scaled(&c, -1);
    let v0sq = series_mul(v0, v0, jmax);
    let a = series_mul(&v0_up, &v0sq, jmax);
    let b: Vec<LaurentPolyQ> = series_mul(&series_mul(&v0_up, v0, jmax), &v0_down, jmax)
        .iter()
        .map(|p| p.scale(&Integer::from(2)))
        .collect();
    let d = series_mul(&v0_down, &v0sq, jmax);
    let at = |s: &[LaurentPolyQ], i: i64| -> LaurentPolyQ {
        if i < 0 || i as usize >= s.len() {
            LaurentPolyQ::zero()
        } else {
            s[i as usize].clone()
        }
    };
    let mut rows = Vec::with_capacity(jmax);
    for m in 1..=jmax as i64 {
        let mut row = Vec::with_capacity(m as usize + 1);
        for k in 0..=m {
            let mut e = at(&a, m - k).shift(-k);
            if k == m {
                e = &e - &LaurentPolyQ::one();
            }
            e = &e + &at(&b, m - 1 - k);
            e = &e + &at(&d, m - 2 - k).shift(k + 1);
            row.push(e.shift(k * (k + 3) / 2));
        }
        rows.push(normalize_row(row));
    }
    Ok(rows)
}

fn normalize_row(row: Vec<LaurentPolyQ>) -> Vec<LaurentPolyQ> {
    let low = row.iter().filter(|p| !p.is_zero()).map(|p| p.low_degree()).min().unwrap_or(0);
    let mut g = Integer::new();
    for p in &row {
        if !p.is_zero() {
            g = g.gcd(&p.content());
        }
    }
    let sign = if row[0].coeff(row[0].low_degree()) < 0 { -1 } else { 1 };
    let g = g * sign;
    row.into_iter()
        .map(|p| {
            if p.is_zero() {
                return p;
            }
            LaurentPolyQ::from_coeffs(
                p.low_degree() - low,
                (p.low_degree()..=p.degree()).map(|k| p.coeff(k).div_exact(&g)).collect(),
            )
        })
        .collect()
}

/// Solves the triangular system of [`transseries_equations`] for `K_j/K₀`.
pub fn transseries_solve(jmax: usize) -> Result<MultiplierSet<f64>> {
    transseries_solve_with(jmax, jmax + 2)
}

pub fn transseries_solve_with(jmax: usize, v0_order: usize) -> Result<MultiplierSet<f64>> {
    let rows = transseries_equations(jmax, v0_order)?;
    let mut r = vec![RatFuncQ::one()];
    for (m, row) in rows.iter().enumerate() {
        let m = m + 1;
        let mut acc = RatFuncQ::zero();
        for k in 0..m {
            acc = acc.add(&r[k].mul_poly(&row[k]));
        }
        r.push(acc.neg().div(&RatFuncQ::from_poly(row[m].clone())));
    }
    Ok(MultiplierSet { k: Multipliers::Symbolic(r), jmax, residual: 0.0, warning: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiReport {
    /// `n` values of the deviation tables.
    pub n: Vec<usize>,
    /// `f_n (q;q)_n² - 1`.
    pub f_dev: Vec<f64>,
    /// `c̃_n q^{n(n-1)/2} (q;q)_∞ - 1`.
    pub c_dev: Vec<f64>,
    /// Successive ratios of the deviations; both should approach `q`.
    pub f_ratios: Vec<f64>,
    pub c_ratios: Vec<f64>,
    /// `f₀ (q;q)₀² = 1` holds exactly.
    pub base_exact: bool,
}

/// Deviation ratios of the two Riccati-type coefficient families over `n_range`.
pub fn riccati_multiplier_check<T: Real>(
    q: &QBase<T>,
    n_range: RangeInclusive<usize>,
    ctx: &PrecisionContext,
) -> Result<RiccatiReport> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo < 1 || hi <= lo {
        return domain("riccati check needs 1 <= n_lo < n_hi");
    }
    let bits = ctx.bits();
    let f = riccati_f(hi);
    let c = simple_c(hi)?;
    let pinf = qpoch_inf(&q.q, q, ctx)?;
    let one = Complex::<T>::one().with_bits(bits);
    let f0 = f.entries[0].to_ratfunc();
    let base_exact = f0 == RatFuncQ::from_poly(qq_poch(0).pow(2)).div(&RatFuncQ::from_poly(qq_poch(0).pow(2)));
    let mut n_out = Vec::new();
    let mut f_dev_c = Vec::new();
    let mut c_dev_c = Vec::new();
    for n in lo..=hi {
        let pn = qpoch_n(&q.q, q, n);
        let fv = f.entries[n].eval(&q.q, bits) * pn.clone() * pn - one.clone();
        let cn = c.poly(n).shift((n * (n - 1) / 2) as i64).eval(&q.q, bits);
        let cv = cn * pinf.clone() - one.clone();
        n_out.push(n);
        f_dev_c.push(fv);
        c_dev_c.push(cv);
    }
    let ratios = |v: &[Complex<T>]| -> Vec<f64> {
        v.windows(2).map(|w| (w[1].clone() / w[0].clone()).re.to_f64()).collect()
    };
    Ok(RiccatiReport {
        n: n_out,
        f_ratios: ratios(&f_dev_c),
        c_ratios: ratios(&c_dev_c),
        f_dev: f_dev_c.iter().map(|x| x.re.to_f64()).collect(),
        c_dev: c_dev_c.iter().map(|x| x.re.to_f64()).collect(),
        base_exact,
    })
}
