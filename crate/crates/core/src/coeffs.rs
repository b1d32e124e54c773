//! Exact coefficient tables: the formal qP1 solution (`c_n`, `d_n`), its
//! Fox–Wright majorant, the regular solution `e_n`, the Riccati-type
//! coefficients `f_n`, the toy equation `w(z)w(z/q) = w(z) - z`, plus
//! numeric twins used where exact polynomials get too large.

use num_complex::Complex;
use num_traits::{One, Zero};
use rug::{Complete, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::poly::{q_binomials, qq_poch, LaurentPolyQ, RatFuncQ, SparsePolyJson};
use crate::precision::PrecisionContext;
use crate::qcore::{qpoch_n, QBase};
use crate::scalar::{ComplexExt, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Qp1C,
    Qp1D,
    RegularE,
    RiccatiF,
    Phi20,
    SimpleC,
    FwBound,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoeffEntry {
    Poly(LaurentPolyQ),
    Ratio(RatFuncQ),
    Exact(Rational),
}

impl CoeffEntry {
    pub fn as_poly(&self) -> Option<&LaurentPolyQ> {
        match self {
            CoeffEntry::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn to_ratfunc(&self) -> RatFuncQ {
        match self {
            CoeffEntry::Poly(p) => RatFuncQ::from_poly(p.clone()),
            CoeffEntry::Ratio(r) => r.clone(),
            CoeffEntry::Exact(r) => RatFuncQ::new(
                LaurentPolyQ::monomial(r.numer().clone(), 0),
                LaurentPolyQ::monomial(r.denom().clone(), 0),
            ),
        }
    }

    pub fn eval<T: Real>(&self, q: &Complex<T>, bits: u32) -> Complex<T> {
        match self {
            CoeffEntry::Poly(p) => p.eval(q, bits),
            CoeffEntry::Ratio(r) => r.eval(q, bits),
            CoeffEntry::Exact(r) => Complex::real(T::from_rational(r, bits)),
        }
    }
}

/// Exact coefficients `entries[0..=order]`.
///
/// `branch` is only meaningful for [`CoeffKind::RegularE`]: entries hold the
/// `e₀ = 1` solution and branch `b` multiplies `e_n` by `ω^{b(1-n)}`,
/// `ω = e^{2πi/3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub kind: CoeffKind,
    pub order: usize,
    pub branch: u8,
    pub entries: Vec<CoeffEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntryJson {
    degrees: Vec<i64>,
    coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    den_degrees: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    den_coeffs: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TableJson {
    kind: CoeffKind,
    order: usize,
    #[serde(default, skip_serializing_if = "is_zero_u8")]
    branch: u8,
    entries: Vec<EntryJson>,
}

fn is_zero_u8(b: &u8) -> bool {
    *b == 0
}

impl CoeffTable {
    fn new(kind: CoeffKind, entries: Vec<CoeffEntry>) -> Self {
        Self { kind, order: entries.len().saturating_sub(1), branch: 0, entries }
    }

    pub fn poly(&self, n: usize) -> &LaurentPolyQ {
        self.entries[n].as_poly().expect("table does not hold polynomials")
    }

    pub fn polys(&self) -> Vec<LaurentPolyQ> {
        self.entries.iter().map(|e| e.as_poly().expect("table does not hold polynomials").clone()).collect()
    }

    pub fn integer(&self, n: usize) -> Integer {
        match &self.entries[n] {
            CoeffEntry::Poly(p) => p.coeff(0),
            CoeffEntry::Exact(r) => r.numer().clone(),
            CoeffEntry::Ratio(_) => panic!("table does not hold integers"),
        }
    }

    /// Coefficients evaluated at `q` (branch phase included).
    pub fn eval<T: Real>(&self, q: &Complex<T>, bits: u32) -> Vec<Complex<T>> {
        let phase = |n: usize| -> Complex<T> {
            if self.kind != CoeffKind::RegularE || self.branch == 0 {
                return Complex::one();
            }
            let k = (self.branch as i64 * (1 - n as i64)).rem_euclid(3);
            let ang = T::pi_p(bits) * T::ratio(2 * k, 3, bits);
            Complex::from_polar_t(&T::one(), &ang)
        };
        self.entries.iter().enumerate().map(|(n, e)| e.eval(q, bits) * phase(n)).collect()
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|e| match e {
                CoeffEntry::Poly(p) => {
                    let s = SparsePolyJson::from(p);
                    EntryJson { degrees: s.degrees, coeffs: s.coeffs, den_degrees: None, den_coeffs: None }
                }
                CoeffEntry::Ratio(r) => {
                    let n = SparsePolyJson::from(&r.num);
                    let d = SparsePolyJson::from(&r.den);
                    EntryJson { degrees: n.degrees, coeffs: n.coeffs, den_degrees: Some(d.degrees), den_coeffs: Some(d.coeffs) }
                }
                CoeffEntry::Exact(r) => {
                    EntryJson { degrees: vec![0], coeffs: vec![r.to_string()], den_degrees: None, den_coeffs: None }
                }
            })
            .collect();
        let j = TableJson { kind: self.kind, order: self.order, branch: self.branch, entries };
        serde_json::to_string(&j).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: TableJson = serde_json::from_str(s).map_err(|e| crate::Error::Domain(e.to_string()))?;
        let mut entries = Vec::with_capacity(j.entries.len());
        for e in j.entries {
            let bad = || crate::Error::Domain("malformed table entry".into());
            let entry = match (&e.den_degrees, &e.den_coeffs) {
                (Some(dd), Some(dc)) => {
                    let num = LaurentPolyQ::from_sparse_strings(&e.degrees, &e.coeffs).ok_or_else(bad)?;
                    let den = LaurentPolyQ::from_sparse_strings(dd, dc).ok_or_else(bad)?;
                    if den.is_zero() {
                        return Err(bad());
                    }
                    CoeffEntry::Ratio(RatFuncQ { num, den })
                }
                _ if e.coeffs.iter().any(|c| c.contains('/')) => {
                    let r: Rational = e.coeffs.first().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                    CoeffEntry::Exact(r)
                }
                _ => CoeffEntry::Poly(LaurentPolyQ::from_sparse_strings(&e.degrees, &e.coeffs).ok_or_else(bad)?),
            };
            entries.push(entry);
        }
        if entries.len() != j.order + 1 {
            return domain("entry count does not match order");
        }
        Ok(Self { kind: j.kind, order: j.order, branch: j.branch, entries })
    }
}

fn q_pow(k: i64) -> LaurentPolyQ {
    LaurentPolyQ::monomial(1, k)
}

/// `c_n` via the triple sum, grouped as `c_{n+1} = Σ_m S_m T_{n-m}` with
/// `S_m = Σ_k c_k c_{m-k} q^k`, `T_j = Σ_l c_l c_{j-l} q^{-l}`.
pub fn qp1_c(nmax: usize) -> CoeffTable {
    let mut c = vec![LaurentPolyQ::one()];
    let mut s: Vec<LaurentPolyQ> = Vec::new();
    let mut t: Vec<LaurentPolyQ> = Vec::new();
    for n in 0..nmax {
        let mut sm = LaurentPolyQ::zero();
        let mut tm = LaurentPolyQ::zero();
        for k in 0..=n {
            let prod = &c[k] * &c[n - k];
            sm = &sm + &prod.shift(k as i64);
            tm = &tm + &prod.shift(-(k as i64));
        }
        s.push(sm);
        t.push(tm);
        let mut next = LaurentPolyQ::zero();
        for m in 0..=n {
            next = &next + &(&s[m] * &t[n - m]);
        }
        c.push(next);
    }
    CoeffTable::new(CoeffKind::Qp1C, c.into_iter().map(CoeffEntry::Poly).collect())
}

/// `d_n` via the all-positive recurrence, optionally keeping only degrees ≤ `max_deg`.
pub fn qp1_d_truncated(nmax: usize, max_deg: Option<i64>) -> Vec<LaurentPolyQ> {
    let mut d = vec![LaurentPolyQ::one()];
    let mut p: Vec<LaurentPolyQ> = Vec::new();
    for n in 0..nmax {
        let mut pm = LaurentPolyQ::zero();
        for k in 0..=n {
            let e = (k * (n - k + 1)) as i64;
            if max_deg.is_some_and(|m| e > m) {
                continue;
            }
            pm = &pm + &d[k].mul_trunc(&d[n - k], max_deg.map(|m| m - e)).shift(e);
        }
        p.push(pm);
        let mut next = LaurentPolyQ::zero();
        for m in 0..=n {
            let e = (m * (n - m + 1)) as i64;
            if max_deg.is_some_and(|md| e > md) {
                continue;
            }
            next = &next + &p[m].mul_trunc(&p[n - m], max_deg.map(|md| md - e)).shift(e);
        }
        d.push(next);
    }
    d
}

pub fn qp1_d(nmax: usize) -> CoeffTable {
    CoeffTable::new(CoeffKind::Qp1D, qp1_d_truncated(nmax, None).into_iter().map(CoeffEntry::Poly).collect())
}

/// Checks `q^{n(n-1)/2} c_n = d_n` for every shared index.
pub fn check_c_vs_d(c: &CoeffTable, d: &CoeffTable) -> bool {
    let n = c.order.min(d.order);
    (0..=n).all(|k| c.poly(k).shift((k * k.saturating_sub(1) / 2) as i64) == *d.poly(k))
}

/// `d̃_n = d_n(1)` via the `q = 1` recurrence.
pub fn fw_bound(nmax: usize) -> CoeffTable {
    let mut d = vec![Integer::from(1)];
    let mut p: Vec<Integer> = Vec::new();
    for n in 0..nmax {
        let pm: Integer = (0..=n).map(|k| Integer::from(&d[k] * &d[n - k])).sum();
        p.push(pm);
        let next: Integer = (0..=n).map(|m| Integer::from(&p[m] * &p[n - m])).sum();
        d.push(next);
    }
    CoeffTable::new(CoeffKind::FwBound, d.into_iter().map(|x| CoeffEntry::Poly(LaurentPolyQ::monomial(x, 0))).collect())
}

/// `Γ(4n+1) / (Γ(3n+2) n!) = (4n)! / ((3n+1)! n!)`.
pub fn fw_closed(n: usize) -> Integer {
    let num = Integer::factorial(4 * n as u32).complete();
    let den = Integer::factorial(3 * n as u32 + 1).complete() * Integer::factorial(n as u32).complete();
    num.div_exact(&den)
}

/// `d_n(q)` numerically, for any complex `q`.
pub fn qp1_d_numeric<T: Real>(nmax: usize, q: &Complex<T>) -> Vec<Complex<T>> {
    let maxe = (nmax * nmax) / 4 + nmax + 2;
    let mut qp = Vec::with_capacity(maxe + 1);
    let mut acc = Complex::<T>::one().with_bits(q.re.bits());
    for _ in 0..=maxe {
        qp.push(acc.clone());
        acc = acc * q.clone();
    }
    let mut d = vec![Complex::<T>::one()];
    let mut p: Vec<Complex<T>> = Vec::new();
    for n in 0..nmax {
        let mut pm = Complex::<T>::zero();
        for k in 0..=n {
            pm = pm + d[k].clone() * d[n - k].clone() * qp[k * (n - k + 1)].clone();
        }
        p.push(pm);
        let mut next = Complex::<T>::zero();
        for m in 0..=n {
            next = next + p[m].clone() * p[n - m].clone() * qp[m * (n - m + 1)].clone();
        }
        d.push(next);
    }
    d
}

/// `c_n(q) = q^{-n(n-1)/2} d_n(q)` numerically.
pub fn qp1_c_numeric<T: Real>(nmax: usize, q: &Complex<T>) -> Vec<Complex<T>> {
    qp1_d_numeric(nmax, q)
        .into_iter()
        .enumerate()
        .map(|(n, d)| d * q.cpowi(-((n * n.saturating_sub(1) / 2) as i64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub holds: bool,
    /// Smallest of `log10(d̃_n/|d_n(q)|)` and `log10((256/27)^n/d̃_n)` over `1 ≤ n ≤ nmax`.
    pub tightest_log10_margin: f64,
    pub worst_n: usize,
    pub nmax: usize,
}

/// Checks `|d_n(q)| ≤ d̃_n ≤ (256/27)^n` for `n ≤ nmax`.
pub fn growth_check<T: Real>(nmax: usize, q: &Complex<T>) -> Result<GrowthReport> {
    if q.cabs().to_f64() > 1.0 + 1e-15 {
        return domain("growth_check needs |q| <= 1");
    }
    let bits = q.re.bits();
    let dn = qp1_d_numeric(nmax, q);
    let dt = fw_bound(nmax);
    let slack = 10f64.powf(-(bits as f64) * 0.30103 + 3.0);
    let mut holds = true;
    let mut tight = f64::INFINITY;
    let mut worst = 0;
    let ln256_27 = (256f64 / 27.0).log10();
    for n in 0..=nmax {
        let bound = T::from_integer(&dt.integer(n), bits);
        let a = dn[n].cabs();
        let lb = bound.log10_abs();
        let m1 = lb - a.log10_abs();
        let m2 = n as f64 * ln256_27 - lb;
        if m1 < -slack || m2 < -slack {
            holds = false;
        }
        if n >= 1 && m1.min(m2) < tight {
            tight = m1.min(m2);
            worst = n;
        }
    }
    if nmax == 0 {
        tight = 0.0;
    }
    Ok(GrowthReport { holds, tightest_log10_margin: tight, worst_n: worst, nmax })
}

/// Rational function `num / ∏_m Φ_m^{exps[m]}`, `Φ_m = 1 + q^m + q^{2m}`.
#[derive(Clone, Debug)]
struct PhiFrac {
    num: LaurentPolyQ,
    exps: Vec<u32>,
}

fn phi_m(m: usize) -> LaurentPolyQ {
    LaurentPolyQ::from_coeffs(0, {
        let mut v = vec![Integer::new(); 2 * m + 1];
        v[0] = Integer::from(1);
        v[m] = Integer::from(1);
        v[2 * m] = Integer::from(1);
        v
    })
}

impl PhiFrac {
    fn from_poly(p: LaurentPolyQ) -> Self {
        Self { num: p, exps: Vec::new() }
    }

    fn zero() -> Self {
        Self::from_poly(LaurentPolyQ::zero())
    }

    fn raise(&self, target: &[u32], phis: &[LaurentPolyQ]) -> LaurentPolyQ {
        let mut n = self.num.clone();
        for (m, &t) in target.iter().enumerate() {
            let have = self.exps.get(m).copied().unwrap_or(0);
            for _ in have..t {
                n = &n * &phis[m];
            }
        }
        n
    }

    fn add(&self, o: &Self, phis: &[LaurentPolyQ]) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        let len = self.exps.len().max(o.exps.len());
        let target: Vec<u32> = (0..len)
            .map(|m| self.exps.get(m).copied().unwrap_or(0).max(o.exps.get(m).copied().unwrap_or(0)))
            .collect();
        Self { num: &self.raise(&target, phis) + &o.raise(&target, phis), exps: target }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return Self::zero();
        }
        let len = self.exps.len().max(o.exps.len());
        let exps = (0..len)
            .map(|m| self.exps.get(m).copied().unwrap_or(0) + o.exps.get(m).copied().unwrap_or(0))
            .collect();
        Self { num: &self.num * &o.num, exps }
    }

    fn shift(&self, k: i64) -> Self {
        Self { num: self.num.shift(k), exps: self.exps.clone() }
    }

    fn to_ratfunc(&self, phis: &[LaurentPolyQ]) -> RatFuncQ {
        let mut den = LaurentPolyQ::one();
        for (m, &e) in self.exps.iter().enumerate() {
            for _ in 0..e {
                den = &den * &phis[m];
            }
        }
        RatFuncQ { num: self.num.clone(), den }
    }
}

/// Regular solution `w(z) = Σ e_n z^n` of `w(qz) w(z)² w(z/q) = w(z) - z`,
/// as exact rational functions of `q` (`e₀ = 1` stored; see [`CoeffTable`]).
pub fn regular_e(nmax: usize, branch: u8) -> Result<CoeffTable> {
    if branch > 2 {
        return domain("cube-root branch must be 0, 1 or 2");
    }
    let phis: Vec<LaurentPolyQ> = (0..=nmax).map(phi_m).collect();
    let mut e: Vec<PhiFrac> = vec![PhiFrac::from_poly(LaurentPolyQ::one())];
    // Running coefficient arrays of B², A·B², A·B²·C with A_k = q^k e_k, C_k = q^{-k} e_k.
    let mut bb: Vec<PhiFrac> = vec![PhiFrac::from_poly(LaurentPolyQ::one())];
    let mut abb: Vec<PhiFrac> = bb.clone();
    let refresh = |e: &[PhiFrac], bb: &mut Vec<PhiFrac>, abb: &mut Vec<PhiFrac>, n: usize| {
        let mut acc = PhiFrac::zero();
        for k in 0..=n {
            acc = acc.add(&e[k].mul(&e[n - k]), &phis);
        }
        bb[n] = acc;
        let mut acc = PhiFrac::zero();
        for k in 0..=n {
            acc = acc.add(&e[k].shift(k as i64).mul(&bb[n - k]), &phis);
        }
        abb[n] = acc;
    };
    for n in 1..=nmax {
        e.push(PhiFrac::zero());
        bb.push(PhiFrac::zero());
        abb.push(PhiFrac::zero());
        refresh(&e, &mut bb, &mut abb, n);
        let mut s = PhiFrac::zero();
        for k in 0..=n {
            s = s.add(&abb[n - k].mul(&e[k].shift(-(k as i64))), &phis);
        }
        if n == 1 {
            s = s.add(&PhiFrac::from_poly(LaurentPolyQ::one()), &phis);
        }
        // (q^n + 1 + q^{-n}) e_n = -(δ_{n1} + S_n)
        let mut en = PhiFrac { num: -s.num.shift(n as i64), exps: s.exps.clone() };
        if en.exps.len() <= n {
            en.exps.resize(n + 1, 0);
        }
        en.exps[n] += 1;
        e[n] = en;
        refresh(&e, &mut bb, &mut abb, n);
    }
    let entries = e
        .iter()
        .map(|x| {
            let mut r = x.to_ratfunc(&phis);
            r.tidy();
            CoeffEntry::Ratio(r)
        })
        .collect();
    let mut t = CoeffTable::new(CoeffKind::RegularE, entries);
    t.branch = branch;
    Ok(t)
}

/// Numeric twin of [`regular_e`] (any precision, any complex `q`).
pub fn regular_e_numeric<T: Real>(nmax: usize, branch: u8, q: &Complex<T>) -> Result<Vec<Complex<T>>> {
    if branch > 2 {
        return domain("cube-root branch must be 0, 1 or 2");
    }
    let bits = q.re.bits();
    let qi = q.cinv();
    let one = Complex::<T>::one().with_bits(bits);
    let mut e = vec![one.clone()];
    let mut qn = vec![one.clone()];
    let mut qmn = vec![one.clone()];
    let mut bb = vec![one.clone()];
    let mut abb = vec![one.clone()];
    for n in 1..=nmax {
        qn.push(qn[n - 1].clone() * q.clone());
        qmn.push(qmn[n - 1].clone() * qi.clone());
        e.push(Complex::zero());
        let fill = |e: &[Complex<T>], bb: &mut Vec<Complex<T>>, abb: &mut Vec<Complex<T>>| {
            let mut s = Complex::<T>::zero();
            for k in 0..=n {
                s = s + e[k].clone() * e[n - k].clone();
            }
            bb[n] = s;
            let mut s = Complex::<T>::zero();
            for k in 0..=n {
                s = s + e[k].clone() * qn[k].clone() * bb[n - k].clone();
            }
            abb[n] = s;
        };
        bb.push(Complex::zero());
        abb.push(Complex::zero());
        fill(&e, &mut bb, &mut abb);
        let mut s = Complex::<T>::zero();
        for k in 0..=n {
            s = s + abb[n - k].clone() * e[k].clone() * qmn[k].clone();
        }
        if n == 1 {
            s = s + one.clone();
        }
        e[n] = -s / (qn[n].clone() + one.clone() + qmn[n].clone());
        fill(&e, &mut bb, &mut abb);
    }
    if branch > 0 {
        let pi = T::pi_p(bits);
        for (n, x) in e.iter_mut().enumerate() {
            let k = (branch as i64 * (1 - n as i64)).rem_euclid(3);
            let ph = Complex::from_polar_t(&T::one(), &(pi.clone() * T::ratio(2 * k, 3, bits)));
            *x = x.clone() * ph;
        }
    }
    Ok(e)
}

/// Riccati-type coefficients `f_n`, stored as `F_n / (q;q)_n²` with `F_n` an
/// integer polynomial.
pub fn riccati_f(nmax: usize) -> CoeffTable {
    let bin = q_binomials(nmax);
    // E_n = e_n (q;q)_n² (Laurent polynomial).
    let mut big_e: Vec<LaurentPolyQ> = vec![LaurentPolyQ::one()];
    for n in 1..=nmax {
        let mut s1 = LaurentPolyQ::zero();
        for m in 0..n {
            let b = &bin[n - 1][m];
            s1 = &s1 + &(&(&big_e[m] * &big_e[n - 1 - m]) * &(b * b)).shift(-(m as i64));
        }
        let mut s2 = LaurentPolyQ::zero();
        for m in 1..n {
            s2 = &s2 + &(&(&big_e[m] * &big_e[n - m]) * &(&bin[n][m] * &bin[n - 1][m])).shift(2 * m as i64);
        }
        big_e.push(&(&s1 * &LaurentPolyQ::one_minus_qn(n as i64)) - &s2);
    }
    let entries = big_e
        .into_iter()
        .enumerate()
        .map(|(n, en)| CoeffEntry::Ratio(RatFuncQ { num: en.shift((n * n.saturating_sub(1) / 2) as i64), den: qq_poch(n).pow(2) }))
        .collect();
    CoeffTable::new(CoeffKind::RiccatiF, entries)
}

/// Riccati `e_n = q^{-n(n-1)/2} f_n` straight from the defining recurrence,
/// with rational-function arithmetic.
pub fn riccati_e_direct(nmax: usize) -> Vec<RatFuncQ> {
    let mut e = vec![RatFuncQ::one()];
    for n in 1..=nmax {
        let mut rhs = RatFuncQ::zero();
        for m in 0..n {
            rhs = rhs.add(&e[m].mul(&e[n - m - 1]).mul_poly(&q_pow(-(m as i64))));
        }
        for m in 1..n {
            let w = &q_pow(2 * m as i64) - &q_pow((n + m) as i64);
            rhs = rhs.sub(&e[m].mul(&e[n - m]).mul_poly(&w));
        }
        e.push(rhs.div(&RatFuncQ::from_poly(LaurentPolyQ::one_minus_qn(n as i64))));
    }
    e
}

/// Coefficients of the formal solution `Σ_{n≥1} c̃_n z^n` of `w(z)w(z/q) = w(z) - z`.
pub fn simple_c(nmax: usize) -> Result<CoeffTable> {
    if nmax < 1 {
        return domain("simple_c needs nmax >= 1");
    }
    let mut c = vec![LaurentPolyQ::zero(), LaurentPolyQ::one()];
    for n in 2..=nmax {
        let mut acc = LaurentPolyQ::zero();
        for k in 1..n {
            acc = &acc + &(&c[k] * &c[n - k]).shift(k as i64 - n as i64);
        }
        c.push(acc);
    }
    Ok(CoeffTable::new(CoeffKind::SimpleC, c.into_iter().map(CoeffEntry::Poly).collect()))
}

/// `z · ₂φ₀(0,0;−;q;−z/q) / ₂φ₀(0,0;−;q;−z)` expanded to `z^{nmax}`.
pub fn simple_c_quotient(nmax: usize) -> Vec<RatFuncQ> {
    let term = |n: usize, extra: i64| -> RatFuncQ {
        let e = -((n * n.saturating_sub(1) / 2) as i64) + extra * n as i64;
        RatFuncQ::new(q_pow(e), qq_poch(n))
    };
    let a: Vec<RatFuncQ> = (0..nmax).map(|n| term(n, -1)).collect();
    let b: Vec<RatFuncQ> = (0..nmax).map(|n| term(n, 0)).collect();
    let mut u: Vec<RatFuncQ> = Vec::with_capacity(nmax);
    for n in 0..nmax {
        let mut acc = a[n].clone();
        for k in 0..n {
            acc = acc.sub(&u[k].mul(&b[n - k]));
        }
        u.push(acc);
    }
    let mut out = vec![RatFuncQ::zero()];
    out.extend(u);
    out
}

/// `(a;q)_n (b;q)_n / (q;q)_n · q^{-n(n-1)/2} (-1)^n` for `n ≤ nmax`.
pub fn phi20_coeffs<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    nmax: usize,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> Vec<Complex<T>> {
    let bits = ctx.bits();
    let one = Complex::<T>::one().with_bits(bits);
    let mut out = vec![one.clone()];
    let mut cur = one.clone();
    let qi = q.q.cinv();
    let mut qk = one.clone();
    let mut qmk = one.clone();
    for _ in 0..nmax {
        // ratio t_{k+1}/t_k = -(1 - a q^k)(1 - b q^k) / (1 - q^{k+1}) · q^{-k}
        let num = (one.clone() - a.clone() * qk.clone()) * (one.clone() - b.clone() * qk.clone());
        let den = one.clone() - qk.clone() * q.q.clone();
        cur = -(cur * num / den) * qmk.clone();
        out.push(cur.clone());
        qk = qk * q.q.clone();
        qmk = qmk * qi.clone();
    }
    out
}

/// Largest relative residual, over `1 ≤ n ≤ nmax`, of the coefficient form of
/// `(1 - abqz)w(zq²) - (1 - (a+b)qz)w(zq) - qz w(z) = 0`:
/// `a_n(q^{2n} - q^n) + a_{n-1}(-ab q^{2n-1} + (a+b)q^n - q) = 0`.
pub fn phi20_recurrence_residual<T: Real>(
    a: &Complex<T>,
    b: &Complex<T>,
    nmax: usize,
    q: &QBase<T>,
    ctx: &PrecisionContext,
) -> f64 {
    let c = phi20_coeffs(a, b, nmax, q, ctx);
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=nmax {
        let qn = q.powi(n as i64);
        let q2n = qn.clone() * qn.clone();
        let t1 = c[n].clone() * (q2n.clone() - qn.clone());
        let t2 = c[n - 1].clone()
            * ((a.clone() + b.clone()) * qn.clone() - a.clone() * b.clone() * q2n * q.q.cinv() - q.q.clone());
        let scale = t1.log10_abs().max(t2.log10_abs());
        worst = worst.max((t1 + t2).log10_abs() - scale);
    }
    10f64.powf(worst)
}

/// `(q;q)_n` evaluated numerically (exposed for the asymptotic checks).
pub fn qq_n<T: Real>(q: &QBase<T>, n: usize) -> Complex<T> {
    qpoch_n(&q.q, q, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn d_tables_small() {
        let d = qp1_d(5);
        assert_eq!(d.poly(4).dense_from_zero(), ints(&[1, 2, 5, 10, 16, 23, 26, 23, 16, 10, 5, 2, 1]));
        let d5 = d.poly(5);
        assert_eq!(d5.degree(), 20);
        for (k, v) in [(0, 1), (1, 2), (2, 5), (3, 10), (4, 20), (5, 32), (19, 2), (20, 1)] {
            assert_eq!(d5.coeff(k), v, "coefficient {k}");
        }
        let c = qp1_c(5);
        assert_eq!(*c.poly(2), LaurentPolyQ::from_i64s(-1, &[1, 2, 1]));
        assert!(check_c_vs_d(&c, &d));
    }

    #[test]
    fn fw_values() {
        let t = fw_bound(20);
        assert_eq!(t.integer(2), 4);
        assert_eq!(t.integer(3), 22);
        for n in 0..=20 {
            assert_eq!(t.integer(n), fw_closed(n));
        }
    }

    #[test]
    fn numeric_d_matches_exact() {
        let d = qp1_d(8);
        let q = Complex::new(0.3f64, 0.4);
        let num = qp1_d_numeric(8, &q);
        for n in 0..=8 {
            let ex = d.poly(n).eval(&q, 53);
            assert!((ex - num[n]).norm() < 1e-12 * ex.norm().max(1.0));
        }
    }

    #[test]
    fn regular_e_first_terms() {
        let t = regular_e(4, 0).unwrap();
        let e1 = t.entries[1].to_ratfunc();
        assert_eq!(e1, RatFuncQ::new(-q_pow(1), LaurentPolyQ::from_i64s(0, &[1, 1, 1])));
        let q = Complex::new(Mp::new(200, 0.7), Mp::new(200, 0.0));
        let ex = t.eval(&q, 200);
        let nu = regular_e_numeric(4, 0, &q).unwrap();
        for n in 0..=4 {
            assert!((ex[n].clone() - nu[n].clone()).log10_abs() < -50.0);
        }
    }

    #[test]
    fn regular_e_branches_share_moduli() {
        let q = Complex::new(0.6f64, 0.0);
        let b0 = regular_e_numeric(6, 0, &q).unwrap();
        let b2 = regular_e_numeric(6, 2, &q).unwrap();
        let w = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((b2[0] - w * w).norm() < 1e-14);
        for n in 0..=6 {
            assert!((b0[n].norm() - b2[n].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn riccati_matches_direct_recurrence() {
        let f = riccati_f(7);
        let e = riccati_e_direct(7);
        for n in 0..=7 {
            let fe = e[n].mul_poly(&q_pow((n * n.saturating_sub(1) / 2) as i64));
            assert_eq!(f.entries[n].to_ratfunc(), fe, "n = {n}");
        }
        let (low, s) = f.entries[5].to_ratfunc().series(6);
        assert_eq!(low, 0);
        assert_eq!(s, ints(&[1, 2, 5, 10, 20, 34]));
    }

    #[test]
    fn simple_c_against_quotient() {
        let c = simple_c(10).unwrap();
        let quo = simple_c_quotient(10);
        for n in 1..=10 {
            assert_eq!(RatFuncQ::from_poly(c.poly(n).clone()), quo[n], "n = {n}");
        }
    }

    #[test]
    fn json_round_trip() {
        for t in [qp1_d(4), regular_e(3, 1).unwrap(), fw_bound(5), riccati_f(3)] {
            let s = t.to_json();
            assert_eq!(CoeffTable::from_json(&s).unwrap(), t);
        }
    }

    #[test]
    fn growth_small() {
        let r = growth_check(0, &Complex::new(0.7f64, 0.0)).unwrap();
        assert!(r.holds);
        assert_eq!(r.tightest_log10_margin, 0.0);
        let r = growth_check(30, &Complex::new(0.0f64, 0.95)).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn phi20_coefficients_satisfy_recurrence() {
        let ctx = PrecisionContext::with_digits(40).unwrap();
        let b = ctx.bits();
        let q = QBase::real(Mp::new(b, 0.5)).unwrap();
        let a = Complex::new(Mp::new(b, 0.2), Mp::new(b, 0.0));
        let bb = Complex::new(Mp::new(b, 0.3), Mp::new(b, 0.1));
        assert!(phi20_recurrence_residual(&a, &bb, 30, &q, &ctx) < 1e-35);
    }
}
