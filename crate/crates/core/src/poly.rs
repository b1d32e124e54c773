//! Exact (Laurent) polynomials in `q` with big-integer coefficients, and
//! quotients of them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::scalar::{ComplexExt, Real};

/// Laurent polynomial `Σ c_k q^k`, stored densely from degree `low`.
///
/// Zero coefficients are never stored at either end; the zero polynomial
/// has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPolyQ {
    low: i64,
    coeffs: Vec<Integer>,
}

/// Polynomial in `q` (a [`LaurentPolyQ`] with no negative powers).
pub type IntPolyQ = LaurentPolyQ;

impl LaurentPolyQ {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Integer::from(1), 0)
    }

    pub fn monomial(c: impl Into<Integer>, deg: i64) -> Self {
        Self::from_coeffs(deg, vec![c.into()])
    }

    /// `c_0 q^low + c_1 q^{low+1} + …`.
    pub fn from_coeffs(low: i64, coeffs: Vec<Integer>) -> Self {
        let mut p = Self { low, coeffs };
        p.normalize();
        p
    }

    pub fn from_i64s(low: i64, coeffs: &[i64]) -> Self {
        Self::from_coeffs(low, coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    /// `1 - q^n`.
    pub fn one_minus_qn(n: i64) -> Self {
        Self::one() - Self::monomial(1, n)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| **c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest degree with a nonzero coefficient (0 for the zero polynomial).
    pub fn low_degree(&self) -> i64 {
        self.low
    }

    /// Highest degree with a nonzero coefficient (`low - 1` when zero).
    pub fn degree(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || self.low >= 0
    }

    pub fn coeff(&self, k: i64) -> Integer {
        if k < self.low || k > self.degree() {
            Integer::new()
        } else {
            self.coeffs[(k - self.low) as usize].clone()
        }
    }

    /// Nonzero terms as `(degree, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Integer)> {
        let low = self.low;
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0).map(move |(i, c)| (low + i as i64, c))
    }

    /// Coefficients from degree 0 up to `degree()` (polynomials only).
    pub fn dense_from_zero(&self) -> Vec<Integer> {
        (0..=self.degree().max(-1)).map(|k| self.coeff(k)).collect()
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &Integer) -> Self {
        Self::from_coeffs(self.low, self.coeffs.iter().map(|x| Integer::from(x * c)).collect())
    }

    /// Keep only the terms of degree ≤ `max_deg`.
    pub fn truncate(&self, max_deg: i64) -> Self {
        if self.is_zero() || max_deg < self.low {
            return Self::zero();
        }
        let keep = ((max_deg - self.low + 1) as usize).min(self.coeffs.len());
        Self::from_coeffs(self.low, self.coeffs[..keep].to_vec())
    }

    /// Product keeping only degrees ≤ `max_deg`.
    pub fn mul_trunc(&self, other: &Self, max_deg: Option<i64>) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let low = self.low + other.low;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(m) = max_deg {
            if m < low {
                return Self::zero();
            }
            len = len.min((m - low + 1) as usize);
        }
        let mut out = vec![Integer::new(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 || i >= len {
                continue;
            }
            let top = other.coeffs.len().min(len - i);
            for (j, b) in other.coeffs[..top].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(low, out)
    }

    /// `p(1/q)`.
    pub fn reflect(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::from_coeffs(-self.degree(), c)
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let lead = other.coeffs.last().unwrap();
        let mut rem: Vec<Integer> = self.coeffs.clone();
        let dl = other.coeffs.len();
        if rem.len() < dl {
            return None;
        }
        let qlen = rem.len() - dl + 1;
        let mut quo = vec![Integer::new(); qlen];
        for k in (0..qlen).rev() {
            let top = &rem[k + dl - 1];
            if *top == 0 {
                continue;
            }
            if !top.is_divisible(lead) {
                return None;
            }
            let t = Integer::from(top / lead);
            for (j, b) in other.coeffs.iter().enumerate() {
                rem[k + j] -= Integer::from(&t * b);
            }
            quo[k] = t;
        }
        if rem.iter().any(|c| *c != 0) {
            return None;
        }
        Some(Self::from_coeffs(self.low - other.low, quo))
    }

    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
        }
        g
    }

    /// Evaluate at a complex point (Horner on the dense coefficients).
    pub fn eval<T: Real>(&self, q: &Complex<T>, bits: u32) -> Complex<T> {
        if self.is_zero() {
            return Complex::zero();
        }
        let mut acc = Complex::<T>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q.clone() + Complex::real(T::from_integer(c, bits));
        }
        acc * q.cpowi(self.low)
    }

    pub fn eval_real<T: Real>(&self, q: &T, bits: u32) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q.clone() + T::from_integer(c, bits);
        }
        acc * q.powi(self.low)
    }

    pub fn eval_rational(&self, q: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        let mut p = Rational::from(1);
        let base = if self.low < 0 { Rational::from(q.recip_ref()) } else { q.clone() };
        for _ in 0..self.low.unsigned_abs() {
            p *= &base;
        }
        acc * p
    }

    /// Substitute `q → q^k` (k ≥ 1).
    pub fn compose_power(&self, k: i64) -> Self {
        assert!(k >= 1);
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Integer::new(); (self.coeffs.len() - 1) * k as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k as usize] = c.clone();
        }
        Self::from_coeffs(self.low * k, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Lists `(degrees, coefficients-as-strings)` of the nonzero terms.
    pub fn to_sparse_strings(&self) -> (Vec<i64>, Vec<String>) {
        self.terms().map(|(d, c)| (d, c.to_string())).unzip()
    }

    pub fn from_sparse_strings(degrees: &[i64], coeffs: &[String]) -> Option<Self> {
        if degrees.len() != coeffs.len() {
            return None;
        }
        let mut p = Self::zero();
        for (d, c) in degrees.iter().zip(coeffs) {
            p = p + Self::monomial(c.parse::<Integer>().ok()?, *d);
        }
        Some(p)
    }
}

impl fmt::Debug for LaurentPolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms() {
            let neg = *c < 0;
            let a = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_c = a != 1 || d == 0;
            if show_c {
                write!(f, "{a}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "{}q", if show_c { "*" } else { "" })?,
                _ => write!(f, "{}q^{}", if show_c { "*" } else { "" }, d)?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPolyQ> for &'a LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn add(self, o: &LaurentPolyQ) -> LaurentPolyQ {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.degree().max(o.degree());
        let mut out = vec![Integer::new(); (high - low + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[(self.low - low) as usize + i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            out[(o.low - low) as usize + i] += c;
        }
        LaurentPolyQ::from_coeffs(low, out)
    }
}

impl Add for LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn add(self, o: LaurentPolyQ) -> LaurentPolyQ {
        &self + &o
    }
}

impl Neg for LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn neg(self) -> LaurentPolyQ {
        LaurentPolyQ { low: self.low, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<'a> Sub<&'a LaurentPolyQ> for &'a LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn sub(self, o: &LaurentPolyQ) -> LaurentPolyQ {
        self + &(-o.clone())
    }
}

impl Sub for LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn sub(self, o: LaurentPolyQ) -> LaurentPolyQ {
        &self - &o
    }
}

impl<'a> Mul<&'a LaurentPolyQ> for &'a LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn mul(self, o: &LaurentPolyQ) -> LaurentPolyQ {
        self.mul_trunc(o, None)
    }
}

impl Mul for LaurentPolyQ {
    type Output = LaurentPolyQ;
    fn mul(self, o: LaurentPolyQ) -> LaurentPolyQ {
        &self * &o
    }
}

/// `(q;q)_n` as an exact polynomial.
pub fn qq_poch(n: usize) -> LaurentPolyQ {
    let mut p = LaurentPolyQ::one();
    for k in 1..=n as i64 {
        p = &p * &LaurentPolyQ::one_minus_qn(k);
    }
    p
}

/// Gaussian binomials `[n choose m]_q` for all `m ≤ n ≤ nmax`.
pub fn q_binomials(nmax: usize) -> Vec<Vec<LaurentPolyQ>> {
    let mut rows: Vec<Vec<LaurentPolyQ>> = vec![vec![LaurentPolyQ::one()]];
    for n in 1..=nmax {
        let prev = &rows[n - 1];
        let mut row = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let a = if m >= 1 { prev[m - 1].clone() } else { LaurentPolyQ::zero() };
            let b = if m < n { prev[m].shift(m as i64) } else { LaurentPolyQ::zero() };
            row.push(a + b);
        }
        rows.push(row);
    }
    rows
}

/// Quotient of two Laurent polynomials in `q`; equality is by
/// cross-multiplication, so representations need not be reduced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatFuncQ {
    #[serde(with = "poly_serde")]
    pub num: LaurentPolyQ,
    #[serde(with = "poly_serde")]
    pub den: LaurentPolyQ,
}

impl PartialEq for RatFuncQ {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

impl RatFuncQ {
    pub fn new(num: LaurentPolyQ, den: LaurentPolyQ) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Self { num, den };
        r.tidy();
        r
    }

    pub fn from_poly(p: LaurentPolyQ) -> Self {
        Self { num: p, den: LaurentPolyQ::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPolyQ::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPolyQ::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Removes common integer content, powers of `q` and any common
    /// factors `1 ± q^m` (m ≤ 24); makes the denominator's lowest coefficient positive.
    pub fn tidy(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPolyQ::one();
            return;
        }
        let shift = self.den.low_degree();
        self.den = self.den.shift(-shift);
        self.num = self.num.shift(-shift);
        let g = Integer::from(self.num.content().gcd_ref(&self.den.content()));
        if g > 1 {
            self.num = LaurentPolyQ::from_coeffs(
                self.num.low,
                self.num.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect(),
            );
            self.den = LaurentPolyQ::from_coeffs(
                self.den.low,
                self.den.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect(),
            );
        }
        for m in 1..=24i64 {
            for f in [LaurentPolyQ::one_minus_qn(m), LaurentPolyQ::one() + LaurentPolyQ::monomial(1, m)] {
                while self.den.degree() >= m {
                    match (self.num.div_exact(&f), self.den.div_exact(&f)) {
                        (Some(a), Some(b)) => {
                            self.num = a;
                            self.den = b;
                        }
                        _ => break,
                    }
                }
            }
        }
        if self.den.coeff(self.den.low_degree()) < 0 {
            self.num = -self.num.clone();
            self.den = -self.den.clone();
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone());
        }
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: -self.num.clone(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn mul_poly(&self, p: &LaurentPolyQ) -> Self {
        Self::new(&self.num * p, self.den.clone())
    }

    pub fn eval<T: Real>(&self, q: &Complex<T>, bits: u32) -> Complex<T> {
        self.num.eval(q, bits) / self.den.eval(q, bits)
    }

    pub fn eval_rational(&self, q: &Rational) -> Rational {
        self.num.eval_rational(q) / self.den.eval_rational(q)
    }

    /// Power series `Σ_{k=low}^{low+terms-1} a_k q^k`; requires the
    /// denominator to have lowest coefficient ±1.
    pub fn series(&self, terms: usize) -> (i64, Vec<Integer>) {
        let d0 = self.den.coeff(self.den.low_degree());
        assert!(d0 == 1 || d0 == -1, "series needs a unit leading denominator coefficient");
        let low = self.num.low_degree() - self.den.low_degree();
        let num: Vec<Integer> = (0..terms as i64).map(|k| self.num.coeff(self.num.low_degree() + k)).collect();
        let den: Vec<Integer> = (0..terms as i64).map(|k| self.den.coeff(self.den.low_degree() + k)).collect();
        let mut out: Vec<Integer> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = num[k].clone();
            for j in 1..=k {
                acc -= Integer::from(&den[j] * &out[k - j]);
            }
            out.push(acc * &d0);
        }
        (low, out)
    }
}

impl fmt::Display for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPolyQ::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// JSON form `{degrees:[...], coeffs:["bigint",...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsePolyJson {
    pub degrees: Vec<i64>,
    pub coeffs: Vec<String>,
}

impl From<&LaurentPolyQ> for SparsePolyJson {
    fn from(p: &LaurentPolyQ) -> Self {
        let (degrees, coeffs) = p.to_sparse_strings();
        Self { degrees, coeffs }
    }
}

impl SparsePolyJson {
    pub fn to_poly(&self) -> Option<LaurentPolyQ> {
        LaurentPolyQ::from_sparse_strings(&self.degrees, &self.coeffs)
    }
}

pub(crate) mod poly_serde {
    use super::{LaurentPolyQ, SparsePolyJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &LaurentPolyQ, s: S) -> Result<S::Ok, S::Error> {
        SparsePolyJson::from(p).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<LaurentPolyQ, D::Error> {
        let j = SparsePolyJson::deserialize(d)?;
        j.to_poly().ok_or_else(|| serde::de::Error::custom("malformed polynomial"))
    }
}

impl One for LaurentPolyQ {
    fn one() -> Self {
        LaurentPolyQ::one()
    }
}

impl Zero for LaurentPolyQ {
    fn zero() -> Self {
        LaurentPolyQ::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(low: i64, c: &[i64]) -> LaurentPolyQ {
        LaurentPolyQ::from_i64s(low, c)
    }

    #[test]
    fn arithmetic_and_normalization() {
        let a = p(0, &[1, 2, 1]);
        let b = p(-1, &[1, 1]);
        assert_eq!(&a * &b, p(-1, &[1, 3, 3, 1]));
        assert_eq!(&a - &a, LaurentPolyQ::zero());
        assert_eq!(p(0, &[0, 0, 5, 0]), LaurentPolyQ::monomial(5, 2));
        assert_eq!(a.reflect().shift(2), a);
    }

    #[test]
    fn exact_division() {
        let a = p(0, &[1, 2, 1]);
        let f = p(0, &[1, 1]);
        assert_eq!(a.div_exact(&f), Some(f.clone()));
        assert_eq!(a.div_exact(&p(0, &[1, 2])), None);
        let b = &qq_poch(5) * &p(-3, &[2, 0, 7]);
        assert_eq!(b.div_exact(&qq_poch(5)), Some(p(-3, &[2, 0, 7])));
    }

    #[test]
    fn gaussian_binomials() {
        let rows = q_binomials(4);
        assert_eq!(rows[4][2], p(0, &[1, 1, 2, 1, 1]));
        let lhs = &qq_poch(4);
        let rhs = &(&rows[4][2] * &qq_poch(2)) * &qq_poch(2);
        assert_eq!(*lhs, rhs);
    }

    #[test]
    fn rational_series_and_equality() {
        let r = RatFuncQ::new(LaurentPolyQ::one(), qq_poch(3));
        let (low, s) = r.series(5);
        assert_eq!(low, 0);
        assert_eq!(s, [1, 1, 2, 3, 4].map(Integer::from).to_vec());
        let r2 = RatFuncQ::new(p(0, &[1, 1]), &qq_poch(3) * &p(0, &[1, 1]));
        assert_eq!(r, r2);
        assert_eq!(r2.den, qq_poch(3));
    }

    #[test]
    fn evaluation() {
        let a = p(-1, &[1, 0, 3]);
        let v: f64 = a.eval_real(&2.0, 53);
        assert!((v - 6.5).abs() < 1e-15);
        let r = a.eval_rational(&Rational::from((1, 2)));
        assert_eq!(r, Rational::from((7, 2)));
    }

    #[test]
    fn display_and_json() {
        let a = p(-1, &[1, -2, 0, 3]);
        assert_eq!(a.to_string(), "q^-1 - 2 + 3*q^2");
        let j = SparsePolyJson::from(&a);
        assert_eq!(j.degrees, vec![-1, 0, 2]);
        assert_eq!(j.to_poly().unwrap(), a);
    }
}
