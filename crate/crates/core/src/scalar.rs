//! Scalar abstraction: `f64` for quick evaluations and [`Mp`] (MPFR) for
//! arbitrary precision. All algorithms are written against [`Real`] and
//! `num_complex::Complex<T>`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rug::float::Constant;
use rug::ops::{DivFrom, SubFrom};
use rug::Float;

/// Real scalar usable by every numeric routine of the crate.
///
/// Precision-carrying constructors take a bit count; `f64` ignores it.
pub trait Real:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_f64_p(x: f64, bits: u32) -> Self;
    /// Exact small integer.
    fn int(n: i64) -> Self;
    fn from_integer(n: &rug::Integer, bits: u32) -> Self;
    fn from_rational(r: &rug::Rational, bits: u32) -> Self;
    fn parse_p(s: &str, bits: u32) -> Option<Self>;
    fn pi_p(bits: u32) -> Self;
    fn ln2_p(bits: u32) -> Self;
    /// Working precision of this value in bits (53 for `f64`).
    fn bits(&self) -> u32;
    fn with_bits(&self, bits: u32) -> Self;
    fn to_f64(&self) -> f64;
    /// log10 |x|, finite for values whose magnitude overflows `f64`.
    fn log10_abs(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn abs(&self) -> Self;
    fn hypot(&self, other: &Self) -> Self;
    fn floor(&self) -> Self;
    fn is_finite(&self) -> bool;
    fn erfc(&self) -> Self;
    /// Value at the same precision as `self`.
    fn like(&self, x: f64) -> Self {
        Self::from_f64_p(x, self.bits())
    }
    fn ratio(num: i64, den: i64, bits: u32) -> Self {
        Self::from_rational(&rug::Rational::from((num, den)), bits)
    }
    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one().with_bits(self.bits());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Real for f64 {
    fn from_f64_p(x: f64, _: u32) -> Self {
        x
    }
    fn int(n: i64) -> Self {
        n as f64
    }
    fn from_integer(n: &rug::Integer, _: u32) -> Self {
        n.to_f64()
    }
    fn from_rational(r: &rug::Rational, _: u32) -> Self {
        r.to_f64()
    }
    fn parse_p(s: &str, _: u32) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn pi_p(_: u32) -> Self {
        std::f64::consts::PI
    }
    fn ln2_p(_: u32) -> Self {
        std::f64::consts::LN_2
    }
    fn bits(&self) -> u32 {
        53
    }
    fn with_bits(&self, _: u32) -> Self {
        *self
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn log10_abs(&self) -> f64 {
        f64::abs(*self).log10()
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn erfc(&self) -> Self {
        libm::erfc(*self)
    }
}

/// MPFR float whose binary operations run at the larger operand precision,
/// so exact low-precision constants (`zero`, `one`, `int`) mix freely with
/// working-precision values.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl Mp {
    pub fn new(bits: u32, x: f64) -> Self {
        Mp(Float::with_val(bits, x))
    }
    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(25)))
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.0.to_string_radix(10, Some(p.max(1)))),
            None => write!(f, "{}", self.0.to_string_radix(10, Some(25))),
        }
    }
}

fn prec_of(a: &Float, b: &Float) -> u32 {
    a.prec().max(b.prec())
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, o: Mp) -> Mp {
        if self.0.prec() >= o.0.prec() {
            let mut a = self.0;
            a += &o.0;
            Mp(a)
        } else {
            let mut b = o.0;
            b += &self.0;
            Mp(b)
        }
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, o: Mp) -> Mp {
        if self.0.prec() >= o.0.prec() {
            let mut a = self.0;
            a -= &o.0;
            Mp(a)
        } else {
            let mut b = o.0;
            b.sub_from(&self.0);
            Mp(b)
        }
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, o: Mp) -> Mp {
        if self.0.prec() >= o.0.prec() {
            let mut a = self.0;
            a *= &o.0;
            Mp(a)
        } else {
            let mut b = o.0;
            b *= &self.0;
            Mp(b)
        }
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, o: Mp) -> Mp {
        if self.0.prec() >= o.0.prec() {
            let mut a = self.0;
            a /= &o.0;
            Mp(a)
        } else {
            let mut b = o.0;
            b.div_from(&self.0);
            Mp(b)
        }
    }
}

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, o: Mp) -> Mp {
        let p = prec_of(&self.0, &o.0);
        Mp(Float::with_val(p, &self.0 % &o.0))
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Zero for Mp {
    fn zero() -> Self {
        Mp(Float::new(1))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Self {
        Mp(Float::with_val(1, 1))
    }
}

impl Num for Mp {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let v = Float::parse_radix(s, radix as i32)?;
        Ok(Mp(Float::with_val(256, v)))
    }
}

impl Real for Mp {
    fn from_f64_p(x: f64, bits: u32) -> Self {
        Mp(Float::with_val(bits, x))
    }
    fn int(n: i64) -> Self {
        Mp(Float::with_val(64, n))
    }
    fn from_integer(n: &rug::Integer, bits: u32) -> Self {
        Mp(Float::with_val(bits, n))
    }
    fn from_rational(r: &rug::Rational, bits: u32) -> Self {
        Mp(Float::with_val(bits, r))
    }
    fn parse_p(s: &str, bits: u32) -> Option<Self> {
        let v = Float::parse(s.trim()).ok()?;
        Some(Mp(Float::with_val(bits, v)))
    }
    fn pi_p(bits: u32) -> Self {
        Mp(Float::with_val(bits, Constant::Pi))
    }
    fn ln2_p(bits: u32) -> Self {
        Mp(Float::with_val(bits, Constant::Log2))
    }
    fn bits(&self) -> u32 {
        self.0.prec()
    }
    fn with_bits(&self, bits: u32) -> Self {
        Mp(Float::with_val(bits, &self.0))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn log10_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }
    fn sin(&self) -> Self {
        Mp(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mp(self.0.clone().cos())
    }
    fn atan2(&self, x: &Self) -> Self {
        let p = prec_of(&self.0, &x.0);
        Mp(Float::with_val(p, self.0.atan2_ref(&x.0)))
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn hypot(&self, other: &Self) -> Self {
        let p = prec_of(&self.0, &other.0);
        Mp(Float::with_val(p, self.0.hypot_ref(&other.0)))
    }
    fn floor(&self) -> Self {
        Mp(self.0.clone().floor())
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn erfc(&self) -> Self {
        Mp(self.0.clone().erfc())
    }
}

/// Complex helpers that need transcendental functions.
pub trait ComplexExt<T: Real>: Sized {
    fn cexp(&self) -> Self;
    /// Principal logarithm.
    fn cln(&self) -> Self;
    fn csqrt(&self) -> Self;
    fn cabs(&self) -> T;
    fn carg(&self) -> T;
    fn cpow(&self, e: &Self) -> Self;
    fn cpowi(&self, n: i64) -> Self;
    fn scale_by(&self, s: &T) -> Self;
    fn cinv(&self) -> Self;
    fn from_polar_t(r: &T, theta: &T) -> Self;
    fn real(x: T) -> Self;
    fn log10_abs(&self) -> f64;
    fn with_bits(&self, bits: u32) -> Self;
    fn i() -> Self;
}

impl<T: Real> ComplexExt<T> for Complex<T> {
    fn cexp(&self) -> Self {
        let r = self.re.exp();
        Complex::new(r.clone() * self.im.cos(), r * self.im.sin())
    }
    fn cln(&self) -> Self {
        Complex::new(self.cabs().ln(), self.carg())
    }
    fn csqrt(&self) -> Self {
        if self.re.is_zero() && self.im.is_zero() {
            return self.clone();
        }
        let half = T::ratio(1, 2, self.re.bits());
        (self.cln().scale_by(&half)).cexp()
    }
    fn cabs(&self) -> T {
        self.re.hypot(&self.im)
    }
    fn carg(&self) -> T {
        self.im.atan2(&self.re)
    }
    fn cpow(&self, e: &Self) -> Self {
        (e.clone() * self.cln()).cexp()
    }
    fn cpowi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.cinv() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let bits = self.re.bits().max(self.im.bits());
        let mut acc = Complex::new(T::one().with_bits(bits), T::zero().with_bits(bits));
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
    fn scale_by(&self, s: &T) -> Self {
        Complex::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }
    fn cinv(&self) -> Self {
        let d = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        Complex::new(self.re.clone() / d.clone(), -self.im.clone() / d)
    }
    fn from_polar_t(r: &T, theta: &T) -> Self {
        Complex::new(r.clone() * theta.cos(), r.clone() * theta.sin())
    }
    fn real(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    fn log10_abs(&self) -> f64 {
        let a = self.re.log10_abs();
        let b = self.im.log10_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * (10f64.powf(2.0 * (a - m)) + 10f64.powf(2.0 * (b - m))).log10()
    }
    fn with_bits(&self, bits: u32) -> Self {
        Complex::new(self.re.with_bits(bits), self.im.with_bits(bits))
    }
    fn i() -> Self {
        Complex::new(T::zero(), T::one())
    }
}

/// Approximate `|z|` as `f64` (saturating for huge magnitudes).
pub fn abs_f64<T: Real>(z: &Complex<T>) -> f64 {
    10f64.powf(z.log10_abs())
}
