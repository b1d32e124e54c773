//! Dense complex linear algebra at arbitrary precision: Gaussian
//! elimination, Householder least squares and polynomial roots.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ComplexExt, Real};

/// Solution of `A x = b` with the smallest relative pivot encountered
/// (`|pivot| / max|A|`, as log10).
pub struct Solved<T: Real> {
    pub x: Vec<Complex<T>>,
    pub min_pivot_log10: f64,
}

fn max_bits<T: Real>(a: &[Vec<Complex<T>>], b: &[Complex<T>]) -> u32 {
    a.iter().flatten().chain(b).map(|x| x.re.bits().max(x.im.bits())).max().unwrap_or(53)
}

fn promote<T: Real>(a: &mut [Vec<Complex<T>>], b: &mut [Complex<T>]) -> u32 {
    let bits = max_bits(a, b);
    for x in a.iter_mut().flatten().chain(b.iter_mut()) {
        *x = x.with_bits(bits);
    }
    bits
}

/// Gaussian elimination with partial pivoting. Errors only on an exactly
/// zero pivot.
pub fn solve<T: Real>(mut a: Vec<Vec<Complex<T>>>, mut b: Vec<Complex<T>>) -> Result<Solved<T>> {
    promote(&mut a, &mut b);
    let n = b.len();
    let scale = a.iter().flatten().map(|x| x.log10_abs()).fold(f64::NEG_INFINITY, f64::max);
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let (p, best) = (col..n)
            .map(|r| (r, a[r][col].log10_abs()))
            .fold((col, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == f64::NEG_INFINITY {
            return Err(Error::Degenerate("singular linear system".into()));
        }
        min_piv = min_piv.min(best - scale);
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].cinv();
        for r in col + 1..n {
            if a[r][col].re.is_zero() && a[r][col].im.is_zero() {
                continue;
            }
            let f = a[r][col].clone() * inv.clone();
            for c in col..n {
                let t = f.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - t;
            }
            b[r] = b[r].clone() - f * b[col].clone();
        }
    }
    let mut x = vec![Complex::<T>::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for c in r + 1..n {
            s = s - a[r][c].clone() * x[c].clone();
        }
        x[r] = s / a[r][r].clone();
    }
    Ok(Solved { x, min_pivot_log10: if n == 0 { 0.0 } else { min_piv } })
}

/// Least-squares solution of an overdetermined system by Householder QR.
/// Returns the coefficients, the residual norm and log10 of the ratio of
/// smallest to largest `|R_ii|`.
pub fn lstsq<T: Real>(mut a: Vec<Vec<Complex<T>>>, mut b: Vec<Complex<T>>) -> Result<(Vec<Complex<T>>, T, f64)> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    if m < n {
        return Err(Error::IllConditioned(format!("{m} equations for {n} unknowns")));
    }
    let bits = promote(&mut a, &mut b);
    for k in 0..n {
        let mut norm2 = T::zero();
        for row in a.iter().skip(k) {
            norm2 = norm2 + row[k].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm.is_zero() {
            return Err(Error::IllConditioned("rank-deficient least-squares system".into()));
        }
        let akk = a[k][k].clone();
        let phase = if akk.re.is_zero() && akk.im.is_zero() {
            Complex::<T>::one()
        } else {
            akk.scale_by(&(T::one() / akk.cabs()))
        };
        let alpha = -(phase * norm);
        let mut v: Vec<Complex<T>> = (k..m).map(|i| a[i][k].clone()).collect();
        v[0] = v[0].clone() - alpha.clone();
        let vnorm2 = v.iter().fold(T::zero(), |s, x| s + x.norm_sqr());
        if vnorm2.is_zero() {
            continue;
        }
        let two = T::int(2).with_bits(bits);
        for j in k..n {
            let mut dot = Complex::<T>::zero();
            for (i, vi) in v.iter().enumerate() {
                dot = dot + vi.conj() * a[k + i][j].clone();
            }
            let f = dot.scale_by(&(two.clone() / vnorm2.clone()));
            for (i, vi) in v.iter().enumerate() {
                a[k + i][j] = a[k + i][j].clone() - vi.clone() * f.clone();
            }
        }
        let mut dot = Complex::<T>::zero();
        for (i, vi) in v.iter().enumerate() {
            dot = dot + vi.conj() * b[k + i].clone();
        }
        let f = dot.scale_by(&(two / vnorm2));
        for (i, vi) in v.iter().enumerate() {
            b[k + i] = b[k + i].clone() - vi.clone() * f.clone();
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i][i].log10_abs()).collect();
    let dmax = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut x = vec![Complex::<T>::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for c in r + 1..n {
            s = s - a[r][c].clone() * x[c].clone();
        }
        x[r] = s / a[r][r].clone();
    }
    let res = b[n..].iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt();
    Ok((x, res, if n == 0 { 0.0 } else { dmin - dmax }))
}

/// Evaluates `p(z)` and `p'(z)` for coefficients in increasing degree.
pub fn horner_d<T: Real>(p: &[Complex<T>], z: &Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut v = Complex::<T>::zero();
    let mut d = Complex::<T>::zero();
    for c in p.iter().rev() {
        d = d * z.clone() + v.clone();
        v = v * z.clone() + c.clone();
    }
    (v, d)
}

pub fn horner<T: Real>(p: &[Complex<T>], z: &Complex<T>) -> Complex<T> {
    let mut v = Complex::<T>::zero();
    for c in p.iter().rev() {
        v = v * z.clone() + c.clone();
    }
    v
}

/// All roots of `Σ p_k z^k` by Aberth–Ehrlich iteration followed by a
/// Newton polish. Trailing zero coefficients are stripped first.
pub fn poly_roots<T: Real>(p: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let mut deg = p.len();
    while deg > 0 && p[deg - 1].re.is_zero() && p[deg - 1].im.is_zero() {
        deg -= 1;
    }
    if deg <= 1 {
        return Ok(Vec::new());
    }
    let p = &p[..deg];
    let n = deg - 1;
    let bits = p[n].re.bits().max(p[0].re.bits());
    // Initial guesses on a circle of radius from the Cauchy-type bound.
    let lead = p[n].log10_abs();
    let mut r = f64::NEG_INFINITY;
    for (k, c) in p.iter().enumerate().take(n) {
        let lc = c.log10_abs();
        if lc.is_finite() {
            r = r.max((lc - lead) / (n - k) as f64);
        }
    }
    let radius = T::from_f64_p(10f64.powf(r.clamp(-300.0, 300.0)), bits);
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let ang = T::from_f64_p(2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4, bits);
            Complex::from_polar_t(&radius, &ang)
        })
        .collect();
    let target = -(bits as f64) * 0.30103 + 2.0;
    let abs_p: Vec<T> = p.iter().map(|c| c.cabs()).collect();
    // |p(z)| at the level of rounding in Horner's rule.
    let at_noise = |v: &Complex<T>, zi: &Complex<T>| -> bool {
        let x = zi.cabs();
        let mut b = T::zero();
        for c in abs_p.iter().rev() {
            b = b * x.clone() + c.clone();
        }
        v.log10_abs() < b.log10_abs() + target + 1.0
    };
    let mut done = vec![false; n];
    let mut converged = false;
    for _ in 0..(200 + 20 * n) {
        let mut max_step = f64::NEG_INFINITY;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, d) = horner_d(p, &z[i]);
            if (v.re.is_zero() && v.im.is_zero()) || at_noise(&v, &z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = v / d;
            let mut s = Complex::<T>::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = s + (z[i].clone() - zj.clone()).cinv();
                }
            }
            let denom = Complex::<T>::one() - ratio.clone() * s;
            let step = ratio / denom;
            max_step = max_step.max(step.log10_abs() - z[i].log10_abs().max(-300.0));
            z[i] = z[i].clone() - step;
        }
        if max_step < target || done.iter().all(|d| *d) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence("polynomial root iteration did not converge".into()));
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = horner_d(p, zi);
            if d.re.is_zero() && d.im.is_zero() {
                break;
            }
            *zi = zi.clone() - v / d;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn solves_small_system() {
        let a = vec![vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(0.0, 1.0), c(3.0, 0.0)]];
        let x = vec![c(1.0, -1.0), c(0.5, 2.0)];
        let b: Vec<_> = a.iter().map(|r| r[0] * x[0] + r[1] * x[1]).collect();
        let s = solve(a, b).unwrap();
        for i in 0..2 {
            assert!((s.x[i] - x[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn least_squares_exact_fit() {
        let rows: Vec<Vec<Complex<f64>>> = (0..6).map(|i| vec![c(1.0, 0.0), c(i as f64, 0.0)]).collect();
        let b: Vec<_> = (0..6).map(|i| c(3.0 - 2.0 * i as f64, 0.5)).collect();
        let (x, res, _) = lstsq(rows, b).unwrap();
        assert!((x[0] - c(3.0, 0.5)).norm() < 1e-13);
        assert!((x[1] - c(-2.0, 0.0)).norm() < 1e-13);
        assert!(res < 1e-12);
    }

    #[test]
    fn roots_of_known_polynomial() {
        let bits = 200;
        let m = |x: f64| Complex::new(Mp::new(bits, x), Mp::new(bits, 0.0));
        let roots = [m(1.0), m(-2.0), Complex::new(Mp::new(bits, 0.5), Mp::new(bits, 3.0))];
        let mut p = vec![m(1.0)];
        for r in &roots {
            let mut np = vec![Complex::<Mp>::zero(); p.len() + 1];
            for (k, ck) in p.iter().enumerate() {
                np[k + 1] = np[k + 1].clone() + ck.clone();
                np[k] = np[k].clone() - ck.clone() * r.clone();
            }
            p = np;
        }
        let found = poly_roots(&p).unwrap();
        for r in &roots {
            let best = found.iter().map(|f| (f.clone() - r.clone()).log10_abs()).fold(f64::INFINITY, f64::min);
            assert!(best < -50.0, "root {r:?} missed: {best}");
        }
    }

    #[test]
    fn least_squares_with_exact_constant_column() {
        let b = 200;
        let q = Complex::new(Mp::new(b, 0.5), Mp::new(b, 0.0));
        let rows: Vec<Vec<Complex<Mp>>> = (0..16).map(|i| (0..3).map(|j| q.cpowi(i * j)).collect()).collect();
        let rhs = vec![Complex::new(Mp::new(b, 1.0), Mp::new(b, 0.0)); 16];
        let (x, _, _) = lstsq(rows, rhs).unwrap();
        assert!((x[0].clone() - Complex::new(Mp::new(b, 1.0), Mp::new(b, 0.0))).log10_abs() < -50.0);
        assert!(x[1].log10_abs() < -50.0);
    }
}
