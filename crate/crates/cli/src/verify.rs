use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use num_complex::Complex;
use qresurgence::coeffs::{qp1_d_numeric, qp1_d_truncated};
use qresurgence::hyperterm::{
    fq_elementary_residual, fq_eval, fq_normalize, fq_normalizing_sum, fq_recurrence_check, fq_reflect, fq_shift_sigma,
    fq_stokes_jump, fq_truncation_check, HyperArgs, Normalization,
};
use qresurgence::qborel::EntireBorelQp1;
use qresurgence::qcore::{eq_kernel, large_z_check, qbinomial, qperiodic_check, theta, theta_series, QBase, SurfacePoint};
use qresurgence::qlaplace::{laplace_e, laplace_theta, monomial, phi20_residual, qp1_residual, RaySpec};
use qresurgence::stokes::{
    k0_closed, k0_series, k_bracket_series, k_closed_ratio, k_extract, riccati_multiplier_check, transseries_solve,
    K4_BRACKET_PRINTED,
};
use qresurgence::{ComplexExt, Mp, PrecisionContext, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{emit, CliError, GlobalOpts, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Qcore,
    Hyperterm,
    Laplace,
    Stokes,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Random points per randomized check.
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
}

/// Printed Taylor coefficients of `K₀` through `q⁸`.
const K0_PRINTED: [i64; 9] = [1, 2, 5, 10, 20, 36, 65, 110, 185];

struct Check {
    suite: &'static str,
    name: String,
    measured: f64,
    tol: f64,
    error: Option<String>,
}

impl Check {
    fn pass(&self) -> bool {
        self.error.is_none() && self.measured <= self.tol
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "suite": self.suite,
            "name": self.name,
            "measured": self.measured,
            "tol": self.tol,
            "pass": self.pass(),
        });
        if let Some(e) = &self.error {
            v["error"] = json!(e);
        }
        v
    }
}

struct Runner<'a> {
    suite: &'static str,
    ctx: PrecisionContext,
    q: QBase<Mp>,
    rng: &'a mut ChaCha8Rng,
    samples: usize,
    checks: Vec<Check>,
}

impl Runner<'_> {
    fn bits(&self) -> u32 {
        self.ctx.bits()
    }

    fn real(&self, x: f64) -> Mp {
        Mp::new(self.bits(), x)
    }

    fn cplx(&self, re: f64, im: f64) -> Complex<Mp> {
        Complex::new(self.real(re), self.real(im))
    }

    fn point(&self, modulus: f64, arg: f64) -> SurfacePoint<Mp> {
        SurfacePoint::new(self.real(modulus), self.real(arg)).expect("positive modulus")
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        self.rng.gen_range(lo..hi)
    }

    fn series_tol(&self) -> f64 {
        10f64.powi(-(self.ctx.digits as i32 - 10))
    }

    fn quad_tol(&self) -> f64 {
        100.0 * self.ctx.quad_tol
    }

    fn record(&mut self, name: impl Into<String>, tol: f64, measured: qresurgence::Result<f64>) {
        let (measured, error) = match measured {
            Ok(m) => (m, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        self.checks.push(Check { suite: self.suite, name: name.into(), measured, tol, error });
    }
}

fn rel(a: &Complex<Mp>, b: &Complex<Mp>) -> f64 {
    let s = a.log10_abs().max(b.log10_abs());
    10f64.powf((a.clone() - b.clone()).log10_abs() - s)
}

fn qcore_suite(r: &mut Runner) {
    let st = r.series_tol();
    let q = r.q.clone();
    let ctx = r.ctx;
    let lnq = q.real_q().expect("real q").ln();
    for s in 0..r.samples {
        let tau = {
            let (m, a) = (r.uniform(0.3, 3.0), r.uniform(-2.5, 2.5));
            r.point(m, a)
        };
        let tv = tau.value();
        let inv = (|| Ok(rel(&eq_kernel(&tau.inv(), &q)?, &(tv.clone() * eq_kernel(&tau, &q)?))))();
        r.record(format!("E_q inversion #{s}"), st, inv);
        let (nr, ni) = (r.uniform(-3.0, 3.0), r.uniform(-0.5, 0.5));
        let n = r.cplx(nr, ni);
        let shift = (|| {
            let qn = SurfacePoint::new((n.re.clone() * lnq.clone()).exp(), n.im.clone() * lnq.clone())?;
            let lhs = eq_kernel(&tau.mul(&qn), &q)?;
            let half = (n.clone() * (n.clone() - Complex::new(Mp::int(1), Mp::int(0)))).scale_by(&Mp::ratio(1, 2, ctx.bits()));
            Ok(rel(&lhs, &(tau.powc(&n) * q.pow(&half) * eq_kernel(&tau, &q)?)))
        })();
        r.record(format!("E_q q-shift, complex n #{s}"), st, shift);
        let th_inv = (|| Ok(rel(&theta(&tv, &q, &ctx)?, &(tv.clone() * theta(&tv.cinv(), &q, &ctx)?))))();
        r.record(format!("1/theta inversion #{s}"), st, th_inv);
        let k = r.rng.gen_range(-3i64..=3);
        let th_shift = (|| {
            let shifted = theta(&(tv.clone() * q.powi(k)), &q, &ctx)?;
            Ok(rel(&theta(&tv, &q, &ctx)?, &(tv.cpowi(k) * q.powi(k * (k - 1) / 2) * shifted)))
        })();
        r.record(format!("1/theta q-shift, n = {k} #{s}"), st, th_shift);
        let series = (|| Ok(rel(&theta(&tv, &q, &ctx)?, &theta_series(&tv, &q, &ctx)?)))();
        r.record(format!("triple product vs series #{s}"), st, series);
        let (ar, ai) = (r.uniform(-2.0, 2.0), r.uniform(-1.0, 1.0));
        let a = r.cplx(ar, ai);
        let z = Complex::from_polar(r.uniform(0.05, 0.8), r.uniform(-PI, PI));
        let z = r.cplx(z.re, z.im);
        let qb = (|| qbinomial(&a, &z, &q, &ctx).map(|(l, rr)| rel(&l, &rr)))();
        r.record(format!("q-binomial theorem #{s}"), st, qb);
        r.record(format!("theta E_q is q-periodic and matches its closed form #{s}"), 1e-15, qperiodic_check(&tau, &q, &ctx));
        let zr = r.uniform(1.5, 50.0);
        let big = r.real(zr);
        r.record(format!("large-z formula #{s}"), 1e-15, large_z_check(&big, &q, &ctx));
    }
}

fn hyperterm_suite(r: &mut Runner) {
    let qt = r.quad_tol();
    let q = r.q.clone();
    let ctx = r.ctx;
    let qf = q.abs_f64();
    let half = (|| {
        let a = HyperArgs::new(r.point(1.0, 0.0), r.cplx(0.5, 0.0), r.cplx(1.0, 0.0));
        let expect = Complex::real((q.real_q()?.ln() / Mp::int(8)).exp() / Mp::int(2));
        Ok(rel(&fq_eval(&a, &q, &ctx)?.value, &expect))
    })();
    r.record("F(1; 1/2, 1) = q^(1/8)/2", qt, half);
    for s in 0..r.samples {
        let mk = |r: &mut Runner, m: (f64, f64), a: (f64, f64), n: (f64, f64), sg: (f64, f64)| {
            let (mv, av, nv, sv) = (r.uniform(m.0, m.1), r.uniform(a.0, a.1), r.uniform(n.0, n.1), r.uniform(sg.0, sg.1));
            HyperArgs::new(r.point(mv, av), r.cplx(nv, 0.0), r.cplx(sv, 0.0))
        };
        let a = mk(r, (3.0, 6.0), (-0.5, 0.5), (1.5, 2.5), (1.0, 1.0));
        let m = r.rng.gen_range(1..=4usize);
        r.record(format!("truncation identity, M = {m} #{s}"), qt, fq_truncation_check(&a, m, &q, &ctx));
        let a = mk(r, (1.0, 2.5), (0.0, 0.8), (1.5, 2.5), (0.8 / qf, 1.2 / qf));
        let sh = (|| {
            let (b, p) = fq_shift_sigma(&a, 1, &q)?;
            Ok(rel(&(p * fq_eval(&b, &q, &ctx)?.value), &fq_eval(&a, &q, &ctx)?.value))
        })();
        r.record(format!("sigma -> sigma q^-1 shift #{s}"), qt, sh);
        let a = mk(r, (1.0, 2.5), (0.0, 0.8), (1.0, 2.0), (0.6, 1.2));
        for (label, route) in [("normalization to sigma = 1", Normalization::SigmaOne), ("normalization to N = 1", Normalization::NOne)] {
            let v = (|| {
                let (b, p) = fq_normalize(&a, route, &q)?;
                Ok(rel(&(p * fq_eval(&b, &q, &ctx)?.value), &fq_eval(&a, &q, &ctx)?.value))
            })();
            r.record(format!("{label} #{s}"), qt, v);
        }
        let a = mk(r, (2.0, 5.0), (-0.3, 0.3), (0.8, 1.5), (1.0, 1.0));
        match fq_recurrence_check(&a, &q, &ctx) {
            Ok(rc) => {
                r.record(format!("inhomogeneous recurrence #{s}"), qt, Ok(rc.inhomogeneous));
                r.record(format!("homogeneous recurrence #{s}"), qt, Ok(rc.homogeneous));
            }
            Err(e) => r.record(format!("recurrences #{s}"), qt, Err(e)),
        }
        let a = mk(r, (0.3, 2.0), (-1.0, 1.0), (0.5, 2.0), (0.5, 1.5));
        r.record(format!("elementary solution of the recurrence #{s}"), r.series_tol(), fq_elementary_residual(&a, &q));
        let a = mk(r, (0.5, 0.9), (-0.3, 0.3), (2.0, 2.0), (1.0, 1.0));
        let ns = (|| fq_normalizing_sum(&a, &q, &ctx).map(|(l, rr)| rel(&l, &rr)))();
        r.record(format!("normalizing sum #{s}"), qt, ns);
        let a = mk(r, (2.0, 4.0), (0.0, 0.3), (1.5, 2.5), (1.0, 1.0));
        r.record(format!("reflection formula #{s}"), qt, fq_reflect(&a, &q, &ctx));
        let a = mk(r, (1.5, 3.0), (1.0, 2.0), (0.8, 1.5), (1.0, 1.0));
        let jump = (|| fq_stokes_jump(&a.z, &a.n, &a.sigma, &q, &ctx).map(|(j, p)| rel(&j, &p)))();
        r.record(format!("Stokes jump across the negative axis #{s}"), qt, jump);
    }
}

fn laplace_suite(r: &mut Runner) {
    let qt = r.quad_tol();
    let q = r.q.clone();
    let ctx = r.ctx;
    let theta0 = (|| {
        let lam = q.lambda()?;
        let v = laplace_theta(&monomial::<Mp>(0), &r.point(1.0, 0.0), &RaySpec::along(0.0), &q, &ctx)?;
        let raw = v.value.scale_by(&lam);
        Ok(rel(&raw, &Complex::real(lam)))
    })();
    r.record("1/theta kernel: integral of dt/(t theta(t)) = -ln q", qt, theta0);
    for s in 0..r.samples {
        let (m, a) = (r.uniform(0.2, 2.0), r.uniform(-1.0, 1.0));
        let z = r.point(m, a);
        for n in 0..=6i64 {
            let expect = q.powi(-(n * (n - 1) / 2)) * z.value().cpowi(n);
            let ray = RaySpec::along(a);
            let e = (|| Ok(rel(&laplace_e(&monomial::<Mp>(n), &z, &ray, &q, &ctx)?.value, &expect)))();
            r.record(format!("E_q kernel moment n = {n} #{s}"), qt, e);
            let t = (|| Ok(rel(&laplace_theta(&monomial::<Mp>(n), &z, &ray, &q, &ctx)?.value, &expect)))();
            r.record(format!("1/theta kernel moment n = {n} #{s}"), qt, t);
        }
        let (av, bv) = (r.uniform(0.1, 0.5), r.uniform(0.1, 0.5));
        let z = {
            let (m, a) = (r.uniform(0.03, 0.2), r.uniform(-2.0, 2.0));
            r.point(m, a)
        };
        let res = (|| phi20_residual(&r.cplx(av, 0.0), &r.cplx(bv, 0.0), &z, &q, &ctx).map(|x| x.0))();
        r.record(format!("2phi0 sum satisfies its q-difference equation #{s}"), qt, res);
    }
    let z = {
        let (m, a) = (r.uniform(0.01, 0.03), r.uniform(-2.5, 2.5));
        r.point(m, a)
    };
    let qp1 = (|| {
        let borel = EntireBorelQp1::for_laplace(&q, &ctx, z.modulus.to_f64() * q.abs_f64())?;
        let (res, err, _) = qp1_residual(&z, &q, &ctx, &borel)?;
        Ok(res / (10.0 * ctx.quad_tol).max(err))
    })();
    r.record("qP1 sum satisfies the functional equation (residual / bound)", 1.0, qp1);
}

fn stokes_suite(r: &mut Runner) {
    let d = qp1_d_truncated(K0_PRINTED.len() + 1, Some(K0_PRINTED.len() as i64));
    let k0 = k0_series(&d, K0_PRINTED.len() - 1).map(|s| {
        K0_PRINTED.iter().enumerate().filter(|(n, c)| s.coeff(*n as i64) != **c).count() as f64
    });
    r.record("K0 Taylor coefficients through q^8 (mismatches)", 0.0, k0);
    match transseries_solve(4) {
        Ok(set) => {
            let ratios = set.ratios().expect("symbolic").to_vec();
            for (j, rj) in ratios.iter().enumerate().take(4).skip(1) {
                let m = k_closed_ratio(j).map(|c| if c == *rj { 0.0 } else { 1.0 });
                r.record(format!("K{j}/K0 equals its closed form"), 0.0, m);
            }
            let b = k_bracket_series(&ratios[4], 4, K4_BRACKET_PRINTED.len());
            let bad = K4_BRACKET_PRINTED.iter().zip(&b).filter(|(w, x)| **x != **w).count();
            r.record("K4 bracket leading terms (mismatches)", 0.0, Ok(bad as f64));
        }
        Err(e) => r.record("transseries solve", 0.0, Err(e)),
    }
    let fctx = if r.ctx.digits < 80 { r.ctx.with_extra_digits(80 - r.ctx.digits) } else { r.ctx };
    let fit = (|| {
        let q = QBase::real(r.q.real_q()?.with_bits(fctx.bits()))?;
        let d = qp1_d_numeric(60, &q.q);
        let set = k_extract(&d, &q.q, 2, 40..=60)?;
        let k = &set.numeric().expect("numeric")[0];
        Ok(rel(k, &k0_closed(&q, &fctx)?))
    })();
    r.record("K0 from the late coefficients vs 1/(q;q)^2", 1e-6, fit);
    let q = r.q.clone();
    let qv = q.abs_f64();
    match riccati_multiplier_check(&q, 20..=30, &r.ctx) {
        Ok(rep) => {
            r.record("Riccati base case exact", 0.0, Ok(if rep.base_exact { 0.0 } else { 1.0 }));
            let worst = rep.f_ratios.iter().chain(&rep.c_ratios).map(|x| (x - qv).abs() / qv).fold(0.0, f64::max);
            r.record("Riccati deviation ratios approach q (max rel. distance)", 0.1, Ok(worst));
        }
        Err(e) => r.record("Riccati deviation ratios", 0.1, Err(e)),
    }
}

fn default_q(s: Suite) -> &'static str {
    match s {
        Suite::Qcore => "0.5",
        _ => "0.6",
    }
}

pub fn run(a: &VerifyArgs, g: &GlobalOpts) -> Result<(), CliError> {
    let suites: Vec<Suite> = match a.suite {
        Suite::All => vec![Suite::Qcore, Suite::Hyperterm, Suite::Laplace, Suite::Stokes],
        s => vec![s],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut checks = Vec::new();
    let mut configs = Vec::new();
    let mut output = OutputFormat::Json;
    for s in suites {
        let cfg = RunConfig::resolve(g, default_q(s), crate::config::DEFAULT_DIGITS, OutputFormat::Json)?;
        output = cfg.output;
        let (name, f): (&'static str, fn(&mut Runner)) = match s {
            Suite::Qcore => ("qcore", qcore_suite),
            Suite::Hyperterm => ("hyperterm", hyperterm_suite),
            Suite::Laplace => ("laplace", laplace_suite),
            Suite::Stokes => ("stokes", stokes_suite),
            Suite::All => unreachable!(),
        };
        let mut r = Runner { suite: name, ctx: cfg.ctx()?, q: cfg.qbase()?, rng: &mut rng, samples: a.samples, checks: Vec::new() };
        f(&mut r);
        checks.extend(r.checks);
        configs.push(json!({"suite": name, "config": cfg.to_json()}));
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    let out = json!({
        "seed": g.seed,
        "samples": a.samples,
        "suites": configs,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "passed": checks.len() - failed,
        "failed": failed,
    });
    let text = |_: &Value| {
        let mut s = String::new();
        for c in &checks {
            let status = if c.pass() { "PASS" } else { "FAIL" };
            let detail = c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
            s.push_str(&format!("{status} [{}] {}: {:.3e} <= {:.1e}{detail}\n", c.suite, c.name, c.measured, c.tol));
        }
        s.push_str(&format!("{} passed, {failed} failed (seed {})\n", checks.len() - failed, g.seed));
        s
    };
    let csv = |_: &Value| {
        let mut s = String::from("suite,name,measured,tol,pass\n");
        for c in &checks {
            s.push_str(&format!("{},\"{}\",{:e},{:e},{}\n", c.suite, c.name, c.measured, c.tol, c.pass()));
        }
        s
    };
    emit(&out, output, Some(&text), Some(&csv));
    if failed > 0 {
        return Err(CliError::Verify(failed));
    }
    Ok(())
}
