use clap::{Args, ValueEnum};
use qresurgence::hyperterm::{fq_eval, HyperArgs};
use qresurgence::qborel::EntireBorelQp1;
use qresurgence::qcore::{eq_kernel, qpoch_inf, qpoch_nu, theta};
use qresurgence::qlaplace::{sum_2phi0, sum_qp1, SummedValue};
use qresurgence::{Mp, Real};
use serde_json::{json, Value};

use crate::config::{complex_json, emit, parse_complex, surface_point, CliError, GlobalOpts, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subject {
    /// θ_q(τ) at complex `--tau`.
    Theta,
    /// E_q(τ) at the surface point `--tau` (modulus) and `--arg`.
    Eqkernel,
    /// (a;q)_∞, or (a;q)_ν with `--nu`.
    Qpoch,
    /// Borel–Laplace sum of ₂φ₀(a,b;−;q,z).
    Phi20sum,
    /// Borel–Laplace sum of the order-one q-Painlevé series.
    Qp1sum,
    /// q-hyperterminant F_q(z; N, σ).
    Hyperterm,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub subject: Subject,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value = "0.3", allow_hyphen_values = true)]
    pub b: String,
    /// Modulus of z.
    #[arg(long, default_value = "0.1")]
    pub z: String,
    /// Argument of z (or of τ for eqkernel) on the logarithmic surface.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub arg: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub tau: String,
    #[arg(long = "N", default_value = "1", allow_hyphen_values = true)]
    pub n: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub sigma: String,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
}

fn summed_json(v: &SummedValue<Mp>, digits: u32) -> Value {
    let mut out: Value = serde_json::from_str(&v.to_json(digits as usize)).expect("summed value is JSON");
    out["degraded"] = json!(v.degraded);
    out
}

pub fn run(a: &EvalArgs, g: &GlobalOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(g, "0.5", crate::config::DEFAULT_DIGITS, OutputFormat::Json)?;
    let ctx = cfg.ctx()?;
    let q = cfg.qbase()?;
    let d = cfg.digits;
    let plain = |c| {
        let mut v = complex_json(&c, d);
        v["err"] = json!(0.0);
        v
    };
    let result = match a.subject {
        Subject::Theta => plain(theta(&parse_complex(&a.tau, &ctx)?, &q, &ctx)?),
        Subject::Eqkernel => plain(eq_kernel(&surface_point(&a.tau, &a.arg, &ctx)?, &q)?),
        Subject::Qpoch => {
            let av = parse_complex(&a.a, &ctx)?;
            match &a.nu {
                Some(nu) => plain(qpoch_nu(&av, &parse_complex(nu, &ctx)?, &q, &ctx)?),
                None => plain(qpoch_inf(&av, &q, &ctx)?),
            }
        }
        Subject::Phi20sum => {
            let z = surface_point(&a.z, &a.arg, &ctx)?;
            summed_json(&sum_2phi0(&parse_complex(&a.a, &ctx)?, &parse_complex(&a.b, &ctx)?, &z, &q, &ctx)?, d)
        }
        Subject::Qp1sum => {
            let z = surface_point(&a.z, &a.arg, &ctx)?;
            let min_abs = z.modulus.to_f64() * q.abs_f64();
            let borel = EntireBorelQp1::for_laplace(&q, &ctx, min_abs)?;
            summed_json(&sum_qp1(&z, &q, &ctx, &borel)?, d)
        }
        Subject::Hyperterm => {
            let z = surface_point(&a.z, &a.arg, &ctx)?;
            let args = HyperArgs::new(z, parse_complex(&a.n, &ctx)?, parse_complex(&a.sigma, &ctx)?);
            summed_json(&fq_eval(&args, &q, &ctx)?, d)
        }
    };
    let subject = a.subject.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
    let out = json!({"subject": subject, "config": cfg.to_json(), "result": result});
    let text = |v: &Value| {
        let r = &v["result"];
        format!("{} {} (err {})\n", r["re"].as_str().unwrap_or(""), r["im"].as_str().unwrap_or(""), r["err"])
    };
    let csv = |v: &Value| {
        let r = &v["result"];
        format!("re,im,err\n{},{},{}\n", r["re"].as_str().unwrap_or(""), r["im"].as_str().unwrap_or(""), r["err"])
    };
    emit(&out, cfg.output, Some(&text), Some(&csv));
    Ok(())
}
