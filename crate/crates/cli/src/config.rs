use clap::{Args, ValueEnum};
use num_complex::Complex;
use qresurgence::qcore::{QBase, SurfacePoint};
use qresurgence::{Error, Mp, PrecisionContext};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Base q in (0,1); each command has its own default.
    #[arg(long, global = true, env = "QRES_Q")]
    pub q: Option<String>,
    /// Significant digits of the result.
    #[arg(long, global = true, env = "QRES_DIGITS")]
    pub digits: Option<u32>,
    /// Relative tolerance of quadratures.
    #[arg(long, global = true, env = "QRES_QUAD_TOL")]
    pub quad_tol: Option<f64>,
    /// Relative tolerance for truncating series.
    #[arg(long, global = true, env = "QRES_TAIL_TOL")]
    pub tail_tol: Option<f64>,
    /// Seed of the generator behind randomized suites.
    #[arg(long, global = true, env = "QRES_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub q: String,
    pub digits: u32,
    pub quad_tol: f64,
    pub tail_tol: f64,
    pub seed: u64,
    pub output: OutputFormat,
}

pub const DEFAULT_DIGITS: u32 = 40;
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

impl RunConfig {
    pub fn resolve(g: &GlobalOpts, q: &str, digits: u32, output: OutputFormat) -> Result<Self, CliError> {
        let digits = g.digits.unwrap_or(digits);
        let cfg = Self {
            q: g.q.clone().unwrap_or_else(|| q.to_string()),
            digits,
            quad_tol: g.quad_tol.unwrap_or(DEFAULT_QUAD_TOL),
            tail_tol: g.tail_tol.unwrap_or(10f64.powi(-(digits as i32))),
            seed: g.seed,
            output: g.output.unwrap_or(output),
        };
        cfg.ctx()?;
        cfg.qbase()?;
        Ok(cfg)
    }

    pub fn ctx(&self) -> Result<PrecisionContext, CliError> {
        Ok(PrecisionContext::new(self.digits, self.tail_tol, self.quad_tol)?)
    }

    pub fn qbase(&self) -> Result<QBase<Mp>, CliError> {
        Ok(QBase::parse(&self.q, &self.ctx()?)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "digits": self.digits,
            "quad_tol": self.quad_tol,
            "tail_tol": self.tail_tol,
            "seed": self.seed,
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Usage(String),
    /// Output was produced but flagged as ill-conditioned or degenerate.
    Flagged(String),
    /// Number of failed checks.
    Verify(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Lib(Error::Domain(_)) | CliError::Lib(Error::PoleProximity(_)) | CliError::Usage(_) => 2,
            CliError::Lib(_) | CliError::Flagged(_) => 3,
            CliError::Verify(_) => 1,
        }
    }

    pub fn message(&self) -> Option<String> {
        match self {
            CliError::Lib(e) => Some(e.to_string()),
            CliError::Usage(m) | CliError::Flagged(m) => Some(m.clone()),
            CliError::Verify(n) => Some(format!("{n} check(s) failed")),
        }
    }
}

/// `x` or `x,y` as a complex number at the working precision.
pub fn parse_complex(s: &str, ctx: &PrecisionContext) -> Result<Complex<Mp>, CliError> {
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next().unwrap_or("");
    let im = parts.next().unwrap_or("0");
    if parts.next().is_some() {
        return Err(CliError::Usage(format!("expected `re` or `re,im`, got {s:?}")));
    }
    Ok(Complex::new(ctx.parse::<Mp>(re)?, ctx.parse::<Mp>(im)?))
}

pub fn surface_point(modulus: &str, arg: &str, ctx: &PrecisionContext) -> Result<SurfacePoint<Mp>, CliError> {
    Ok(SurfacePoint::new(ctx.parse::<Mp>(modulus)?, ctx.parse::<Mp>(arg)?)?)
}

pub fn complex_json(c: &Complex<Mp>, digits: u32) -> Value {
    json!({"re": format!("{:.*}", digits as usize, c.re), "im": format!("{:.*}", digits as usize, c.im)})
}

/// Prints `value` as JSON, or through `text`/`csv` when given.
pub fn emit(
    value: &Value,
    format: OutputFormat,
    text: Option<&dyn Fn(&Value) -> String>,
    csv: Option<&dyn Fn(&Value) -> String>,
) {
    let s = match (format, text, csv) {
        (OutputFormat::Text, Some(f), _) => f(value),
        (OutputFormat::Csv, _, Some(f)) => f(value),
        (OutputFormat::Text, None, _) => flatten(value).into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect(),
        (OutputFormat::Csv, _, None) => {
            let mut s = String::from("key,value\n");
            for (k, v) in flatten(value) {
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
        (OutputFormat::Json, _, _) => serde_json::to_string_pretty(value).expect("value serializes") + "\n",
    };
    print!("{s}");
}

fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    go(&p, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    go(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}
