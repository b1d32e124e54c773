use clap::{Args, ValueEnum};
use qresurgence::coeffs::qp1_d_numeric;
use qresurgence::stokes::{k_closed, k_closed_ratio, k_extract, riccati_multiplier_check, transseries_equations, transseries_solve};
use qresurgence::ComplexExt;
use serde_json::{json, Value};

use crate::config::{complex_json, emit, CliError, GlobalOpts, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Multipliers K_j of the order-one q-Painlevé series.
    Qp1,
    /// Deviation ratios of the Riccati-type coefficient families.
    Riccati,
}

#[derive(Args, Debug)]
pub struct StokesArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Exact transseries solution instead of a numeric fit.
    #[arg(long)]
    pub symbolic: bool,
    #[arg(long, default_value_t = 2)]
    pub jmax: usize,
    /// First index of the fit (or of the Riccati table).
    #[arg(long)]
    pub n_lo: Option<usize>,
    #[arg(long)]
    pub n_hi: Option<usize>,
}

/// Largest `j` with a closed form to compare against.
const CLOSED_MAX: usize = 4;

pub fn run(a: &StokesArgs, g: &GlobalOpts) -> Result<(), CliError> {
    match (a.kind, a.symbolic) {
        (Kind::Qp1, false) => numeric(a, g),
        (Kind::Qp1, true) => symbolic(a, g),
        (Kind::Riccati, _) => riccati(a, g),
    }
}

fn numeric(a: &StokesArgs, g: &GlobalOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(g, "0.7", 80, OutputFormat::Json)?;
    let ctx = cfg.ctx()?;
    let q = cfg.qbase()?;
    let (lo, hi) = (a.n_lo.unwrap_or(40), a.n_hi.unwrap_or(60));
    let d = qp1_d_numeric(hi, &q.q);
    let set = k_extract(&d, &q.q, a.jmax, lo..=hi)?;
    let k = set.numeric().expect("numeric fit");
    let mut table = Vec::new();
    for (j, kj) in k.iter().enumerate().take(CLOSED_MAX + 1) {
        let closed = k_closed(j, &q, &ctx)?;
        let rel = 10f64.powf((kj.clone() - closed.clone()).log10_abs() - closed.log10_abs());
        table.push(json!({"j": j, "fitted": complex_json(kj, cfg.digits), "closed": complex_json(&closed, cfg.digits), "rel_diff": rel}));
    }
    let out = json!({
        "config": cfg.to_json(),
        "n_range": [lo, hi],
        "multipliers": set.to_json(cfg.digits as usize),
        "comparison": table,
    });
    let text = |v: &Value| {
        let mut s = format!("jmax = {}, n in [{lo}, {hi}], residual {}\n", a.jmax, v["multipliers"]["residual"]);
        s.push_str("j  fitted  closed  rel_diff\n");
        for row in v["comparison"].as_array().into_iter().flatten() {
            s.push_str(&format!(
                "{}  {}  {}  {:e}\n",
                row["j"],
                row["fitted"]["re"].as_str().unwrap_or(""),
                row["closed"]["re"].as_str().unwrap_or(""),
                row["rel_diff"].as_f64().unwrap_or(f64::NAN)
            ));
        }
        s
    };
    emit(&out, cfg.output, Some(&text), None);
    match set.warning {
        Some(w) => Err(CliError::Flagged(w)),
        None => Ok(()),
    }
}

fn symbolic(a: &StokesArgs, g: &GlobalOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(g, "0.7", crate::config::DEFAULT_DIGITS, OutputFormat::Json)?;
    let rows = transseries_equations(a.jmax, a.jmax + 2)?;
    let set = transseries_solve(a.jmax)?;
    let ratios = set.ratios().expect("symbolic solve");
    let equations: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(m, row)| {
            let terms: Vec<String> = row.iter().enumerate().map(|(k, p)| format!("({p}) K{k}")).collect();
            json!({"order": m + 1, "equation": format!("{} = 0", terms.join(" + "))})
        })
        .collect();
    let mut checks = Vec::new();
    for (j, r) in ratios.iter().enumerate().skip(1).take(CLOSED_MAX) {
        let closed = k_closed_ratio(j)?;
        checks.push(json!({"j": j, "ratio": r.to_string(), "matches_closed_form": *r == closed}));
    }
    let out = json!({
        "config": cfg.to_json(),
        "equations": equations,
        "multipliers": set.to_json(cfg.digits as usize),
        "closed_forms": checks,
    });
    let text = |v: &Value| {
        let mut s = String::new();
        for e in v["equations"].as_array().into_iter().flatten() {
            s.push_str(e["equation"].as_str().unwrap_or(""));
            s.push('\n');
        }
        for c in v["closed_forms"].as_array().into_iter().flatten() {
            s.push_str(&format!("K{}/K0 = {}  [closed form match: {}]\n", c["j"], c["ratio"].as_str().unwrap_or(""), c["matches_closed_form"]));
        }
        s
    };
    emit(&out, cfg.output, Some(&text), None);
    Ok(())
}

fn riccati(a: &StokesArgs, g: &GlobalOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(g, "0.5", 60, OutputFormat::Json)?;
    let ctx = cfg.ctx()?;
    let q = cfg.qbase()?;
    let (lo, hi) = (a.n_lo.unwrap_or(20), a.n_hi.unwrap_or(30));
    let rep = riccati_multiplier_check(&q, lo..=hi, &ctx)?;
    let out = json!({
        "config": cfg.to_json(),
        "n": rep.n,
        "f_dev": rep.f_dev,
        "c_dev": rep.c_dev,
        "f_ratios": rep.f_ratios,
        "c_ratios": rep.c_ratios,
        "base_exact": rep.base_exact,
    });
    let csv = |v: &Value| {
        let mut s = String::from("n,f_dev,c_dev,f_ratio,c_ratio\n");
        let col = |k: &str, i: usize| v[k].get(i).map(|x| x.to_string()).unwrap_or_default();
        for (i, n) in v["n"].as_array().into_iter().flatten().enumerate() {
            let r = |k: &str| if i == 0 { String::new() } else { col(k, i - 1) };
            s.push_str(&format!("{n},{},{},{},{}\n", col("f_dev", i), col("c_dev", i), r("f_ratios"), r("c_ratios")));
        }
        s
    };
    emit(&out, cfg.output, None, Some(&csv));
    Ok(())
}
