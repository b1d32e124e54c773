use clap::Args;
use num_complex::Complex;
use qresurgence::explorer::{alpha_fit_pole, lattice, solve_regular};
use qresurgence::{Mp, Real};
use serde_json::{json, Value};

use crate::config::{emit, CliError, GlobalOpts, OutputFormat, RunConfig};

#[derive(Args, Debug)]
pub struct PolesArgs {
    /// Padé order L = M.
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    /// Order of the companion approximant used for the stability test.
    #[arg(long)]
    pub companion: Option<usize>,
    /// Cube-root branch of e₀.
    #[arg(long, default_value_t = 0)]
    pub branch: u8,
    /// Poles are reported in |z| ≤ radius, zeros and fixed points in 1.5·radius.
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    /// Also fit the local exponent at the nearest pole.
    #[arg(long)]
    pub alpha: bool,
}

pub fn run(a: &PolesArgs, g: &GlobalOpts) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(g, "0.7", 80, OutputFormat::Csv)?;
    let ctx = cfg.ctx()?;
    let q = cfg.qbase()?;
    let m = a.order;
    let mc = a.companion.unwrap_or(m.saturating_sub(4));
    if mc == 0 || mc >= m {
        return Err(CliError::Usage(format!("companion order must lie in [1, {m})")));
    }
    let main = solve_regular(a.branch, &q, 2 * m, m, m, &ctx)?;
    let comp = solve_regular(a.branch, &q, 2 * mc, mc, mc, &ctx)?;
    let degenerate = main.approx.degenerate || comp.approx.degenerate;
    let rep = lattice(&main.approx, &comp.approx, &q, a.radius)?;
    let mut out = json!({
        "config": cfg.to_json(),
        "order": m,
        "companion_order": mc,
        "branch": a.branch,
        "radius": a.radius,
        "empirical_radius": main.empirical_radius,
        "lattice": serde_json::from_str::<Value>(&rep.to_json()).expect("lattice is JSON"),
    });
    if let Some(w) = main.warning.as_ref().or(comp.warning.as_ref()) {
        out["warning"] = json!(w);
    }
    if a.alpha {
        if let Some(p) = rep.nearest_pole() {
            let b = ctx.bits();
            let zp = Complex::new(Mp::new(b, p.x), Mp::new(b, p.y));
            let fit = alpha_fit_pole(&main.approx, &zp)?;
            out["alpha"] = json!({
                "re": fit.alpha.re.to_f64(),
                "im": fit.alpha.im.to_f64(),
                "residual": fit.residual,
                "quality_ok": fit.quality_ok,
            });
        }
    }
    let csv = |_: &Value| rep.to_csv();
    emit(&out, cfg.output, None, Some(&csv));
    if degenerate {
        return Err(CliError::Flagged("Padé system is degenerate".into()));
    }
    Ok(())
}
