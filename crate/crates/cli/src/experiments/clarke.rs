use super::Ctx;
use crate::config::Config;
use crate::output::{csv_bytes, Check, Outcome};
use anyhow::{bail, Result};
use poincare_lab::clarke::{critical_band_scan, ScanOptions};
use poincare_lab::generators::{make_lip_graph_domain, LipGraphSpec};
use serde::Serialize;
use serde_json::json;

#[derive(Serialize)]
struct BandRow<'a> {
    graph: &'a str,
    dim: usize,
    gamma: f64,
    h: f64,
    #[serde(rename = "M")]
    m: f64,
    delta: f64,
    worst_estimate: f64,
    c_theory: f64,
    tol: f64,
    band_cells: usize,
    skipped: usize,
    n_violations: usize,
}

pub fn clarke_band(cfg: &Config, ctx: &Ctx) -> Result<Outcome> {
    let graph = cfg.string("graph", "wedge");
    let ms = cfg.reals("ms", "0,0.5,1")?;
    let gamma = cfg.real("gamma", "1")?;
    let dim = cfg.count("dim", "2")?;
    let h = cfg.real("h", "1/128")?;
    let deltas = cfg.reals("deltas", "0.05")?;
    let opts = ScanOptions { rho_cells: cfg.real("rho_cells", "2")?, t_steps: cfg.count("t_steps", "3")? };
    cfg.reject_unused()?;

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &m in &ms {
        let s = match graph.as_str() {
            "flat" => LipGraphSpec::flat(dim, gamma)?,
            "wedge" if m == 0.0 => LipGraphSpec::flat(dim, gamma)?,
            "wedge" => LipGraphSpec::wedge(dim, m, gamma)?,
            "perturbed" => LipGraphSpec::perturbed(dim, m, gamma, ctx.seed)?,
            other => bail!("graph `{other}` is not flat, wedge or perturbed"),
        };
        let d = make_lip_graph_domain(&s, h)?;
        for &delta in &deltas {
            let rep = critical_band_scan(&s, &d, delta, &opts)?;
            checks.push(Check::new(
                format!("M={} delta={delta}", s.m),
                rep.holds(),
                format!(
                    "worst={:.4} bound={:.4} violations={}",
                    rep.worst_estimate,
                    rep.tol - rep.c_theory,
                    rep.violating_cells.len()
                ),
            ));
            rows.push(BandRow {
                graph: &graph,
                dim,
                gamma,
                h,
                m: s.m,
                delta,
                worst_estimate: rep.worst_estimate,
                c_theory: rep.c_theory,
                tol: rep.tol,
                band_cells: rep.band_cells,
                skipped: rep.skipped,
                n_violations: rep.violating_cells.len(),
            });
            reports.push(rep.to_json());
        }
    }
    let payload = json!({ "graph": graph, "h": h, "scans": serde_json::to_value(&reports)? });
    Ok(Outcome { csv: csv_bytes(&rows)?, payload, curves: Vec::new(), checks })
}
