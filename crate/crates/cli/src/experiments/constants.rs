use super::{build, family_params, Ctx};
use crate::config::Config;
use crate::output::{csv_bytes, Check, Curve, Outcome};
use crate::pool::map_ordered;
use anyhow::{bail, Result};
use poincare_lab::discrete::field_gradient_energy;
use poincare_lab::generators::{dumbbell_resolution, make_dumbbell, make_u_eps, DumbbellSpec, Params};
use poincare_lab::poincare::{
    average_scaling_balls, estimate_constant_spectral_with, estimate_constant_variational, rayleigh_quotient,
    SpectralOptions, VariationalOptions,
};
use poincare_lab::stats::loglog_fit;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Serialize)]
struct SweepRow {
    family: String,
    h: f64,
    p: f64,
    method: &'static str,
    c: f64,
    residual: f64,
    iterations: usize,
    oracle: Option<f64>,
    rel_err: Option<f64>,
}

pub fn poincare_sweep(cfg: &Config, ctx: &Ctx) -> Result<Outcome> {
    let families = cfg.strings("families", "square,rectangle");
    let hs = cfg.reals("hs", "1/32,1/64")?;
    let ps = cfg.reals("ps", "2")?;
    let method = cfg.string("method", "auto");
    if !matches!(method.as_str(), "auto" | "spectral" | "variational") {
        bail!("method `{method}` is not auto, spectral or variational");
    }
    let restarts = cfg.count("restarts", "4")?;
    let tol = cfg.real("tol", "1e-7")?;
    let max_iter = cfg.count("max_iter", "2000")?;
    let oracle_tol = cfg.real("oracle_tol", "0.02")?;
    let mut params = BTreeMap::new();
    let mut oracles = BTreeMap::new();
    for f in &families {
        params.insert(f.clone(), family_params(cfg, f)?);
        oracles.insert(f.clone(), cfg.optional_real(&format!("oracle.{f}"))?);
    }
    cfg.reject_unused()?;

    let mut tasks = Vec::new();
    for f in &families {
        for &p in &ps {
            for &h in &hs {
                let spectral = match method.as_str() {
                    "spectral" => true,
                    "variational" => false,
                    _ => p == 2.0,
                };
                if spectral && p != 2.0 {
                    bail!("the spectral method needs p = 2, got {p}");
                }
                tasks.push((f.clone(), p, h, spectral));
            }
        }
    }
    let seed = ctx.seed;
    let estimates = map_ordered(&tasks, ctx.jobs, |(f, p, h, spectral): &(String, f64, f64, bool)| {
        let d = build(f, &params[f], *h)?;
        let est = if *spectral {
            estimate_constant_spectral_with(&d, &SpectralOptions::default())?
        } else {
            let opts = VariationalOptions { restarts, seed, max_iter, tol, ..Default::default() };
            estimate_constant_variational(&d, *p, &opts)?
        };
        Ok((est.c, est.residual, est.iterations, est.method.name()))
    })?;

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut curves: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((f, p, h, _), (c, residual, iterations, name)) in tasks.iter().zip(estimates) {
        // The oracles are p = 2 constants.
        let oracle = if *p == 2.0 { oracles[f] } else { None };
        let rel_err = oracle.map(|o| (c - o).abs() / o);
        if let (Some(o), Some(rel)) = (oracle, rel_err) {
            checks.push(Check::new(
                format!("{f} h={h} p={p}"),
                rel <= oracle_tol,
                format!("C={c:.6} oracle={o:.6} rel={rel:.2e} tol {oracle_tol}"),
            ));
        }
        curves.entry(format!("c_{f}_p{p}")).or_default().push((*h, c));
        rows.push(SweepRow { family: f.clone(), h: *h, p: *p, method: name, c, residual, iterations, oracle, rel_err });
    }
    let payload = json!({ "rows": serde_json::to_value(&rows)? });
    let curves = curves.into_iter().map(|(name, points)| Curve { name, points }).collect();
    Ok(Outcome { csv: csv_bytes(&rows)?, payload, curves, checks })
}

#[derive(Serialize)]
struct DumbbellRow {
    eps: f64,
    h: f64,
    cells: usize,
    energy: f64,
    energy_ref: f64,
    energy_rel: f64,
    c_lower: f64,
}

pub fn dumbbell_blowup(cfg: &Config, ctx: &Ctx) -> Result<Outcome> {
    let eps = cfg.reals("eps", "0.2,0.1,0.05,0.025")?;
    let h_max = cfg.real("h_max", "1/64")?;
    let min_cells = cfg.count("min_cells", "8")?;
    let energy_tol = cfg.real("energy_tol", "0.05")?;
    let min_growth = cfg.real("min_growth", "1.8")?;
    let slope_tol = cfg.real("slope_tol", "0.15")?;
    cfg.reject_unused()?;
    if eps.len() < 2 {
        bail!("eps needs at least two values");
    }

    let rows = map_ordered(&eps, ctx.jobs, |&e| {
        let h = dumbbell_resolution(e, h_max, min_cells);
        let omega = Arc::new(make_dumbbell(&DumbbellSpec::new(e)?, h)?);
        let u = make_u_eps(&omega, e)?;
        let energy = field_gradient_energy(&u, 2.0);
        // Closed form of the witness energy: |∇u| = 1/ε on the neck band.
        let energy_ref = 14.0 * std::f64::consts::PI * e / 3.0;
        Ok(DumbbellRow {
            eps: e,
            h,
            cells: omega.count_inside(),
            energy,
            energy_ref,
            energy_rel: (energy - energy_ref).abs() / energy_ref,
            c_lower: rayleigh_quotient(&u, 2.0)?,
        })
    })?;

    let mut checks = Vec::new();
    for r in &rows {
        checks.push(Check::new(
            format!("energy eps={}", r.eps),
            r.energy_rel <= energy_tol,
            format!("E={:.5} ref={:.5} rel={:.4} tol {energy_tol}", r.energy, r.energy_ref, r.energy_rel),
        ));
    }
    let mut sorted: Vec<&DumbbellRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let growth = sorted.windows(2).map(|w| w[1].c_lower / w[0].c_lower).fold(f64::INFINITY, f64::min);
    checks.push(Check::new("growth", growth >= min_growth, format!("min C ratio {growth:.3} min {min_growth}")));
    let xs: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let e_fit = loglog_fit(&xs, &rows.iter().map(|r| r.energy).collect::<Vec<_>>())?;
    let c_fit = loglog_fit(&xs, &rows.iter().map(|r| r.c_lower).collect::<Vec<_>>())?;
    checks.push(Check::new(
        "energy slope",
        (e_fit.slope - 1.0).abs() <= slope_tol,
        format!("{:.3} expected 1 tol {slope_tol}", e_fit.slope),
    ));
    checks.push(Check::new(
        "constant slope",
        (c_fit.slope + 1.0).abs() <= slope_tol,
        format!("{:.3} expected -1 tol {slope_tol}", c_fit.slope),
    ));
    let payload = json!({
        "rows": serde_json::to_value(&rows)?,
        "energy_fit": e_fit,
        "constant_fit": c_fit,
        "min_growth": growth,
    });
    let curves = vec![
        Curve { name: "energy".into(), points: rows.iter().map(|r| (r.eps, r.energy)).collect() },
        Curve { name: "constant".into(), points: rows.iter().map(|r| (r.eps, r.c_lower)).collect() },
    ];
    Ok(Outcome { csv: csv_bytes(&rows)?, payload, curves, checks })
}

#[derive(Serialize)]
struct AverageRow<'a> {
    family: &'a str,
    h: f64,
    e_measure: f64,
    ratio: f64,
    predicted: f64,
}

pub fn average_scaling(cfg: &Config, _ctx: &Ctx) -> Result<Outcome> {
    let family = cfg.string("family", "square");
    let params: Params = family_params(cfg, &family)?;
    let h = cfg.real("h", "1/128")?;
    let center = cfg.reals("center", "0.5,0.5")?;
    let radii = cfg.reals("radii", "0.025,0.045,0.08,0.15,0.3")?;
    let exponent_tol = cfg.real("exponent_tol", "0.15")?;
    let band_max = cfg.real("band_max", "2")?;
    let min_range = cfg.real("min_range", "100")?;
    cfg.reject_unused()?;

    let d = build(&family, &params, h)?;
    if center.len() != d.spec().dim() {
        bail!("center has {} coordinates for a {}D domain", center.len(), d.spec().dim());
    }
    let mut c = [0.0; 3];
    c[..center.len()].copy_from_slice(&center);
    let rep = average_scaling_balls(&d, &c, &radii)?;
    let range = rep.e_sizes.last().copied().unwrap_or(0.0) / rep.e_sizes.first().copied().unwrap_or(1.0);
    let mut checks = vec![Check::new("range", range >= min_range, format!("|E| spans {range:.1}x min {min_range}"))];
    match rep.predicted_exponent {
        Some(k) => checks.push(Check::new(
            "exponent",
            (rep.fit.slope - k).abs() <= exponent_tol,
            format!("{:.3} expected {k:.3} tol {exponent_tol}", rep.fit.slope),
        )),
        None => checks.push(Check::new(
            "band",
            rep.band <= band_max,
            format!("ratio/law band {:.3} max {band_max}", rep.band),
        )),
    }
    let rows: Vec<AverageRow> = (0..rep.e_sizes.len())
        .map(|i| AverageRow {
            family: &family,
            h,
            e_measure: rep.e_sizes[i],
            ratio: rep.ratios[i],
            predicted: rep.predicted[i],
        })
        .collect();
    let curves = vec![Curve {
        name: "ratio".into(),
        points: rep.e_sizes.iter().cloned().zip(rep.ratios.iter().cloned()).collect(),
    }];
    Ok(Outcome { csv: csv_bytes(&rows)?, payload: serde_json::to_value(&rep)?, curves, checks })
}
