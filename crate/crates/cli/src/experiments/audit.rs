use super::{build, family_params, layer_deltas, Ctx};
use crate::config::Config;
use crate::output::{csv_bytes, Check, Curve, Outcome};
use crate::pool::map_ordered;
use anyhow::{bail, Result};
use poincare_lab::generators::{make_tube, ConeSpec, Params, TubeSeed};
use poincare_lab::hypotheses::{check_h1, check_h2, check_h3, check_tube_annulus, property_q_curve, HypothesisReport};
use serde::Serialize;
use serde_json::json;

#[derive(Serialize)]
struct AuditRow {
    family: String,
    h: f64,
    #[serde(rename = "R")]
    r: f64,
    h2_holds: bool,
    h2_fail_count: usize,
    h3_delta0: f64,
    h3_counts: String,
    q_slope: Option<f64>,
    q_r2: Option<f64>,
}

pub fn hypotheses_audit(cfg: &Config, ctx: &Ctx) -> Result<Outcome> {
    let families = cfg.strings("families", "square,ball,dumbbell");
    let h = cfg.real("h", "1/64")?;
    let directions = cfg.count("directions", "64")?;
    let aperture = cfg.real("cone_aperture", "pi/6")?;
    let height = cfg.real("cone_height", "0.2")?;
    let h3_deltas = cfg.reals("h3_deltas", "0.05,0.1,0.2")?;
    let q_steps = cfg.count("q_steps", "12")?;
    let mut jobs = Vec::new();
    for f in &families {
        let expect = cfg.raw(&format!("expect.{f}")).map(|_| cfg.string(&format!("expect.{f}"), ""));
        if let Some(e) = &expect {
            if e != "holds" && e != "fails" {
                bail!("expect.{f}: `{e}` is neither holds nor fails");
            }
        }
        jobs.push((f.clone(), family_params(cfg, f)?, expect));
    }
    cfg.reject_unused()?;

    let cone = ConeSpec::reference(aperture / 2.0, height)?;
    let q_deltas = layer_deltas(h, q_steps);
    let reports = map_ordered(&jobs, ctx.jobs, |(family, params, _): &(String, Params, Option<String>)| {
        let d = build(family, params, h)?;
        let r = check_h1(&d)?;
        let h2 = check_h2(&d, &cone, directions)?;
        let h3 = check_h3(&d, &h3_deltas)?;
        let q = property_q_curve(&d, &q_deltas)?;
        Ok(HypothesisReport::new(r, &h2, &h3, &q))
    })?;

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut checks = Vec::new();
    let mut payload = serde_json::Map::new();
    for ((family, _, expect), rep) in jobs.iter().zip(&reports) {
        let connected = rep.h3.counts.iter().all(|&c| c == 1);
        if let Some(e) = expect {
            // Cone condition and connected erosions together.
            let holds = rep.h2.holds && connected;
            checks.push(Check::new(
                format!("{family} hypotheses {e}"),
                holds == (e == "holds"),
                format!("h2 fails={} h3 counts={:?}", rep.h2.fail_count, rep.h3.counts),
            ));
        }
        rows.push(AuditRow {
            family: family.clone(),
            h,
            r: rep.h1.r,
            h2_holds: rep.h2.holds,
            h2_fail_count: rep.h2.fail_count,
            h3_delta0: rep.h3.delta0,
            h3_counts: rep.h3.counts.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"),
            q_slope: rep.q.slope,
            q_r2: rep.q.r2,
        });
        curves.push(Curve { name: format!("q_{family}"), points: rep.q.pairs.clone() });
        payload.insert(family.clone(), serde_json::to_value(rep)?);
    }
    Ok(Outcome { csv: csv_bytes(&rows)?, payload: payload.into(), curves, checks })
}

#[derive(Serialize)]
struct QRow<'a> {
    family: &'a str,
    h: f64,
    delta: f64,
    area: f64,
}

pub fn property_q(cfg: &Config, _ctx: &Ctx) -> Result<Outcome> {
    let family = cfg.string("family", "square");
    let params = family_params(cfg, &family)?;
    let h = cfg.real("h", "1/256")?;
    let q_steps = cfg.count("q_steps", "12")?;
    let expected = cfg.optional_real("expected_slope")?;
    let slope_tol = cfg.real("slope_tol", "0.05")?;
    let r2_min = cfg.real("r2_min", "0.99")?;
    cfg.reject_unused()?;

    let d = build(&family, &params, h)?;
    let curve = property_q_curve(&d, &layer_deltas(h, q_steps))?;
    let rows: Vec<QRow> = curve.pairs.iter().map(|&(delta, area)| QRow { family: &family, h, delta, area }).collect();
    let mut checks = Vec::new();
    match curve.fit {
        None => checks.push(Check::new("fit", false, format!("fewer than two deltas below {}", curve.fit_cap))),
        Some(fit) => {
            checks.push(Check::new("r2", fit.r2 >= r2_min, format!("R2={:.5} min {r2_min}", fit.r2)));
            if let Some(s) = expected {
                let rel = (fit.slope - s).abs() / s.abs();
                checks.push(Check::new(
                    "slope",
                    rel <= slope_tol,
                    format!("slope={:.4} expected {s} rel={rel:.4} tol {slope_tol}", fit.slope),
                ));
            }
        }
    }
    let payload = json!({
        "family": family,
        "h": h,
        "pairs": curve.pairs,
        "fit_cap": curve.fit_cap,
        "slope": curve.fit.map(|f| f.slope),
        "intercept": curve.fit.map(|f| f.intercept),
        "r2": curve.fit.map(|f| f.r2),
    });
    Ok(Outcome {
        csv: csv_bytes(&rows)?,
        payload,
        curves: vec![Curve { name: "q".into(), points: curve.pairs }],
        checks,
    })
}

#[derive(Serialize)]
struct TubeRow {
    seed: &'static str,
    r: f64,
    h: f64,
    delta: f64,
    inclusion_violations: usize,
    annulus_violations: usize,
    tolerated: usize,
    h2_fail_count: usize,
}

pub fn tube_family(cfg: &Config, ctx: &Ctx) -> Result<Outcome> {
    let seeds = cfg
        .strings("seeds", "point,segment,L")
        .iter()
        .map(|s| TubeSeed::parse(s))
        .collect::<poincare_lab::Result<Vec<_>>>()?;
    let r = cfg.real("r", "0.25")?;
    let deltas = cfg.reals("deltas", "0.05,0.1")?;
    let h = cfg.real("h", "1/128")?;
    let aperture = cfg.real("cone_aperture", "pi/3")?;
    let height_factor = cfg.real("cone_height_factor", "0.5")?;
    let directions = cfg.count("directions", "64")?;
    cfg.reject_unused()?;

    let cone = ConeSpec::reference(aperture / 2.0, height_factor * r)?;
    let per_seed = map_ordered(&seeds, ctx.jobs, |&seed| {
        let k = seed.rasterize(h, r)?;
        let annuli = deltas.iter().map(|&delta| check_tube_annulus(&k, r, delta)).collect::<Result<Vec<_>, _>>()?;
        let h2 = check_h2(&make_tube(&k, r)?, &cone, directions)?;
        Ok((annuli, h2.failing_cells.len()))
    })?;

    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (seed, (annuli, h2_fails)) in seeds.iter().zip(&per_seed) {
        for (&delta, a) in deltas.iter().zip(annuli) {
            checks.push(Check::new(
                format!("{} annulus delta={delta}", seed.name()),
                a.inclusion_holds && a.annulus_identity_holds,
                format!(
                    "inclusion viol={} annulus viol={} tolerated={}",
                    a.inclusion_violations, a.annulus_violations, a.tolerated
                ),
            ));
            rows.push(TubeRow {
                seed: seed.name(),
                r,
                h,
                delta,
                inclusion_violations: a.inclusion_violations,
                annulus_violations: a.annulus_violations,
                tolerated: a.tolerated,
                h2_fail_count: *h2_fails,
            });
        }
        checks.push(Check::new(format!("{} cone", seed.name()), *h2_fails == 0, format!("h2 fails={h2_fails}")));
    }
    let payload = json!({ "r": r, "h": h, "rows": serde_json::to_value(&rows)? });
    Ok(Outcome { csv: csv_bytes(&rows)?, payload, curves: Vec::new(), checks })
}
