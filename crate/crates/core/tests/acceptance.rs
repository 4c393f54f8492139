//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use common::{
    brute_force_edt, dumbbell_energy, random_indicator, random_indicator_3d, same_partition, slope_r2,
    square_frame_area, union_find_count, union_find_labels,
};
use poincare_lab::clarke::{critical_band_scan, ScanOptions};
use poincare_lab::discrete::field_gradient_energy;
use poincare_lab::edt::exact_distance_transform;
use poincare_lab::generators::{
    dumbbell_resolution, make_dumbbell, make_lip_graph_domain, make_lip_patch_domain, make_named, make_tube,
    make_u_eps, ConeSpec, DumbbellSpec, LipGraphSpec, Params, TubeSeed,
};
use poincare_lab::hypotheses::{audit, check_h2, check_h3, check_tube_annulus, property_q_curve};
use poincare_lab::morphology::connected_components;
use poincare_lab::poincare::{average_scaling_balls, estimate_constant_spectral, mvt_grid, rayleigh_quotient};
use poincare_lab::rng::named_stream;
use poincare_lab::Result;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

const SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn spectral_ground_truth() -> Result<Outcome> {
    let h = 1.0 / 256.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, oracle) in [("square", 1.0 / (PI * PI)), ("rectangle", 4.0 / (PI * PI))] {
        let d = make_named(name, &Params::new(), h)?;
        let t = Instant::now();
        let est = estimate_constant_spectral(&d)?;
        let secs = t.elapsed().as_secs_f64();
        let rel = (est.c - oracle).abs() / oracle;
        pass &= rel <= 0.02 && secs <= 60.0;
        parts.push(format!("{name} C={:.6} oracle={oracle:.6} rel={rel:.2e} {secs:.1}s", est.c));
    }
    outcome(pass, parts.join("; "))
}

fn dumbbell_blowup() -> Result<Outcome> {
    let mut energies = Vec::new();
    let mut constants = Vec::new();
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in SWEEP {
        let h = dumbbell_resolution(eps, 1.0 / 64.0, 8);
        let omega = Arc::new(make_dumbbell(&DumbbellSpec::new(eps)?, h)?);
        let u = make_u_eps(&omega, eps)?;
        let energy = field_gradient_energy(&u, 2.0);
        let c = rayleigh_quotient(&u, 2.0)?;
        let oracle = dumbbell_energy(eps);
        let rel = (energy - oracle).abs() / oracle;
        pass &= rel <= 0.05;
        parts.push(format!("eps={eps} h={h:.5} E={energy:.5} ({rel:.3}) C={c:.3}"));
        energies.push(energy);
        constants.push(c);
    }
    let growth = constants.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    let lx: Vec<f64> = SWEEP.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = energies.iter().map(|e| e.ln()).collect();
    let (slope, _) = slope_r2(&lx, &ly);
    pass &= growth >= 1.8 && (slope - 1.0).abs() <= 0.15;
    parts.push(format!("min growth {growth:.3}, energy slope {slope:.3}"));
    outcome(pass, parts.join("; "))
}

fn dumbbell_means_and_limit() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in SWEEP.iter().copied().chain([0.0125]) {
        let h = if eps == 0.0125 { 1.0 / 320.0 } else { dumbbell_resolution(eps, 1.0 / 64.0, 8) };
        let omega = Arc::new(make_dumbbell(&DumbbellSpec::new(eps)?, h)?);
        let u = make_u_eps(&omega, eps)?;
        let mean_ok = u.integral().abs() <= 2.0 * h * omega.measure();
        pass &= mean_ok;
        if eps == 0.0125 {
            let l2 = u.lp_norm_pow(2.0);
            let target = 2.0 * PI / 3.0;
            let rel = (l2 - target).abs() / target;
            pass &= rel <= 0.05;
            parts.push(format!("eps=0.0125 h=1/320 int u^2={l2:.4} vs {target:.4} ({rel:.3})"));
        }
        parts.push(format!("eps={eps} |int u|={:.1e}{}", u.integral().abs(), if mean_ok { "" } else { " TOO LARGE" }));
    }
    outcome(pass, parts.join("; "))
}

fn property_q() -> Result<Outcome> {
    let h = 1.0 / 256.0;
    let d = make_named("square", &Params::new(), h)?;
    let deltas: Vec<f64> = (0..=12).map(|k| k as f64 * h).collect();
    let curve = property_q_curve(&d, &deltas)?;
    let fit = curve.fit.expect("square fit");
    let square_ok = (fit.slope - 4.0).abs() <= 0.2 && fit.r2 >= 0.99;
    // Cross-check the measured layer against the closed-form frame.
    let oracle_ok = curve.pairs.iter().all(|&(delta, area)| {
        let rows = (delta / h + 1e-9).floor();
        (area - square_frame_area(rows * h)).abs() < 1e-12
    });

    let hw = 1.0 / 128.0;
    let s = LipGraphSpec::wedge(2, 1.0, 1.0)?;
    let w = make_lip_graph_domain(&s, hw)?;
    let wd: Vec<f64> = (1..=6).map(|k| 2.0 * k as f64 * hw).collect();
    let wc = property_q_curve(&w, &wd)?;
    let mut worst: f64 = 0.0;
    let mut wedge_ok = true;
    for &(delta, area) in &wc.pairs {
        let bound = s.gamma.powi(s.dim as i32 - 1) * s.m * delta * (1.0 + 10.0 * hw);
        worst = worst.max(area / bound);
        wedge_ok &= area <= bound;
    }
    outcome(
        square_ok && oracle_ok && wedge_ok,
        format!(
            "square slope={:.4} R2={:.5} frame oracle {}; wedge layer/bound max={worst:.3} ({})",
            fit.slope,
            fit.r2,
            if oracle_ok { "exact" } else { "MISMATCH" },
            if wedge_ok { "within" } else { "EXCEEDS bound" }
        ),
    )
}

fn h3_discrimination() -> Result<Outcome> {
    let h = 1.0 / 128.0;
    let deltas: Vec<f64> = (1..=10).map(|k| 0.02 * k as f64).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["square", "ball", "ball_minus_segment"] {
        let d = make_named(name, &Params::new(), h)?;
        let rep = check_h3(&d, &deltas)?;
        let ok = rep.counts.iter().all(|&c| c == 1);
        pass &= ok;
        parts.push(format!("{name} counts={:?}", rep.counts));
    }
    for eps in SWEEP {
        let d = make_dumbbell(&DumbbellSpec::new(eps)?, dumbbell_resolution(eps, 1.0 / 64.0, 4))?;
        let rep = check_h3(&d, &[2.0 * eps])?;
        pass &= rep.counts[0] == 2;
        parts.push(format!("dumbbell eps={eps} components at 2eps={}", rep.counts[0]));
    }
    outcome(pass, parts.join("; "))
}

fn tube_identities() -> Result<Outcome> {
    let h = 1.0 / 128.0;
    let r = 0.25;
    let cone = ConeSpec::reference(PI / 6.0, r / 2.0)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in [TubeSeed::Point, TubeSeed::Segment, TubeSeed::LPolyline] {
        let k = seed.rasterize(h, r)?;
        for delta in [0.05, 0.1] {
            let rep = check_tube_annulus(&k, r, delta)?;
            pass &= rep.inclusion_holds && rep.annulus_identity_holds;
            parts.push(format!(
                "{} d={delta} viol={}/{}",
                seed.name(),
                rep.inclusion_violations,
                rep.annulus_violations
            ));
        }
        let h2 = check_h2(&make_tube(&k, r)?, &cone, 64)?;
        pass &= h2.holds;
        parts.push(format!("{} h2 fails={}", seed.name(), h2.failing_cells.len()));
    }
    outcome(pass, parts.join("; "))
}

fn average_scaling() -> Result<Outcome> {
    // Small balls only: the power law is the small-|E| asymptote.
    let cube = make_named("cube", &Params::new(), 1.0 / 64.0)?;
    let radii3 = [0.04, 0.06, 0.09, 0.13, 0.19];
    let r3 = average_scaling_balls(&cube, &[0.5, 0.5, 0.5], &radii3)?;
    let exp_ok = (r3.fit.slope + 1.0 / 3.0).abs() <= 0.15;

    let square = make_named("square", &Params::new(), 1.0 / 128.0)?;
    let radii2 = [0.025, 0.045, 0.08, 0.15, 0.3];
    let r2 = average_scaling_balls(&square, &[0.5, 0.5, 0.0], &radii2)?;
    let range = r2.e_sizes.last().unwrap() / r2.e_sizes[0];
    let band_ok = r2.band <= 2.0 && range >= 100.0;
    outcome(
        exp_ok && band_ok,
        format!(
            "3D exponent={:.3} (R2 {:.3}); 2D ratio/log band={:.3} over |E| range {range:.0}x",
            r3.fit.slope, r3.fit.r2, r2.band
        ),
    )
}

fn clarke_band() -> Result<Outcome> {
    let h = 1.0 / 128.0;
    let delta = 0.05;
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [0.0, 0.5, 1.0] {
        let s = if m == 0.0 { LipGraphSpec::flat(2, 1.0)? } else { LipGraphSpec::wedge(2, m, 1.0)? };
        let d = make_lip_graph_domain(&s, h)?;
        let rep = critical_band_scan(&s, &d, delta, &ScanOptions::default())?;
        pass &= rep.holds();
        parts.push(format!(
            "M={m} worst={:.3} bound={:.3} violations={}",
            rep.worst_estimate,
            -rep.c_theory + rep.tol,
            rep.violating_cells.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn oracle_suites() -> Result<Outcome> {
    let mut rng = named_stream(2024, "acceptance-oracles", 0);
    let mut edt_grids = 0;
    let mut edt_ok = true;
    for n in [4usize, 8, 16, 32, 48, 64] {
        for fill in [0.1, 0.5, 0.9] {
            let d = random_indicator(&mut rng, n, fill);
            if d.count_inside() == 0 || d.count_inside() == d.spec().num_cells() {
                continue;
            }
            let fast = exact_distance_transform(&d, false)?;
            edt_ok &= fast.values().iter().zip(brute_force_edt(&d)).all(|(a, b)| (a - b).abs() <= 1e-12);
            edt_grids += 1;
        }
    }
    for n in [4usize, 8, 12, 16] {
        for fill in [0.2, 0.7] {
            let d = random_indicator_3d(&mut rng, n, fill);
            let fast = exact_distance_transform(&d, false)?;
            edt_ok &= fast.values().iter().zip(brute_force_edt(&d)).all(|(a, b)| (a - b).abs() <= 1e-12);
            edt_grids += 1;
        }
    }
    let mut cc_ok = true;
    for k in 0..200 {
        let fill = 0.3 + 0.4 * (k as f64 / 199.0);
        let d = random_indicator(&mut rng, 32, fill);
        let ours = connected_components(&d);
        cc_ok &= ours.count == union_find_count(&d) && same_partition(&ours.labels, &union_find_labels(&d));
    }
    let mvt = mvt_grid(&[1.5, 2.0, 2.5, 3.0, 4.0], 3.0, 100, 100);
    let c_ps: Vec<String> = mvt.rows.iter().map(|r| format!("{}:{:.3}", r.p, r.c_p)).collect();
    outcome(
        edt_ok && cc_ok && mvt.holds,
        format!(
            "EDT exact on {edt_grids} grids: {edt_ok}; flood fill = union-find on 200 grids: {cc_ok}; mvt C_p [{}]: {}",
            c_ps.join(" "),
            mvt.holds
        ),
    )
}

fn uniformity_echo() -> Result<Outcome> {
    let h = 1.0 / 128.0;
    let cone = ConeSpec::reference(PI / 12.0, 0.05)?;
    let mut constants = Vec::new();
    let mut audits_ok = true;
    for seed in 0..10 {
        let s = LipGraphSpec::perturbed(2, 1.0, 1.0, seed)?;
        let d = make_lip_patch_domain(&s, h)?;
        let delta0 = s.delta0_proxy();
        let h3: Vec<f64> = (1..=5).map(|k| k as f64 * delta0 / 5.0).collect();
        let q: Vec<f64> = (0..=8).map(|k| k as f64 * h).collect();
        let rep = audit(&d, &cone, 32, &h3, &q)?;
        audits_ok &= rep.h2.holds && rep.h3.delta0 == delta0 && rep.q.slope.is_some();
        constants.push(estimate_constant_spectral(&d)?.c);
    }
    let max = constants.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        audits_ok && max / min <= 3.0,
        format!("audits pass: {audits_ok}; C in [{min:.4}, {max:.4}], ratio {:.3}", max / min),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("spectral ground truth", spectral_ground_truth),
        ("dumbbell blow-up", dumbbell_blowup),
        ("dumbbell mean and limit", dumbbell_means_and_limit),
        ("boundary layer linearity", property_q),
        ("connected erosions", h3_discrimination),
        ("tube identities", tube_identities),
        ("average scaling", average_scaling),
        ("critical band", clarke_band),
        ("oracle suites", oracle_suites),
        ("uniformity echo", uniformity_echo),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
