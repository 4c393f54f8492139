mod common;

use common::dumbbell_energy;
use poincare_lab::discrete::field_gradient_energy;
use poincare_lab::generators::{dumbbell_resolution, make_dumbbell, make_named, make_u_eps, DumbbellSpec, Params};
use poincare_lab::morphology::erode;
use poincare_lab::poincare::{
    estimate_constant_spectral, estimate_constant_variational, rayleigh_quotient, sup_ratio_over_average,
    verify_proof_estimates, witness_estimate, VariationalOptions,
};
use poincare_lab::ScalarField;
use std::f64::consts::PI;
use std::sync::Arc;

#[test]
fn rectangle_constant_from_separation_of_variables() {
    let d = make_named("rectangle", &Params::new(), 1.0 / 64.0).unwrap();
    let est = estimate_constant_spectral(&d).unwrap();
    let oracle = 4.0 / (PI * PI);
    assert!((est.c - oracle).abs() < 0.02 * oracle, "{} vs {oracle}", est.c);
}

#[test]
fn witnesses_never_beat_the_spectral_constant() {
    let d = Arc::new(make_named("square", &Params::new(), 1.0 / 48.0).unwrap());
    let c = estimate_constant_spectral(&d).unwrap().c;
    let tests: [fn(f64, f64) -> f64; 3] = [|x, _| (PI * x).cos(), |x, y| x - y, |x, y| (x - 0.5).powi(3) + 0.1 * y];
    for f in tests {
        let u = ScalarField::from_fn(d.clone(), |p| f(p[0], p[1]));
        let w = witness_estimate(&u, 2.0).unwrap();
        assert!(w.c <= c * (1.0 + 1e-9), "{} > {c}", w.c);
    }
}

#[test]
fn variational_p2_agrees_with_spectral_on_a_rectangle() {
    let d = make_named("rectangle", &Params::new(), 1.0 / 24.0).unwrap();
    let s = estimate_constant_spectral(&d).unwrap();
    let v = estimate_constant_variational(&d, 2.0, &VariationalOptions { restarts: 2, seed: 11, ..Default::default() })
        .unwrap();
    assert!((v.c - s.c).abs() < 0.05 * s.c, "{} vs {}", v.c, s.c);
}

#[test]
fn variational_is_deterministic_per_seed() {
    let d = make_named("square", &Params::new(), 1.0 / 16.0).unwrap();
    let opts = VariationalOptions { restarts: 2, seed: 5, ..Default::default() };
    let a = estimate_constant_variational(&d, 3.0, &opts).unwrap();
    let b = estimate_constant_variational(&d, 3.0, &opts).unwrap();
    assert_eq!(a.c.to_bits(), b.c.to_bits());
}

#[test]
fn dumbbell_witness_energy() {
    for eps in [0.2, 0.1] {
        let h = dumbbell_resolution(eps, 1.0 / 64.0, 8);
        let omega = Arc::new(make_dumbbell(&DumbbellSpec::new(eps).unwrap(), h).unwrap());
        let u = make_u_eps(&omega, eps).unwrap();
        let energy = field_gradient_energy(&u, 2.0);
        let oracle = dumbbell_energy(eps);
        assert!((energy - oracle).abs() < 0.05 * oracle, "eps {eps}: {energy} vs {oracle}");
        assert!(u.integral().abs() <= 2.0 * h * omega.measure());
        let q = rayleigh_quotient(&u, 2.0).unwrap();
        assert!((q - u.lp_norm_pow(2.0) / energy).abs() < 1e-12 * q);
    }
}

#[test]
fn proof_estimates_hold_for_the_spectral_minimizer() {
    let d = make_named("square", &Params::new(), 1.0 / 32.0).unwrap();
    let est = estimate_constant_spectral(&d).unwrap();
    for delta in [0.05, 0.15] {
        let a = erode(&d, delta).unwrap();
        let rep = verify_proof_estimates(&d, &est.minimizer, &a, 2.0).unwrap();
        assert!(rep.all_hold, "{rep:?}");
        assert!(rep.mvt.c_p <= 2.0 * 2.0);
    }
}

#[test]
fn averaging_over_smaller_sets_costs_more() {
    let d = make_named("square", &Params::new(), 1.0 / 32.0).unwrap();
    let whole = sup_ratio_over_average(&d, &d).unwrap().ratio;
    // An off-center set: the symmetric core would leave the first mode's
    // mean at zero and the ratio unchanged.
    let corner = d.with_cells(d.inside_cells().filter(|&i| d.spec().center(i)[0] < 0.2).collect::<Vec<_>>());
    let part = sup_ratio_over_average(&d, &corner).unwrap().ratio;
    assert!(part > 1.01 * whole, "{part} vs {whole}");
}
