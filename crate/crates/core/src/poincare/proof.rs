use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::GridDomain;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Comparison {
    fn le(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + 1e-10 * (1.0 + rhs.abs()) }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MvtCheck {
    pub c_p: f64,
    pub cells: usize,
    pub violations: usize,
    /// Largest `||a−b|^p − |a|^p| / ((|a|^{p−1}+1)|b|)` seen on the field.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProofReport {
    pub p: f64,
    /// Exponent of the descriptive Sobolev step, `2p`.
    pub q: f64,
    pub estim0: Comparison,
    pub u_a: Comparison,
    pub estim1: Comparison,
    pub estim1_omega: Comparison,
    pub mvt: MvtCheck,
    pub estim2: Comparison,
    /// `∫_A|u|^p` against `1 − ‖u‖_q^p |Ω\A|^{(q−p)/q}`; reported only.
    pub estim3: Comparison,
    /// Every asserted check holds (the descriptive one excluded).
    pub all_hold: bool,
}

fn mvt_ratio(a: f64, b: f64, p: f64) -> f64 {
    ((a - b).abs().powf(p) - a.abs().powf(p)).abs() / ((a.abs().powf(p - 1.0) + 1.0) * b.abs())
}

/// Grid maximum of the mean-value ratio over `a ∈ [−a_max, a_max]` (`na`
/// points) and `b ∈ (−1, 1) \ {0}` (`nb` midpoints).
pub fn measure_mvt_constant(p: f64, a_max: f64, na: usize, nb: usize) -> f64 {
    let mut c: f64 = 0.0;
    for i in 0..na {
        let a = -a_max + 2.0 * a_max * i as f64 / (na.max(2) - 1) as f64;
        for j in 0..nb {
            let b = -1.0 + 2.0 * (j as f64 + 0.5) / nb as f64;
            if b != 0.0 {
                c = c.max(mvt_ratio(a, b, p));
            }
        }
    }
    c
}

#[derive(Debug, Clone, Serialize)]
pub struct MvtRow {
    pub p: f64,
    pub c_p: f64,
    /// `p·2^{p−1}` from the scalar mean-value theorem.
    pub bound: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MvtGridReport {
    pub rows: Vec<MvtRow>,
    pub holds: bool,
}

/// Brute-force scalar check of the mean-value inequality on an
/// `na × nb × ps.len()` grid with the measured constant per `p`.
pub fn mvt_grid(ps: &[f64], a_max: f64, na: usize, nb: usize) -> MvtGridReport {
    let rows: Vec<MvtRow> = ps
        .iter()
        .map(|&p| {
            let c_p = measure_mvt_constant(p, a_max, na, nb);
            let mut violations = 0;
            for i in 0..na {
                let a = -a_max + 2.0 * a_max * i as f64 / (na.max(2) - 1) as f64;
                for j in 0..nb {
                    let b = -1.0 + 2.0 * (j as f64 + 0.5) / nb as f64;
                    let lhs = ((a - b).abs().powf(p) - a.abs().powf(p)).abs();
                    if lhs > c_p * (a.abs().powf(p - 1.0) + 1.0) * b.abs() * (1.0 + 1e-12) {
                        violations += 1;
                    }
                }
            }
            MvtRow { p, c_p, bound: p * 2f64.powf(p - 1.0), violations }
        })
        .collect();
    let holds = rows.iter().all(|r| r.violations == 0 && r.c_p <= r.bound);
    MvtGridReport { rows, holds }
}

/// Evaluates both sides of the covering proof's estimates for an
/// admissible `u` (`∫u = 0`, `∫|u|^p = 1`) and a subset `A ⊆ Ω`.
pub fn verify_proof_estimates(d: &GridDomain, u: &ScalarField, a: &GridDomain, p: f64) -> Result<ProofReport> {
    if !(p > 1.0) {
        return Err(LabError::InvalidArgument(format!("exponent p = {p} must exceed 1")));
    }
    if u.domain() != d || a.spec() != d.spec() {
        return Err(LabError::Mismatch("u, A and the domain must share one grid".into()));
    }
    if a.is_empty() || !a.is_subset_of(d) {
        return Err(LabError::InvalidArgument("A must be a nonempty subset of the domain".into()));
    }
    let scale = u.max_abs().max(f64::MIN_POSITIVE);
    if u.mean().unwrap_or(0.0).abs() > 1e-9 * scale {
        return Err(LabError::InvalidArgument("u must have zero mean".into()));
    }
    let norm_p = u.lp_norm_pow(p);
    if (norm_p - 1.0).abs() > 1e-9 {
        return Err(LabError::InvalidArgument(format!("u must satisfy ∫|u|^p = 1, got {norm_p}")));
    }
    let vol = d.spec().cell_volume();
    let omega = d.measure();
    let a_meas = a.measure();
    let rest = omega - a_meas;
    let v = u.values();
    let cells: Vec<usize> = a.inside_cells().collect();
    let int_a = cells.iter().map(|&i| v[i]).sum::<f64>() * vol;
    let u_a = int_a / a_meas;
    let int_a_p = cells.iter().map(|&i| v[i].abs().powf(p)).sum::<f64>() * vol;
    let int_a_pm1 = cells.iter().map(|&i| v[i].abs().powf(p - 1.0)).sum::<f64>() * vol;

    let estim0 = Comparison::le(int_a.abs(), rest.powf((p - 1.0) / p) * norm_p.powf(1.0 / p));
    let u_a_cmp = Comparison::le(u_a.abs(), rest.powf((p - 1.0) / p) / a_meas);
    let estim1 = Comparison::le(int_a_pm1, int_a_p.powf((p - 1.0) / p) * a_meas.powf(1.0 / p));
    let estim1_omega = Comparison::le(int_a_pm1, omega.powf(1.0 / p));

    let c_p = measure_mvt_constant(p, u.max_abs().max(3.0), 100, 100);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    let mut diff = 0.0;
    for &i in &cells {
        let x = v[i];
        let lhs = ((x - u_a).abs().powf(p) - x.abs().powf(p)).abs();
        diff += (x - u_a).abs().powf(p) - x.abs().powf(p);
        let rhs = c_p * (x.abs().powf(p - 1.0) + 1.0) * u_a.abs();
        // Rounding in |x−u_A|^p − |x|^p when u_A is near zero.
        let slack = 1e-12 * (x.abs().powf(p) + 1.0);
        if lhs > rhs * (1.0 + 1e-12) + slack {
            violations += 1;
        }
        if u_a.abs() > 1e-9 {
            max_ratio = max_ratio.max(mvt_ratio(x, u_a, p));
        }
    }
    let mvt = MvtCheck { c_p, cells: cells.len(), violations, max_ratio };
    let estim2 = Comparison::le((diff * vol).abs(), c_p * u_a.abs() * (int_a_pm1 + a_meas));

    let q = 2.0 * p;
    let norm_q = u.lp_norm_pow(q).powf(1.0 / q);
    let lower = 1.0 - norm_q.powf(p) * rest.powf((q - p) / q);
    let estim3 = Comparison { lhs: int_a_p, rhs: lower, holds: Comparison::le(lower, int_a_p).holds };

    let all_hold =
        estim0.holds && u_a_cmp.holds && estim1.holds && estim1_omega.holds && mvt.violations == 0 && estim2.holds;
    Ok(ProofReport { p, q, estim0, u_a: u_a_cmp, estim1, estim1_omega, mvt, estim2, estim3, all_hold })
}
