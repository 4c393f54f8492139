//! Poincaré constants: quotients of single test functions, the p = 2
//! spectral route, general-p ascent, averages over subsets and the
//! intermediate estimates of the covering proof.

mod averages;
mod proof;
mod spectral;
mod variational;

pub use averages::{
    average_scaling_balls, orlicz_char_bound, sup_ratio_over_average, AverageRatio, AverageScalingReport,
};
pub use proof::{measure_mvt_constant, mvt_grid, verify_proof_estimates, Comparison, MvtGridReport, ProofReport};
pub use spectral::{estimate_constant_spectral, estimate_constant_spectral_with, SpectralOptions};
pub use variational::{estimate_constant_variational, VariationalOptions};

use crate::discrete::field_gradient_energy;
use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::GridDomain;
use crate::morphology::component_count;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Variational,
    Witness,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Variational => "variational",
            Method::Witness => "witness",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PoincareEstimate {
    pub p: f64,
    pub c: f64,
    pub method: Method,
    pub residual: f64,
    pub iterations: usize,
    /// Zero mean, `∫|u|^p = 1`.
    pub minimizer: ScalarField,
}

/// `u - mean(u)` on the inside cells.
pub fn project_zero_mean(u: &ScalarField) -> ScalarField {
    match u.mean() {
        Some(m) => u.map(|v| v - m),
        None => u.clone(),
    }
}

/// `∫|u|^p / ∫|∇u|^p` with the one-sided cell gradient.
pub fn rayleigh_quotient(u: &ScalarField, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(LabError::InvalidArgument(format!("exponent p = {p} must exceed 1")));
    }
    let energy = field_gradient_energy(u, p);
    if !(energy > 0.0) {
        return Err(LabError::ConstantFunction);
    }
    Ok(u.lp_norm_pow(p) / energy)
}

/// The quotient of one admissible function, packaged as a lower bound.
pub fn witness_estimate(u: &ScalarField, p: f64) -> Result<PoincareEstimate> {
    let c = rayleigh_quotient(u, p)?;
    let scale = u.lp_norm_pow(p).powf(-1.0 / p);
    Ok(PoincareEstimate { p, c, method: Method::Witness, residual: 0.0, iterations: 0, minimizer: u.scaled(scale) })
}

pub(crate) fn require_connected(d: &GridDomain) -> Result<()> {
    if d.is_empty() {
        return Err(LabError::InvalidArgument("empty domain".into()));
    }
    let components = component_count(d);
    if components != 1 {
        return Err(LabError::Disconnected { components });
    }
    Ok(())
}

/// Rescales compact values so that `∫|v|^p = 1`.
pub(crate) fn normalize_lp(v: &mut [f64], p: f64, vol: f64) {
    let n = v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * vol;
    if n > 0.0 {
        let s = n.powf(-1.0 / p);
        v.iter_mut().for_each(|x| *x *= s);
    }
}
