use super::require_connected;
use crate::discrete::{cg_zero_mean, dot, norm, remove_mean, Stencil};
use crate::error::{LabError, Result};
use crate::grid::{GridDomain, Point};
use crate::stats::{loglog_fit, LinearFit};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AverageRatio {
    pub ratio: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// `sup ∫|u − u_E|² / ∫|∇u|²` (p = 2): power iteration on `L⁺ QᵀQ` with
/// `Q u = u − u_E`. With `E = Ω` this is the spectral constant.
pub fn sup_ratio_over_average(d: &GridDomain, e: &GridDomain) -> Result<AverageRatio> {
    if e.spec() != d.spec() {
        return Err(LabError::Mismatch("E lives on another grid".into()));
    }
    if e.is_empty() {
        return Err(LabError::InvalidArgument("E has zero measure".into()));
    }
    if !e.is_subset_of(d) {
        return Err(LabError::InvalidArgument("E is not contained in the domain".into()));
    }
    require_connected(d)?;
    let st = Stencil::new(Arc::new(d.clone()));
    let n = st.len();
    let in_e: Vec<bool> = st.cells().iter().map(|&c| e.is_inside(c)).collect();
    let n_e = in_e.iter().filter(|&&b| b).count() as f64;
    let recenter = |x: &[f64], out: &mut [f64]| {
        let m = x.iter().zip(&in_e).filter(|(_, &b)| b).map(|(v, _)| v).sum::<f64>() / n_e;
        for i in 0..n {
            out[i] = x[i] - m;
        }
    };
    let spec = d.spec();
    // The indicator of E breaks the symmetry a centered E shares with the
    // linear part; without it the iteration can stay in an invariant
    // subspace that misses the dominant mode.
    let mut x: Vec<f64> = st
        .cells()
        .iter()
        .zip(&in_e)
        .map(|(&c, &b)| {
            let p = spec.center(c);
            p[0] + 0.37 * p[1] + 0.19 * p[2] + if b { 1.0 } else { 0.0 }
        })
        .collect();
    remove_mean(&mut x);
    let diag = st.laplacian_diagonal();
    let apply = |v: &[f64], out: &mut [f64]| st.apply_laplacian(v, out);
    let (mut w, mut b, mut y, mut ly) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut ratio = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=2000 {
        // b = Qᵀ Q x
        recenter(&x, &mut w);
        let s = w.iter().sum::<f64>() / n_e;
        for i in 0..n {
            b[i] = w[i] - if in_e[i] { s } else { 0.0 };
        }
        remove_mean(&mut b);
        // Warm start: for an eigenvector the solve returns ratio·x.
        for i in 0..n {
            y[i] = ratio * x[i];
        }
        cg_zero_mean(apply, &diag, &b, &mut y, 1e-11, 50 * n + 1000)?;
        recenter(&y, &mut w);
        apply(&y, &mut ly);
        let new_ratio = dot(&w, &w) / dot(&y, &ly);
        residual = (new_ratio - ratio).abs() / new_ratio;
        ratio = new_ratio;
        let s = norm(&y);
        for i in 0..n {
            x[i] = y[i] / s;
        }
        if residual < 1e-10 {
            return Ok(AverageRatio { ratio, iterations: it, residual });
        }
    }
    Err(LabError::NotConverged { iterations: 2000, residual })
}

/// `|E| · log(1 + 1/|E|)^{(N−1)/N}`.
pub fn orlicz_char_bound(e_measure: f64, n: usize) -> Result<f64> {
    if !(e_measure > 0.0) {
        return Err(LabError::InvalidArgument(format!("measure {e_measure} must be positive")));
    }
    if n == 0 {
        return Err(LabError::InvalidArgument("dimension must be positive".into()));
    }
    let exponent = (n as f64 - 1.0) / n as f64;
    Ok(e_measure * (1.0 + 1.0 / e_measure).ln().powf(exponent))
}

#[derive(Debug, Clone, Serialize)]
pub struct AverageScalingReport {
    pub p: f64,
    pub n: usize,
    pub e_sizes: Vec<f64>,
    pub ratios: Vec<f64>,
    /// The law up to its constant: `|E|^{(p−N)/N}` or `log(1+1/|E|)^{N−1}`.
    pub predicted: Vec<f64>,
    pub predicted_exponent: Option<f64>,
    pub fit: LinearFit,
    /// `max/min` of `ratio / predicted` over the sweep.
    pub band: f64,
    /// Ratios never increase as `E` grows.
    pub monotone: bool,
}

/// Sweeps balls `E = B(center, ρ) ∩ Ω` for the given radii (p = 2).
pub fn average_scaling_balls(d: &GridDomain, center: &Point, radii: &[f64]) -> Result<AverageScalingReport> {
    let spec = d.spec();
    let n = spec.dim();
    let p = 2.0;
    let mut rows = Vec::new();
    for &rho in radii {
        let e = d.with_cells(d.inside_cells().filter(|&i| {
            let x = spec.center(i);
            (0..n).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>() < rho * rho
        }));
        let size = e.measure();
        let ratio = sup_ratio_over_average(d, &e)?.ratio;
        rows.push((size, ratio));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (e_sizes, ratios): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let nf = n as f64;
    let (predicted, predicted_exponent): (Vec<f64>, Option<f64>) = if nf > p {
        let k = (p - nf) / nf;
        (e_sizes.iter().map(|s| s.powf(k)).collect(), Some(k))
    } else if nf == p {
        (e_sizes.iter().map(|s| (1.0 + 1.0 / s).ln().powf(nf - 1.0)).collect(), None)
    } else {
        (vec![1.0; e_sizes.len()], Some(0.0))
    };
    let fit = loglog_fit(&e_sizes, &ratios)?;
    let q: Vec<f64> = ratios.iter().zip(&predicted).map(|(r, l)| r / l).collect();
    let band = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / q.iter().cloned().fold(f64::INFINITY, f64::min);
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    Ok(AverageScalingReport { p, n, e_sizes, ratios, predicted, predicted_exponent, fit, band, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_named, Params};
    use crate::poincare::estimate_constant_spectral;

    #[test]
    fn full_set_gives_the_poincare_constant() {
        let d = make_named("square", &Params::new(), 1.0 / 32.0).unwrap();
        let r = sup_ratio_over_average(&d, &d).unwrap();
        let c = estimate_constant_spectral(&d).unwrap().c;
        assert!((r.ratio - c).abs() < 1e-7 * c, "{} vs {c}", r.ratio);
    }

    #[test]
    fn smaller_sets_give_larger_ratios() {
        let d = make_named("square", &Params::new(), 1.0 / 32.0).unwrap();
        let rep = average_scaling_balls(&d, &[0.5, 0.5, 0.0], &[0.1, 0.2, 0.4]).unwrap();
        assert!(rep.monotone, "{:?}", rep.ratios);
        // A centered ball still sees the capacity-type mode.
        let c = estimate_constant_spectral(&d).unwrap().c;
        assert!(rep.ratios[0] > 1.5 * c, "{:?} vs {c}", rep.ratios);
        assert!(sup_ratio_over_average(&d, &GridDomain::empty(d.spec().clone())).is_err());
    }

    #[test]
    fn orlicz_values() {
        assert!((orlicz_char_bound(1.0, 2).unwrap() - 2f64.ln().sqrt()).abs() < 1e-12);
        assert_eq!(orlicz_char_bound(0.3, 1).unwrap(), 0.3);
        assert!(orlicz_char_bound(0.0, 2).is_err());
        let xs = [1e-6, 1e-4, 1e-2, 1.0];
        let b: Vec<f64> = xs.iter().map(|&x| orlicz_char_bound(x, 3).unwrap()).collect();
        assert!(b.windows(2).all(|w| w[0] < w[1]));
    }
}
