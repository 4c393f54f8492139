//! Signed distance to the boundary, sampled upper approximations of its
//! generalized directional derivatives, the band scan on graph domains and a
//! component-count stand-in for homotopy equivalence.

use crate::edt::{exact_distance_transform, DistanceField};
use crate::error::{LabError, Result};
use crate::generators::LipGraphSpec;
use crate::grid::GridDomain;
use crate::morphology::{component_count, erode};
use serde::Serialize;

/// `Γ = d(x, ∂Ω)` inside and `−d(x, ∂Ω)` outside. Center-to-center distances
/// are shifted by half a cell so the zero level sits on the cell faces.
pub fn signed_interface_field(d: &GridDomain) -> Result<DistanceField> {
    let raw = exact_distance_transform(d, true)?;
    let half = 0.5 * d.spec().h();
    let values = raw.values().iter().map(|&v| if v > 0.0 { v - half } else { v + half }).collect();
    DistanceField::from_values(d.spec().clone(), values, true)
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionalDerivativeEstimate {
    pub point: usize,
    pub direction: Vec<f64>,
    /// Max of the sampled difference quotients at scale `(rho, t_steps·h)`.
    pub estimate: f64,
    pub samples_used: usize,
}

/// `max (Γ(y + t v) − Γ(y)) / t` over cell centers `y` with `|y − x| ≤ rho`
/// and `t ∈ {h, 2h, …, t_steps·h}`; off-lattice values are multilinear.
pub fn directional_derivative(
    gamma: &DistanceField,
    x: usize,
    v: &[f64],
    rho: f64,
    t_steps: usize,
) -> Result<DirectionalDerivativeEstimate> {
    let spec = gamma.spec();
    let dim = spec.dim();
    let h = spec.h();
    if !gamma.is_signed() {
        return Err(LabError::InvalidArgument("directional derivatives need the signed field".into()));
    }
    if x >= spec.num_cells() {
        return Err(LabError::InvalidArgument(format!("cell {x} is not on the grid")));
    }
    if v.len() != dim || (v.iter().map(|a| a * a).sum::<f64>().sqrt() - 1.0).abs() > 1e-9 {
        return Err(LabError::InvalidArgument(format!("direction {v:?} is not a unit vector in {dim}D")));
    }
    if !(rho >= 2.0 * h * (1.0 - 1e-12)) || t_steps < 3 {
        return Err(LabError::InvalidArgument(format!("need rho >= 2h and t_steps >= 3, got {rho}, {t_steps}")));
    }
    let reach = (rho / h + 1e-9).floor() as isize;
    let base = spec.coords(x);
    let ext = spec.extents();
    let mut estimate = f64::NEG_INFINITY;
    let mut samples = 0;
    let mut off = [0isize; 3];
    let span = (2 * reach + 1) as usize;
    for k in 0..span.pow(dim as u32) {
        let mut rem = k;
        for o in off.iter_mut().take(dim) {
            *o = (rem % span) as isize - reach;
            rem /= span;
        }
        let r2: isize = off[..dim].iter().map(|o| o * o).sum();
        if (r2 as f64).sqrt() * h > rho * (1.0 + 1e-12) {
            continue;
        }
        let mut c = [0usize; 3];
        for a in 0..dim {
            let ca = base[a] as isize + off[a];
            if ca < 0 || ca >= ext[a] as isize {
                return Err(LabError::InsufficientMargin);
            }
            c[a] = ca as usize;
        }
        let y = spec.center(spec.index(c));
        let gy = gamma.value(spec.index(c));
        for s in 1..=t_steps {
            let t = s as f64 * h;
            let mut p = y;
            for a in 0..dim {
                p[a] += t * v[a];
            }
            let gp = gamma.interpolate(&p[..dim]).ok_or(LabError::InsufficientMargin)?;
            estimate = estimate.max((gp - gy) / t);
            samples += 1;
        }
    }
    Ok(DirectionalDerivativeEstimate { point: x, direction: v.to_vec(), estimate, samples_used: samples })
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Neighborhood radius in cells.
    pub rho_cells: f64,
    pub t_steps: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { rho_cells: 2.0, t_steps: 3 }
    }
}

/// Per-cell minimum over the tested directions.
#[derive(Debug, Clone, Serialize)]
pub struct CellEstimate {
    pub cell: usize,
    pub gamma: f64,
    pub min_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandEstimates {
    pub cells: Vec<CellEstimate>,
    /// Band cells whose samples would leave the grid.
    pub skipped: usize,
}

/// Estimates on every inside cell with `dist(c, complement) ≤ delta`, the
/// minimum taken over `directions`.
pub fn band_estimates(
    d: &GridDomain,
    delta: f64,
    directions: &[Vec<f64>],
    opts: &ScanOptions,
) -> Result<BandEstimates> {
    if directions.is_empty() {
        return Err(LabError::InvalidArgument("no directions to test".into()));
    }
    let gamma = signed_interface_field(d)?;
    let kept = erode(d, delta)?;
    let rho = opts.rho_cells * d.spec().h();
    let mut cells = Vec::new();
    let mut skipped = 0;
    'cells: for c in d.inside_cells().filter(|&c| !kept.is_inside(c)) {
        let mut best = f64::INFINITY;
        for v in directions {
            match directional_derivative(&gamma, c, v, rho, opts.t_steps) {
                Ok(e) => best = best.min(e.estimate),
                Err(LabError::InsufficientMargin) => {
                    skipped += 1;
                    continue 'cells;
                }
                Err(e) => return Err(e),
            }
        }
        cells.push(CellEstimate { cell: c, gamma: gamma.value(c), min_estimate: best });
    }
    Ok(BandEstimates { cells, skipped })
}

#[derive(Debug, Clone, Serialize)]
pub struct BandScanReport {
    pub delta: f64,
    pub m: f64,
    pub c_theory: f64,
    pub tol: f64,
    pub worst_estimate: f64,
    pub band_cells: usize,
    pub skipped: usize,
    /// Sorted cell indices with estimate above `−c_theory + tol`.
    pub violating_cells: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandScanJson {
    pub delta: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub c_theory: f64,
    pub worst_estimate: f64,
    pub n_violations: usize,
    pub violator_cells: Vec<usize>,
}

impl BandScanReport {
    pub fn holds(&self) -> bool {
        self.violating_cells.is_empty() && self.band_cells > 0
    }

    pub fn to_json(&self) -> BandScanJson {
        BandScanJson {
            delta: self.delta,
            m: self.m,
            c_theory: self.c_theory,
            worst_estimate: self.worst_estimate,
            n_violations: self.violating_cells.len(),
            violator_cells: self.violating_cells.clone(),
        }
    }
}

/// Scans the band of a graph domain along `v = −e_N` and checks
/// `estimate ≤ −1/√(1+M²) + 0.1 + 4h/δ` on every cell.
pub fn critical_band_scan(s: &LipGraphSpec, d: &GridDomain, delta: f64, opts: &ScanOptions) -> Result<BandScanReport> {
    if !s.m.is_finite() {
        return Err(LabError::InvalidArgument("unknown Lipschitz constant".into()));
    }
    let spec = d.spec();
    let h = spec.h();
    if spec.dim() != s.dim {
        return Err(LabError::Mismatch(format!("{}D graph on a {}D grid", s.dim, spec.dim())));
    }
    let cap = s.delta0_proxy();
    if !(delta >= 2.0 * h) || delta > cap * (1.0 + 1e-12) {
        return Err(LabError::InvalidArgument(format!("band width {delta} outside [2h, {cap}]")));
    }
    let mut down = vec![0.0; s.dim];
    down[s.dim - 1] = -1.0;
    let est = band_estimates(d, delta, &[down], opts)?;
    let c_theory = 1.0 / (1.0 + s.m * s.m).sqrt();
    let tol = 0.1 + 4.0 * h / delta;
    let bound = -c_theory + tol;
    let worst_estimate = est.cells.iter().map(|c| c.min_estimate).fold(f64::NEG_INFINITY, f64::max);
    let mut violating_cells: Vec<usize> = est.cells.iter().filter(|c| c.min_estimate > bound).map(|c| c.cell).collect();
    violating_cells.sort_unstable();
    Ok(BandScanReport {
        delta,
        m: s.m,
        c_theory,
        tol,
        worst_estimate,
        band_cells: est.cells.len(),
        skipped: est.skipped,
        violating_cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomotopyRow {
    pub delta: f64,
    pub components: usize,
    pub eroded_components: usize,
    pub equal: bool,
}

/// Component counts of `Ω` and `erode(Ω, δ)` per `δ`.
pub fn homotopy_surrogate(d: &GridDomain, deltas: &[f64]) -> Result<Vec<HomotopyRow>> {
    let h = d.spec().h();
    if let Some(bad) = deltas.iter().find(|&&x| !(x == 0.0 || x >= 2.0 * h * (1.0 - 1e-12))) {
        return Err(LabError::InvalidArgument(format!("delta {bad} is neither 0 nor >= 2h")));
    }
    let components = component_count(d);
    deltas
        .iter()
        .map(|&delta| {
            let eroded_components = if delta == 0.0 { components } else { component_count(&erode(d, delta)?) };
            Ok(HomotopyRow { delta, components, eroded_components, equal: components == eroded_components })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_dumbbell, make_lip_graph_domain, DumbbellSpec};
    use crate::grid::GridSpec;

    fn halfplane(h: f64) -> GridDomain {
        let spec = GridSpec::face_aligned(&[-0.5, -0.5], &[0.5, 0.5], h, 0).unwrap();
        GridDomain::from_fn(spec, |p| p[1] > 0.0)
    }

    #[test]
    fn interface_field_is_exact_on_a_halfplane() {
        let h = 1.0 / 32.0;
        let d = halfplane(h);
        let g = signed_interface_field(&d).unwrap();
        for i in 0..d.spec().num_cells() {
            let y = d.spec().center(i)[1];
            assert!((g.value(i) - y).abs() < 1e-12, "{} vs {y}", g.value(i));
        }
    }

    #[test]
    fn halfplane_derivatives() {
        let h = 1.0 / 32.0;
        let d = halfplane(h);
        let g = signed_interface_field(&d).unwrap();
        let x = d.spec().locate(&[0.01, 0.1]).unwrap();
        let down = directional_derivative(&g, x, &[0.0, -1.0], 2.0 * h, 3).unwrap();
        assert!((down.estimate + 1.0).abs() < 0.05, "{}", down.estimate);
        let up = directional_derivative(&g, x, &[0.0, 1.0], 2.0 * h, 3).unwrap();
        assert!((up.estimate - 1.0).abs() < 0.05, "{}", up.estimate);
        assert_eq!(up.samples_used, 13 * 3);
    }

    #[test]
    fn larger_scales_never_lower_the_estimate() {
        let s = LipGraphSpec::wedge(2, 1.0, 1.0).unwrap();
        let h = 1.0 / 32.0;
        let d = make_lip_graph_domain(&s, h).unwrap();
        let g = signed_interface_field(&d).unwrap();
        let v = [0.6, -0.8];
        for x in [d.spec().locate(&[0.1, 0.3]).unwrap(), d.spec().locate(&[-0.3, 0.4]).unwrap()] {
            let base = directional_derivative(&g, x, &v, 2.0 * h, 3).unwrap().estimate;
            let wide = directional_derivative(&g, x, &v, 4.0 * h, 3).unwrap().estimate;
            let long = directional_derivative(&g, x, &v, 2.0 * h, 6).unwrap().estimate;
            assert!(wide >= base && long >= base);
            assert!(base.abs() <= 1.05 && wide.abs() <= 1.05 && long.abs() <= 1.05);
        }
    }

    #[test]
    fn bad_arguments() {
        let h = 1.0 / 16.0;
        let d = halfplane(h);
        let g = signed_interface_field(&d).unwrap();
        let x = d.spec().locate(&[0.01, 0.1]).unwrap();
        assert!(directional_derivative(&g, x, &[0.0, 2.0], 2.0 * h, 3).is_err());
        assert!(directional_derivative(&g, x, &[0.0, 1.0], h, 3).is_err());
        assert!(directional_derivative(&g, x, &[0.0, 1.0], 2.0 * h, 2).is_err());
        let corner = d.spec().locate(&[0.49, 0.49]).unwrap();
        assert_eq!(
            directional_derivative(&g, corner, &[0.0, 1.0], 2.0 * h, 3).unwrap_err(),
            LabError::InsufficientMargin
        );
    }

    #[test]
    fn flat_and_wedge_bands() {
        let h = 1.0 / 64.0;
        for m in [0.0, 1.0] {
            let s = if m == 0.0 { LipGraphSpec::flat(2, 1.0) } else { LipGraphSpec::wedge(2, m, 1.0) }.unwrap();
            let d = make_lip_graph_domain(&s, h).unwrap();
            let rep = critical_band_scan(&s, &d, 0.2, &ScanOptions::default()).unwrap();
            assert!(rep.holds(), "M = {m}: worst {} vs {}", rep.worst_estimate, -rep.c_theory + rep.tol);
            assert!(rep.band_cells > 100);
        }
    }

    #[test]
    fn band_width_is_capped() {
        let s = LipGraphSpec::wedge(2, 1.0, 1.0).unwrap();
        let d = make_lip_graph_domain(&s, 1.0 / 32.0).unwrap();
        assert!(critical_band_scan(&s, &d, 0.5, &ScanOptions::default()).is_err());
        assert!(critical_band_scan(&s, &d, 1.0 / 64.0, &ScanOptions::default()).is_err());
    }

    #[test]
    fn json_fields() {
        let s = LipGraphSpec::flat(2, 1.0).unwrap();
        let d = make_lip_graph_domain(&s, 1.0 / 32.0).unwrap();
        let rep = critical_band_scan(&s, &d, 0.125, &ScanOptions::default()).unwrap();
        let v = serde_json::to_value(rep.to_json()).unwrap();
        for k in ["delta", "M", "c_theory", "worst_estimate", "n_violations", "violator_cells"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["c_theory"], 1.0);
    }

    #[test]
    fn dumbbell_neck_is_near_critical() {
        let eps = 0.1;
        let d = make_dumbbell(&DumbbellSpec::new(eps).unwrap(), eps / 4.0).unwrap();
        let dirs = vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]];
        let est = band_estimates(&d, 2.0 * eps, &dirs, &ScanOptions::default()).unwrap();
        let waist: Vec<&CellEstimate> = est
            .cells
            .iter()
            .filter(|c| {
                let p = d.spec().center(c.cell);
                p[2].abs() < 1e-9 && p[0].hypot(p[1]) < 0.5 * eps
            })
            .collect();
        assert!(!waist.is_empty());
        assert!(
            waist.iter().any(|c| c.min_estimate > -0.1),
            "{:?}",
            waist.iter().map(|c| c.min_estimate).collect::<Vec<_>>()
        );
    }

    #[test]
    fn homotopy_counts() {
        let s = LipGraphSpec::wedge(2, 1.0, 1.0).unwrap();
        let h = 1.0 / 64.0;
        let d = make_lip_graph_domain(&s, h).unwrap();
        let rows = homotopy_surrogate(&d, &[0.0, 2.0 * h, 0.1, 0.25]).unwrap();
        assert!(rows.iter().all(|r| r.equal && r.components == 1));
        let eps = 0.1;
        let db = make_dumbbell(&DumbbellSpec::new(eps).unwrap(), eps / 4.0).unwrap();
        let rows = homotopy_surrogate(&db, &[0.2]).unwrap();
        assert_eq!((rows[0].components, rows[0].eroded_components, rows[0].equal), (1, 2, false));
        assert!(homotopy_surrogate(&d, &[h]).is_err());
    }
}
