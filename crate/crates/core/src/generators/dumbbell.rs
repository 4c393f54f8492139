//! Two opposed unit cones overlapping in a neck of half-height `eps`:
//! `(-eps e_3 + C) ∪ (eps e_3 - C)` with `C = {0 < x_3 < 1, |x̂| < x_3}`.
//!
//! The grid is symmetric about the origin with a cell center at 0 on every
//! axis, and coordinates are formed as `k·h` for integer `k`, so the
//! reflection `x_3 -> -x_3` maps cell centers to cell centers exactly.

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::{GridDomain, GridSpec};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumbbellSpec {
    pub eps: f64,
}

impl DumbbellSpec {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(LabError::InvalidArgument(format!("neck half-height {eps} not in (0,1)")));
        }
        Ok(Self { eps })
    }

    /// Analytic membership of a point.
    pub fn contains(&self, x: f64, y: f64, z: f64) -> bool {
        let e = self.eps;
        let r = (x * x + y * y).sqrt();
        (z > -e && z < 1.0 - e && r < z + e) || (z < e && z > e - 1.0 && r < e - z)
    }
}

/// Coarsest spacing no coarser than `h_max` that puts the band edges `±eps`
/// on cell centers with at least `min_cells` cells across the half-neck.
pub fn dumbbell_resolution(eps: f64, h_max: f64, min_cells: usize) -> f64 {
    let cells = (eps / h_max - 1e-9).ceil().max(min_cells as f64);
    eps / cells
}

fn half_counts(eps: f64, h: f64) -> [usize; 3] {
    let lateral = (1.0 / h).ceil() as usize + 2;
    let vertical = ((1.0 - eps) / h).ceil() as usize + 2;
    [lateral, lateral, vertical]
}

/// The lattice used for `make_dumbbell(eps, h)`.
pub fn dumbbell_grid(eps: f64, h: f64) -> Result<GridSpec> {
    let n = half_counts(eps, h);
    let origin: Vec<f64> = n.iter().map(|&k| -(k as f64 + 0.5) * h).collect();
    let extents: Vec<usize> = n.iter().map(|&k| 2 * k + 1).collect();
    GridSpec::new(3, &origin, h, &extents)
}

fn symmetric_coords(spec: &GridSpec, half: [usize; 3], idx: usize) -> [f64; 3] {
    let c = spec.coords(idx);
    let h = spec.h();
    [(c[0] as f64 - half[0] as f64) * h, (c[1] as f64 - half[1] as f64) * h, (c[2] as f64 - half[2] as f64) * h]
}

pub fn make_dumbbell(s: &DumbbellSpec, h: f64) -> Result<GridDomain> {
    let limit = s.eps / 4.0;
    if h > limit * (1.0 + 1e-12) {
        return Err(LabError::NeckUnderResolved { h, limit });
    }
    let spec = dumbbell_grid(s.eps, h)?;
    let half = half_counts(s.eps, h);
    let inside = (0..spec.num_cells())
        .map(|i| {
            let [x, y, z] = symmetric_coords(&spec, half, i);
            s.contains(x, y, z)
        })
        .collect();
    GridDomain::new(spec, inside)
}

/// The odd test function: -1 below the neck, `z/eps` across it, 1 above.
pub fn make_u_eps(omega: &Arc<GridDomain>, eps: f64) -> Result<ScalarField> {
    let spec = omega.spec();
    let expected = dumbbell_grid(eps, spec.h())?;
    if *spec != expected {
        return Err(LabError::Mismatch(format!("domain is not a dumbbell grid for eps = {eps}")));
    }
    let half = half_counts(eps, spec.h());
    let values = (0..spec.num_cells())
        .map(|i| {
            if !omega.is_inside(i) {
                return 0.0;
            }
            let z = symmetric_coords(spec, half, i)[2];
            (z / eps).clamp(-1.0, 1.0)
        })
        .collect();
    ScalarField::new(omega.clone(), values)
}
