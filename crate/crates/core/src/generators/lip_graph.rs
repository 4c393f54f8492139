//! Single-patch uniform Lipschitz domains: the epigraph `{y_N > phi(ŷ)}`
//! inside the box `O_x = (-gamma, gamma)^{N-1} × (-H, H)`.
//!
//! The grid covers the box exactly and the epigraph runs into the grid's
//! side and top faces, which are therefore not boundary: distances measure
//! only the graph. `make_lip_patch_domain` closes the box by padding it
//! with outside cells.

use crate::error::{LabError, Result};
use crate::grid::{GridDomain, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::Arc;

pub type GraphFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct LipGraphSpec {
    pub dim: usize,
    /// Declared Lipschitz constant.
    pub m: f64,
    /// Patch half-width.
    pub gamma: f64,
    pub phi: GraphFn,
}

impl fmt::Debug for LipGraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipGraphSpec")
            .field("dim", &self.dim)
            .field("m", &self.m)
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}

impl LipGraphSpec {
    pub fn new(dim: usize, m: f64, gamma: f64, phi: GraphFn) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(LabError::InvalidArgument(format!("dimension {dim} not in {{2,3}}")));
        }
        if !(m >= 0.0) || !(gamma > 0.0) {
            return Err(LabError::InvalidArgument(format!("need M >= 0 and gamma > 0, got {m}, {gamma}")));
        }
        Ok(Self { dim, m, gamma, phi })
    }

    /// `phi = 0`.
    pub fn flat(dim: usize, gamma: f64) -> Result<Self> {
        Self::new(dim, 0.0, gamma, Arc::new(|_| 0.0))
    }

    /// `phi = M |ŷ|`, a wedge (cone in 3D) of slope `M`.
    pub fn wedge(dim: usize, m: f64, gamma: f64) -> Result<Self> {
        Self::new(dim, m, gamma, Arc::new(move |x: &[f64]| m * x.iter().map(|v| v * v).sum::<f64>().sqrt()))
    }

    /// Triangle wave of the given slope and period in the first coordinate,
    /// declared with constant `m` (which may be a lie).
    pub fn sawtooth(dim: usize, m: f64, gamma: f64, slope: f64, period: f64) -> Result<Self> {
        Self::new(
            dim,
            m,
            gamma,
            Arc::new(move |x: &[f64]| {
                let t = (x[0] / period).rem_euclid(1.0);
                slope * period * (0.5 - (t - 0.5).abs())
            }),
        )
    }

    /// Random smooth graph with Lipschitz constant at most `0.9 m`: a sum of
    /// three sine modes per horizontal axis with seeded amplitudes.
    pub fn perturbed(dim: usize, m: f64, gamma: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axes = dim - 1;
        let mut modes = Vec::new();
        for a in 0..axes {
            for k in 1..=3 {
                let omega = std::f64::consts::PI * k as f64 / gamma;
                let weight: f64 = rng.gen_range(0.2..1.0);
                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                modes.push((a, omega, weight, phase));
            }
        }
        // Slope bound: sum of |a_k omega_k| over all modes.
        let raw: f64 = modes.iter().map(|(_, w, a, _)| w * a).sum();
        let scale = 0.9 * m / raw;
        let modes: Vec<_> = modes.into_iter().map(|(a, w, amp, ph)| (a, w, amp * scale, ph)).collect();
        Self::new(
            dim,
            m,
            gamma,
            Arc::new(move |x: &[f64]| modes.iter().map(|&(a, w, amp, ph)| amp * (w * x[a] + ph).sin()).sum()),
        )
    }

    /// Half-height of the patch box, `gamma·sqrt(N-1)·max(M, 1)`.
    pub fn vertical_half_height(&self) -> f64 {
        self.gamma * ((self.dim - 1) as f64).sqrt() * self.m.max(1.0)
    }

    /// Band width below which the graph's patch controls the whole band.
    pub fn delta0_proxy(&self) -> f64 {
        (self.gamma / 4.0).min(self.vertical_half_height() / 4.0)
    }
}

pub fn lip_graph_grid(s: &LipGraphSpec, h: f64) -> Result<GridSpec> {
    let mut origin = Vec::with_capacity(s.dim);
    let mut extents = Vec::with_capacity(s.dim);
    for _ in 0..s.dim - 1 {
        let n = (2.0 * s.gamma / h - 1e-9).ceil() as usize;
        origin.push(-(n as f64) * h / 2.0);
        extents.push(n);
    }
    let top = s.vertical_half_height();
    let n = (2.0 * top / h - 1e-9).ceil() as usize;
    origin.push(-(n as f64) * h / 2.0);
    extents.push(n);
    GridSpec::new(s.dim, &origin, h, &extents)
}

/// Rasterizes the epigraph after checking the sampled Lipschitz bound
/// `|phi(x) - phi(y)| <= M |x - y| + h` and that the graph fits the box.
pub fn make_lip_graph_domain(s: &LipGraphSpec, h: f64) -> Result<GridDomain> {
    let spec = lip_graph_grid(s, h)?;
    let ext = spec.extents().to_vec();
    let base = &ext[..s.dim - 1];
    let (n0, n1) = (base[0], if s.dim == 3 { base[1] } else { 1 });
    let coord = |a: usize, i: usize| spec.origin()[a] + (i as f64 + 0.5) * h;
    let mut samples = vec![0.0; n0 * n1];
    for i in 0..n0 {
        for j in 0..n1 {
            let x = if s.dim == 3 { vec![coord(0, i), coord(1, j)] } else { vec![coord(0, i)] };
            samples[i * n1 + j] = (s.phi)(&x);
        }
    }
    check_lipschitz(&samples, n0, n1, h, s.m)?;
    let top = s.vertical_half_height();
    if let Some(v) = samples.iter().find(|v| v.abs() >= top) {
        return Err(LabError::InvalidArgument(format!("graph value {v} leaves the patch box (|y| < {top})")));
    }
    let vertical = s.dim - 1;
    let inside = (0..spec.num_cells())
        .map(|idx| {
            let c = spec.coords(idx);
            let j = if s.dim == 3 { c[1] } else { 0 };
            let y = coord(vertical, c[vertical]);
            y > samples[c[0] * n1 + j]
        })
        .collect();
    GridDomain::new(spec, inside)
}

/// The bounded domain `{phi < y_N < H} ∩ box`, padded with outside cells.
pub fn make_lip_patch_domain(s: &LipGraphSpec, h: f64) -> Result<GridDomain> {
    Ok(make_lip_graph_domain(s, h)?.padded(2))
}

fn check_lipschitz(samples: &[f64], n0: usize, n1: usize, h: f64, m: f64) -> Result<()> {
    let total = n0 * n1;
    let window: isize = if total <= 4096 { isize::MAX } else { 4 };
    let mut worst: Option<f64> = None;
    for i in 0..n0 as isize {
        for j in 0..n1 as isize {
            let a = samples[(i as usize) * n1 + j as usize];
            let i_hi = (n0 as isize - 1).min(i.saturating_add(window));
            for k in i..=i_hi {
                let j_lo = if k == i { j + 1 } else { (j - window.min(n1 as isize)).max(0) };
                let j_hi = (n1 as isize - 1).min(j.saturating_add(window));
                for l in j_lo..=j_hi {
                    let b = samples[(k as usize) * n1 + l as usize];
                    let dist = h * (((k - i) * (k - i) + (l - j) * (l - j)) as f64).sqrt();
                    if (a - b).abs() > m * dist + h {
                        let slope = (a - b).abs() / dist;
                        worst = Some(worst.map_or(slope, |w: f64| w.max(slope)));
                    }
                }
            }
        }
    }
    match worst {
        Some(slope) => Err(LabError::NotLipschitz { slope, m }),
        None => Ok(()),
    }
}
