//! Executable versions of the geometric hypotheses: bounded size (h1),
//! interior cone condition (h2), connected erosions (h3), the boundary-layer
//! property (Q), the generalized condition (f3) and the tube set identities.
//!
//! Cone apertures in reports are full opening angles; `ConeSpec` stores
//! the half-aperture.

use crate::edt::{distance_to_complement, distance_to_set};
use crate::error::{LabError, Result};
use crate::generators::ConeSpec;
use crate::grid::{GridDomain, Point};
use crate::morphology::{connected_components, dilate, erode};
use crate::stats::{linear_fit, LinearFit};
use serde::Serialize;
use std::f64::consts::PI;

/// `max |center| + h/2` over inside cells.
pub fn check_h1(d: &GridDomain) -> Result<f64> {
    if d.is_empty() {
        return Err(LabError::InvalidArgument("(h1) of an empty domain".into()));
    }
    let spec = d.spec();
    let r = d
        .inside_cells()
        .map(|i| {
            let c = spec.center(i);
            (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
        })
        .fold(0.0f64, f64::max);
    Ok(r + spec.h() / 2.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Report {
    pub holds: bool,
    pub cone: ConeSpec,
    /// Boundary cells with no admissible orientation.
    pub failing_cells: Vec<usize>,
    pub boundary_cells: usize,
    pub directions: usize,
}

struct ConeSamples {
    /// `(s, l0, l1)`: axial distance and lateral coordinates, far end first.
    offsets: Vec<[f64; 3]>,
}

impl ConeSamples {
    fn new(cone: &ConeSpec, dim: usize, pitch: f64) -> Self {
        let slope = cone.half_aperture.tan();
        let mut offsets = Vec::new();
        let mut k = 1usize;
        while (k as f64) * pitch < cone.height {
            let s = k as f64 * pitch;
            let reach = slope * s;
            if dim == 2 {
                let mut j = 0i64;
                while (j as f64) * pitch < reach {
                    let l = j as f64 * pitch;
                    offsets.push([s, l, 0.0]);
                    if j > 0 {
                        offsets.push([s, -l, 0.0]);
                    }
                    j += 1;
                }
            } else {
                offsets.push([s, 0.0, 0.0]);
                let mut j = 1usize;
                while (j as f64) * pitch < reach {
                    let rho = j as f64 * pitch;
                    let m = ((2.0 * PI * rho / pitch).ceil() as usize).max(6);
                    for i in 0..m {
                        let phi = 2.0 * PI * i as f64 / m as f64;
                        offsets.push([s, rho * phi.cos(), rho * phi.sin()]);
                    }
                    j += 1;
                }
            }
            k += 1;
        }
        offsets.reverse();
        Self { offsets }
    }

    fn fits(&self, d: &GridDomain, apex: &Point, axis: &Point) -> bool {
        let dim = d.spec().dim();
        let (u, w) = perpendicular_frame(axis, dim);
        self.offsets.iter().all(|o| {
            let p = [
                apex[0] + o[0] * axis[0] + o[1] * u[0] + o[2] * w[0],
                apex[1] + o[0] * axis[1] + o[1] * u[1] + o[2] * w[1],
                apex[2] + o[0] * axis[2] + o[1] * u[2] + o[2] * w[2],
            ];
            d.contains_point(&p[..dim])
        })
    }
}

fn normalize(v: Point) -> Option<Point> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Two unit vectors completing `axis` to an orthonormal frame. In 2D the
/// second is zero.
fn perpendicular_frame(axis: &Point, dim: usize) -> (Point, Point) {
    if dim == 2 {
        return ([-axis[1], axis[0], 0.0], [0.0; 3]);
    }
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = normalize(cross(axis, &helper)).expect("axis is a unit vector");
    let w = cross(axis, &u);
    (u, w)
}

/// `count` roughly uniform unit vectors: equally spaced angles in 2D, a
/// Fibonacci sphere in 3D.
pub fn uniform_directions(dim: usize, count: usize) -> Vec<Point> {
    let count = count.max(1);
    if dim == 2 {
        return (0..count)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / count as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Directions within 45° of `n`, closest first.
fn fan_around(n: &Point, dim: usize) -> Vec<Point> {
    let step = 3f64.to_radians();
    let mut out = vec![*n];
    if dim == 2 {
        let base = n[1].atan2(n[0]);
        for k in 1..=15 {
            for sign in [1.0, -1.0] {
                let t = base + sign * k as f64 * step;
                out.push([t.cos(), t.sin(), 0.0]);
            }
        }
        return out;
    }
    let (u, w) = perpendicular_frame(n, 3);
    for k in 1..=15 {
        let polar = k as f64 * step;
        let m = ((2.0 * PI * polar.sin() / step).round() as usize).max(4);
        for i in 0..m {
            let phi = 2.0 * PI * i as f64 / m as f64;
            let (sp, cp) = polar.sin_cos();
            out.push([
                cp * n[0] + sp * (phi.cos() * u[0] + phi.sin() * w[0]),
                cp * n[1] + sp * (phi.cos() * u[1] + phi.sin() * w[1]),
                cp * n[2] + sp * (phi.cos() * u[2] + phi.sin() * w[2]),
            ]);
        }
    }
    out
}

/// Interior cone condition at every boundary cell. Each cell is the apex
/// of a copy of `cone` (its apex and axis are ignored); orientations tried
/// are a fan around the estimated inward normal followed by `directions`
/// uniformly spread axes. A cone fits when all its sample points (pitch
/// h/2) fall in inside cells.
pub fn check_h2(d: &GridDomain, cone: &ConeSpec, directions: usize) -> Result<H2Report> {
    let spec = d.spec();
    let h = spec.h();
    if cone.height < 4.0 * h {
        return Err(LabError::ConeUnderResolved { height: cone.height, limit: 4.0 * h });
    }
    let dim = spec.dim();
    let samples = ConeSamples::new(cone, dim, h / 2.0);
    let uniform = uniform_directions(dim, directions);
    let dist = distance_to_complement(d);
    let boundary = d.boundary_cells();
    let ext = spec.extents();
    let mut failing = Vec::new();
    for &cell in &boundary {
        let apex = spec.center(cell);
        let c = spec.coords(cell);
        let mut g = [0.0; 3];
        for a in 0..dim {
            let s = spec.stride(a);
            let hi = if c[a] + 1 < ext[a] { dist[cell + s] } else { dist[cell] };
            let lo = if c[a] > 0 { dist[cell - s] } else { dist[cell] };
            let (hi, lo) = (finite_or(hi, dist[cell]), finite_or(lo, dist[cell]));
            g[a] = hi - lo;
        }
        let mut candidates = normalize(g).map_or_else(Vec::new, |n| fan_around(&n, dim));
        candidates.extend_from_slice(&uniform);
        if !candidates.iter().any(|axis| samples.fits(d, &apex, axis)) {
            failing.push(cell);
        }
    }
    Ok(H2Report {
        holds: failing.is_empty(),
        cone: cone.clone(),
        failing_cells: failing,
        boundary_cells: boundary.len(),
        directions,
    })
}

fn finite_or(v: f64, fallback: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        fallback
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H3Report {
    /// Largest tested δ of the all-connected prefix; 0 if the first fails.
    pub delta0: f64,
    pub deltas: Vec<f64>,
    pub counts: Vec<usize>,
}

fn check_ascending(deltas: &[f64]) -> Result<()> {
    if deltas.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(LabError::InvalidArgument("deltas must be ascending".into()));
    }
    Ok(())
}

/// Component counts of the erosions `Ω^δ`.
pub fn check_h3(d: &GridDomain, deltas: &[f64]) -> Result<H3Report> {
    check_ascending(deltas)?;
    let h = d.spec().h();
    if let Some(bad) = deltas.iter().find(|&&x| x < 2.0 * h * (1.0 - 1e-9)) {
        return Err(LabError::InvalidArgument(format!("delta {bad} below 2h = {}", 2.0 * h)));
    }
    let dist = distance_to_complement(d);
    let mut counts = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let eroded = d.with_cells(d.inside_cells().filter(|&i| dist[i] > delta));
        counts.push(connected_components(&eroded).count);
    }
    let prefix = counts.iter().take_while(|&&c| c == 1).count();
    let delta0 = if prefix == 0 { 0.0 } else { deltas[prefix - 1] };
    Ok(H3Report { delta0, deltas: deltas.to_vec(), counts })
}

#[derive(Debug, Clone, Serialize)]
pub struct QCurve {
    /// `(δ, |Ω \ Ω^δ|)`.
    pub pairs: Vec<(f64, f64)>,
    /// Largest δ admitted into the fit.
    pub fit_cap: f64,
    pub fit: Option<LinearFit>,
}

/// Diagonal of the bounding box of inside cells (cells, not centers).
pub fn diameter(d: &GridDomain) -> f64 {
    let spec = d.spec();
    let dim = spec.dim();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for i in d.inside_cells() {
        let c = spec.center(i);
        for a in 0..dim {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    if d.is_empty() {
        return 0.0;
    }
    (0..dim).map(|a| (hi[a] - lo[a] + spec.h()).powi(2)).sum::<f64>().sqrt()
}

/// Boundary-layer measures with a line fitted on `δ ≤ diameter/20`.
pub fn property_q_curve(d: &GridDomain, deltas: &[f64]) -> Result<QCurve> {
    property_q_curve_capped(d, deltas, diameter(d) / 20.0)
}

pub fn property_q_curve_capped(d: &GridDomain, deltas: &[f64], cap: f64) -> Result<QCurve> {
    check_ascending(deltas)?;
    if deltas.iter().any(|&x| x < 0.0) {
        return Err(LabError::InvalidArgument("negative delta".into()));
    }
    let dist = distance_to_complement(d);
    let vol = d.spec().cell_volume();
    let mut inside: Vec<f64> = d.inside_cells().map(|i| dist[i]).collect();
    inside.sort_by(f64::total_cmp);
    let pairs: Vec<(f64, f64)> = deltas
        .iter()
        .map(|&delta| {
            let layer = inside.partition_point(|&v| v <= delta);
            (delta, layer as f64 * vol)
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().filter(|(x, _)| *x <= cap).cloned().unzip();
    let fit = linear_fit(&xs, &ys).ok();
    Ok(QCurve { pairs, fit_cap: cap, fit })
}

#[derive(Debug, Clone)]
pub struct F3Report {
    pub holds: bool,
    pub u: GridDomain,
    /// `|Ω \ U|`.
    pub remainder: f64,
}

/// `U` = largest component of `Ω^δ`; holds when `|Ω \ U| < eps`.
pub fn check_f3(d: &GridDomain, eps: f64, delta: f64) -> Result<F3Report> {
    if delta < 2.0 * d.spec().h() * (1.0 - 1e-9) {
        return Err(LabError::InvalidArgument(format!("delta {delta} below 2h")));
    }
    let eroded = erode(d, delta)?;
    let comps = connected_components(&eroded);
    let u = match comps.largest() {
        Some(label) => {
            let labels = &comps.labels;
            eroded.with_cells(eroded.inside_cells().filter(|&i| labels[i] == Some(label)))
        }
        None => GridDomain::empty(d.spec().clone()),
    };
    let remainder = d.measure() - u.measure();
    Ok(F3Report { holds: remainder < eps, u, remainder })
}

#[derive(Debug, Clone, Serialize)]
pub struct TubeAnnulusReport {
    pub inclusion_holds: bool,
    pub annulus_identity_holds: bool,
    pub inclusion_violations: usize,
    pub annulus_violations: usize,
    /// Cells admitted by the one-cell tolerance band.
    pub tolerated: usize,
}

/// With `U = {d(·,K) ≤ r−δ}`: checks `U ⊆ (K_r)^δ` and that the annulus
/// `K_r \ U = {r−δ < d(·,K) < r}` coincides with the shell
/// `{0 < d(·,U) < δ}`. Mismatches are tolerated within one cell diagonal of
/// the level sets `d(·,K) = r−δ` and `d(·,K) = r`.
pub fn check_tube_annulus(k: &GridDomain, r: f64, delta: f64) -> Result<TubeAnnulusReport> {
    if !(delta > 0.0 && delta < r / 2.0) {
        return Err(LabError::InvalidArgument(format!("delta {delta} not in (0, r/2) for r = {r}")));
    }
    let kr = dilate(k, r)?;
    let dk = distance_to_set(k);
    let eroded = erode(&kr, delta)?;
    let spec = k.spec();
    let tol = (spec.dim() as f64).sqrt() * spec.h();
    let level = r - delta;
    let u = k.with_cells((0..dk.len()).filter(|&i| dk[i] <= level).collect::<Vec<_>>());
    let du = distance_to_set(&u);
    let (mut inclusion, mut annulus, mut tolerated) = (0, 0, 0);
    for i in 0..dk.len() {
        let in_u = u.is_inside(i);
        let near = (dk[i] - level).abs() <= tol || (dk[i] - r).abs() <= tol;
        if in_u && !eroded.is_inside(i) {
            if near {
                tolerated += 1;
            } else {
                inclusion += 1;
            }
        }
        let in_annulus = kr.is_inside(i) && !in_u;
        let in_shell = du[i] > 0.0 && du[i] < delta;
        if in_annulus != in_shell {
            if near {
                tolerated += 1;
            } else {
                annulus += 1;
            }
        }
    }
    Ok(TubeAnnulusReport {
        inclusion_holds: inclusion == 0,
        annulus_identity_holds: annulus == 0,
        inclusion_violations: inclusion,
        annulus_violations: annulus,
        tolerated,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct H1Json {
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Json {
    pub holds: bool,
    pub aperture: f64,
    pub height: f64,
    pub fail_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct H3Json {
    pub delta0: f64,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QJson {
    pub pairs: Vec<(f64, f64)>,
    pub slope: Option<f64>,
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub h1: H1Json,
    pub h2: H2Json,
    pub h3: H3Json,
    pub q: QJson,
}

impl HypothesisReport {
    pub fn new(r: f64, h2: &H2Report, h3: &H3Report, q: &QCurve) -> Self {
        Self {
            h1: H1Json { r },
            h2: H2Json {
                holds: h2.holds,
                aperture: 2.0 * h2.cone.half_aperture,
                height: h2.cone.height,
                fail_count: h2.failing_cells.len(),
            },
            h3: H3Json { delta0: h3.delta0, counts: h3.counts.clone() },
            q: QJson { pairs: q.pairs.clone(), slope: q.fit.map(|f| f.slope), r2: q.fit.map(|f| f.r2) },
        }
    }
}

/// Runs (h1), (h2), (h3) and (Q) on one domain.
pub fn audit(
    d: &GridDomain,
    cone: &ConeSpec,
    directions: usize,
    h3_deltas: &[f64],
    q_deltas: &[f64],
) -> Result<HypothesisReport> {
    let r = check_h1(d)?;
    let h2 = check_h2(d, cone, directions)?;
    let h3 = check_h3(d, h3_deltas)?;
    let q = property_q_curve(d, q_deltas)?;
    Ok(HypothesisReport::new(r, &h2, &h3, &q))
}
