//! Exact Euclidean distance transforms on cell centers.
//!
//! The squared transform is computed dimension by dimension with the lower
//! envelope of parabolas (Felzenszwalb & Huttenlocher), which is exact for
//! the lattice metric. Squared distances are integers in index units, so the
//! f64 arithmetic below is exact for every grid this crate builds.

use crate::error::{LabError, Result};
use crate::grid::{GridDomain, GridSpec, Point};

const FAR: f64 = 1e20;

/// Per-cell distance values on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    spec: GridSpec,
    values: Vec<f64>,
    signed: bool,
}

impl DistanceField {
    pub fn from_values(spec: GridSpec, values: Vec<f64>, signed: bool) -> Result<Self> {
        if values.len() != spec.num_cells() {
            return Err(LabError::Mismatch("distance values do not match grid".into()));
        }
        Ok(Self { spec, values, signed })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Multilinear interpolation between cell centers. `None` when `p` is
    /// outside the hull of the centers.
    pub fn interpolate(&self, p: &[f64]) -> Option<f64> {
        let s = &self.spec;
        let dim = s.dim();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..dim {
            let t = (p[a] - s.origin()[a]) / s.h() - 0.5;
            let n = s.extents()[a];
            if !(t >= -1e-12) || t > (n - 1) as f64 + 1e-12 {
                return None;
            }
            let t = t.clamp(0.0, (n - 1) as f64);
            let i = (t.floor() as usize).min(n - 2);
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let corners = 1usize << dim;
        let mut acc = 0.0;
        for k in 0..corners {
            let mut w = 1.0;
            let mut c = base;
            for a in 0..dim {
                if k >> a & 1 == 1 {
                    c[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[s.index(c)];
            }
        }
        Some(acc)
    }
}

fn envelope_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let cross =
        |q: usize, p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
    for q in 1..n {
        let mut s = cross(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = cross(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        out[q] = d * d + f[v[k]];
    }
}

/// Squared distance, in index units, from every cell center to the nearest
/// center of a feature cell. Cells are `FAR`-valued when there is no feature.
pub(crate) fn squared_index_edt(spec: &GridSpec, feature: &[bool]) -> Vec<f64> {
    let mut g: Vec<f64> = feature.iter().map(|&b| if b { 0.0 } else { FAR }).collect();
    let ext = spec.extents();
    let max_n = ext.iter().copied().max().unwrap_or(1);
    let mut line = vec![0.0; max_n];
    let mut out = vec![0.0; max_n];
    let mut v = vec![0usize; max_n];
    let mut z = vec![0.0; max_n + 1];
    for axis in 0..spec.dim() {
        let n = ext[axis];
        let stride = spec.stride(axis);
        for start in 0..g.len() {
            if spec.coords(start)[axis] != 0 {
                continue;
            }
            for q in 0..n {
                line[q] = g[start + q * stride];
            }
            envelope_1d(&line[..n], &mut out[..n], &mut v[..n], &mut z[..n + 1]);
            for q in 0..n {
                g[start + q * stride] = out[q].min(FAR);
            }
        }
    }
    g
}

/// Distance from each cell center to the nearest center of the opposite
/// state. Signed mode negates the values of outside cells.
pub fn exact_distance_transform(d: &GridDomain, signed: bool) -> Result<DistanceField> {
    let mask = d.mask();
    let n_in = d.count_inside();
    if n_in == 0 || n_in == mask.len() {
        return Err(LabError::DegenerateIndicator);
    }
    let spec = d.spec().clone();
    let h = spec.h();
    let outside: Vec<bool> = mask.iter().map(|b| !b).collect();
    let to_out = squared_index_edt(&spec, &outside);
    let to_in = squared_index_edt(&spec, mask);
    let values = mask
        .iter()
        .enumerate()
        .map(|(i, &inside)| {
            if inside {
                to_out[i].sqrt() * h
            } else if signed {
                -to_in[i].sqrt() * h
            } else {
                to_in[i].sqrt() * h
            }
        })
        .collect();
    Ok(DistanceField { spec, values, signed })
}

/// Distance from each inside cell to the nearest outside center, infinite
/// when no outside cell exists. Outside cells hold 0.
pub(crate) fn distance_to_complement(d: &GridDomain) -> Vec<f64> {
    let spec = d.spec();
    let outside: Vec<bool> = d.mask().iter().map(|b| !b).collect();
    if !outside.iter().any(|&b| b) {
        return vec![f64::INFINITY; outside.len()];
    }
    let sq = squared_index_edt(spec, &outside);
    sq.iter().map(|&s| s.sqrt() * spec.h()).collect()
}

/// Distance from every cell center to the nearest inside center of `seed`.
pub(crate) fn distance_to_set(seed: &GridDomain) -> Vec<f64> {
    let spec = seed.spec();
    let sq = squared_index_edt(spec, seed.mask());
    sq.iter().map(|&s| if s >= FAR { f64::INFINITY } else { s.sqrt() * spec.h() }).collect()
}

/// Euclidean distance between two points of the grid's dimension.
pub fn point_distance(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
