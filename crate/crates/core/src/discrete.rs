//! Compact inside-cell numbering, discrete gradients and the Neumann
//! Laplacian, plus a Jacobi-preconditioned conjugate gradient solver.
//!
//! Vectors in this module are indexed by inside-cell ordinal (scan order),
//! not by grid index.

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::GridDomain;
use std::sync::Arc;

const NONE: u32 = u32::MAX;

/// Inside cells of a domain with their face neighbors.
#[derive(Debug, Clone)]
pub struct Stencil {
    domain: Arc<GridDomain>,
    dim: usize,
    h: f64,
    cells: Vec<usize>,
    fwd: Vec<[u32; 3]>,
    bwd: Vec<[u32; 3]>,
}

impl Stencil {
    pub fn new(domain: Arc<GridDomain>) -> Self {
        let spec = domain.spec().clone();
        let dim = spec.dim();
        let cells: Vec<usize> = domain.inside_cells().collect();
        let mut ordinal = vec![NONE; spec.num_cells()];
        for (k, &c) in cells.iter().enumerate() {
            ordinal[c] = k as u32;
        }
        let lookup = |c: usize, a: usize, f: bool| spec.neighbor(c, a, f).map_or(NONE, |n| ordinal[n]);
        let mut fwd = Vec::with_capacity(cells.len());
        let mut bwd = Vec::with_capacity(cells.len());
        for &c in &cells {
            let mut f = [NONE; 3];
            let mut b = [NONE; 3];
            for a in 0..dim {
                f[a] = lookup(c, a, true);
                b[a] = lookup(c, a, false);
            }
            fwd.push(f);
            bwd.push(b);
        }
        Self { domain, dim, h: spec.h(), cells, fwd, bwd }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    /// Grid index of each ordinal.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn gather(&self, f: &ScalarField) -> Vec<f64> {
        self.cells.iter().map(|&c| f.value(c)).collect()
    }

    pub fn scatter(&self, v: &[f64]) -> ScalarField {
        let mut dense = vec![0.0; self.domain.spec().num_cells()];
        for (k, &c) in self.cells.iter().enumerate() {
            dense[c] = v[k];
        }
        ScalarField::new(self.domain.clone(), dense).expect("stencil grid matches its domain")
    }

    /// The difference used for cell `k` along `axis`: forward when the
    /// forward neighbor is inside, else backward, else none. Returns
    /// `(from, to)` so the difference is `(v[to] - v[from]) / h`.
    #[inline]
    fn one_sided(&self, k: usize, axis: usize) -> Option<(usize, usize)> {
        let f = self.fwd[k][axis];
        if f != NONE {
            return Some((k, f as usize));
        }
        let b = self.bwd[k][axis];
        (b != NONE).then(|| (b as usize, k))
    }

    /// Per-cell gradient vectors (one-sided differences).
    pub fn gradient(&self, v: &[f64]) -> Vec<[f64; 3]> {
        (0..self.len())
            .map(|k| {
                let mut g = [0.0; 3];
                for a in 0..self.dim {
                    if let Some((i, j)) = self.one_sided(k, a) {
                        g[a] = (v[j] - v[i]) / self.h;
                    }
                }
                g
            })
            .collect()
    }

    /// `∫ |∇v|^p` with the per-cell one-sided gradient.
    pub fn gradient_energy(&self, v: &[f64], p: f64) -> f64 {
        let vol = self.cell_volume();
        self.gradient(v)
            .iter()
            .map(|g| {
                let n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                if p == 2.0 {
                    n2
                } else {
                    n2.powf(p / 2.0)
                }
            })
            .sum::<f64>()
            * vol
    }

    /// Gradient of `gradient_energy` with respect to `v`.
    pub fn gradient_energy_derivative(&self, v: &[f64], p: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let vol = self.cell_volume();
        let h = self.h;
        for k in 0..self.len() {
            let mut g = [0.0; 3];
            let mut pairs = [None; 3];
            for a in 0..self.dim {
                if let Some((i, j)) = self.one_sided(k, a) {
                    g[a] = (v[j] - v[i]) / h;
                    pairs[a] = Some((i, j));
                }
            }
            let n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if n2 == 0.0 {
                continue;
            }
            let w = p * n2.powf(p / 2.0 - 1.0) * vol;
            for a in 0..self.dim {
                if let Some((i, j)) = pairs[a] {
                    let c = w * g[a] / h;
                    out[j] += c;
                    out[i] -= c;
                }
            }
        }
    }

    /// `K v` where `vol · vᵀ K v` is the p = 2 per-cell gradient energy.
    pub fn apply_cell_stiffness(&self, v: &[f64], out: &mut [f64]) {
        self.gradient_energy_derivative(v, 2.0, out);
        let s = 0.5 / self.cell_volume();
        out.iter_mut().for_each(|x| *x *= s);
    }

    /// Diagonal of the per-cell stiffness.
    pub fn cell_stiffness_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.len()];
        let inv_h2 = 1.0 / (self.h * self.h);
        for k in 0..self.len() {
            for a in 0..self.dim {
                if let Some((i, j)) = self.one_sided(k, a) {
                    d[i] += inv_h2;
                    d[j] += inv_h2;
                }
            }
        }
        d
    }

    /// Finite-volume Neumann Laplacian: fluxes only across faces whose two
    /// cells are inside.
    pub fn apply_laplacian(&self, v: &[f64], out: &mut [f64]) {
        let inv_h2 = 1.0 / (self.h * self.h);
        for k in 0..self.len() {
            let vk = v[k];
            let mut acc = 0.0;
            for a in 0..self.dim {
                let f = self.fwd[k][a];
                if f != NONE {
                    acc += vk - v[f as usize];
                }
                let b = self.bwd[k][a];
                if b != NONE {
                    acc += vk - v[b as usize];
                }
            }
            out[k] = acc * inv_h2;
        }
    }

    pub fn laplacian_diagonal(&self) -> Vec<f64> {
        let inv_h2 = 1.0 / (self.h * self.h);
        (0..self.len())
            .map(|k| {
                let n = (0..self.dim)
                    .map(|a| (self.fwd[k][a] != NONE) as usize + (self.bwd[k][a] != NONE) as usize)
                    .sum::<usize>();
                n as f64 * inv_h2
            })
            .collect()
    }

    /// `∫ |∇v|²` in the face-pair form of the Neumann Laplacian.
    pub fn pair_energy(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.len() {
            for a in 0..self.dim {
                let f = self.fwd[k][a];
                if f != NONE {
                    let d = v[f as usize] - v[k];
                    acc += d * d;
                }
            }
        }
        acc / (self.h * self.h) * self.cell_volume()
    }
}

/// `∫ |∇u|^p` with the same one-sided gradient as [`Stencil::gradient_energy`],
/// evaluated directly on the dense grid (no neighbor tables).
pub fn field_gradient_energy(u: &ScalarField, p: f64) -> f64 {
    let d = u.domain();
    let spec = d.spec();
    let dim = spec.dim();
    let h = spec.h();
    let ext = spec.extents();
    let mask = d.mask();
    let v = u.values();
    let mut total = 0.0;
    for idx in d.inside_cells() {
        let c = spec.coords(idx);
        let mut n2 = 0.0;
        for a in 0..dim {
            let s = spec.stride(a);
            let g = if c[a] + 1 < ext[a] && mask[idx + s] {
                v[idx + s] - v[idx]
            } else if c[a] > 0 && mask[idx - s] {
                v[idx] - v[idx - s]
            } else {
                0.0
            };
            n2 += g * g;
        }
        n2 /= h * h;
        total += if p == 2.0 { n2 } else { n2.powf(p / 2.0) };
    }
    total * spec.cell_volume()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn remove_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned CG for a symmetric positive semidefinite operator
/// whose kernel is the constant vector. `b` must have zero sum; iterates are
/// kept in the zero-mean subspace. `x` carries the initial guess.
pub fn cg_zero_mean(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome { iterations: 0, relative_residual: 0.0 });
    }
    remove_mean(x);
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    remove_mean(&mut r);
    let precondition = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        remove_mean(z);
    };
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut res = norm(&r) / bnorm;
    let mut it = 0;
    while res > tol && it < max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        res = norm(&r) / bnorm;
    }
    remove_mean(x);
    if res > tol {
        return Err(LabError::NotConverged { iterations: it, residual: res });
    }
    Ok(CgOutcome { iterations: it, relative_residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn square(h: f64) -> Arc<GridDomain> {
        let spec = GridSpec::aligned(&[0.0, 0.0], &[1.0, 1.0], h, 1).unwrap();
        Arc::new(GridDomain::from_fn(spec, |p| p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0))
    }

    #[test]
    fn laplacian_kills_constants_and_is_symmetric() {
        let s = Stencil::new(square(1.0 / 16.0));
        let ones = vec![1.0; s.len()];
        let mut out = vec![0.0; s.len()];
        s.apply_laplacian(&ones, &mut out);
        assert!(norm(&out) < 1e-9);
        let a: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 0.11).cos()).collect();
        let mut la = vec![0.0; s.len()];
        let mut lb = vec![0.0; s.len()];
        s.apply_laplacian(&a, &mut la);
        s.apply_laplacian(&b, &mut lb);
        assert!((dot(&la, &b) - dot(&a, &lb)).abs() < 1e-8 * norm(&la) * norm(&b));
        assert!((dot(&a, &la) * s.cell_volume() - s.pair_energy(&a)).abs() < 1e-9 * s.pair_energy(&a));
    }

    #[test]
    fn cell_stiffness_matches_energy() {
        let s = Stencil::new(square(1.0 / 16.0));
        let a: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut ka = vec![0.0; s.len()];
        s.apply_cell_stiffness(&a, &mut ka);
        let e = s.gradient_energy(&a, 2.0);
        assert!((dot(&a, &ka) * s.cell_volume() - e).abs() < 1e-9 * e);
        // Per-cell energy counts every pair at least once.
        assert!(e >= s.pair_energy(&a) - 1e-12);
    }

    #[test]
    fn energy_derivative_matches_finite_differences() {
        let s = Stencil::new(square(1.0 / 8.0));
        let v: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 0.7).sin()).collect();
        for p in [1.5, 2.0, 3.0] {
            let mut g = vec![0.0; s.len()];
            s.gradient_energy_derivative(&v, p, &mut g);
            for k in [0, 5, 17, s.len() - 1] {
                let eps = 1e-6;
                let mut up = v.clone();
                up[k] += eps;
                let mut dn = v.clone();
                dn[k] -= eps;
                let fd = (s.gradient_energy(&up, p) - s.gradient_energy(&dn, p)) / (2.0 * eps);
                assert!((fd - g[k]).abs() < 1e-5 * (1.0 + fd.abs()), "p={p} k={k}: {fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn cg_solves_poisson() {
        let s = Stencil::new(square(1.0 / 32.0));
        let mut b: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 0.3).sin()).collect();
        remove_mean(&mut b);
        let mut x = vec![0.0; s.len()];
        let diag = s.laplacian_diagonal();
        let out = cg_zero_mean(|v, o| s.apply_laplacian(v, o), &diag, &b, &mut x, 1e-10, 10_000).unwrap();
        let mut lx = vec![0.0; s.len()];
        s.apply_laplacian(&x, &mut lx);
        let err: f64 = lx.iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-9 * norm(&b), "{err} after {} iterations", out.iterations);
    }
}
