use super::{normalize_lp, require_connected, Method, PoincareEstimate};
use crate::discrete::{cg_zero_mean, dot, norm, remove_mean, Stencil};
use crate::error::{LabError, Result};
use crate::grid::GridDomain;
use crate::rng::named_stream;
use rand::Rng;
use std::sync::Arc;

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Bound on `‖L x − λ x‖ / λ` for unit `x`.
    pub residual_tol: f64,
    pub cg_tol: f64,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-8, cg_tol: 1e-11, max_iter: 400 }
    }
}

/// `C = 1/λ₁` of the finite-volume Neumann Laplacian by inverse iteration
/// on the zero-mean subspace.
pub fn estimate_constant_spectral(d: &GridDomain) -> Result<PoincareEstimate> {
    estimate_constant_spectral_with(d, &SpectralOptions::default())
}

pub fn estimate_constant_spectral_with(d: &GridDomain, opts: &SpectralOptions) -> Result<PoincareEstimate> {
    require_connected(d)?;
    let st = Stencil::new(Arc::new(d.clone()));
    let n = st.len();
    if n < 2 {
        return Err(LabError::InvalidArgument("need at least two cells".into()));
    }
    let spec = d.spec();
    let mut rng = named_stream(0, "spectral-start", 0);
    let mut x: Vec<f64> = st
        .cells()
        .iter()
        .map(|&c| {
            let p = spec.center(c);
            p[0] + 0.37 * p[1] + 0.19 * p[2] + 1e-3 * rng.gen_range(-1.0..1.0)
        })
        .collect();
    remove_mean(&mut x);
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);

    let diag = st.laplacian_diagonal();
    let apply = |v: &[f64], out: &mut [f64]| st.apply_laplacian(v, out);
    let mut lx = vec![0.0; n];
    apply(&x, &mut lx);
    let mut lambda = dot(&x, &lx);
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        // Warm start: if x were an eigenvector the solution is x/λ.
        for i in 0..n {
            y[i] = x[i] / lambda;
        }
        cg_zero_mean(apply, &diag, &x, &mut y, opts.cg_tol, 50 * n + 1000)?;
        let s = norm(&y);
        for i in 0..n {
            x[i] = y[i] / s;
        }
        apply(&x, &mut lx);
        lambda = dot(&x, &lx);
        residual = (0..n).map(|i| (lx[i] - lambda * x[i]).powi(2)).sum::<f64>().sqrt() / lambda;
        if residual <= opts.residual_tol {
            break;
        }
    }
    if residual > opts.residual_tol {
        return Err(LabError::NotConverged { iterations, residual });
    }
    normalize_lp(&mut x, 2.0, st.cell_volume());
    Ok(PoincareEstimate {
        p: 2.0,
        c: 1.0 / lambda,
        method: Method::Spectral,
        residual,
        iterations,
        minimizer: st.scatter(&x),
    })
}
