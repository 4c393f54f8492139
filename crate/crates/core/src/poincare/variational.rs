use super::{normalize_lp, require_connected, Method, PoincareEstimate};
use crate::discrete::{cg_zero_mean, dot, remove_mean, Stencil};
use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::grid::GridDomain;
use crate::rng::named_stream;
use rand::Rng;
use std::collections::VecDeque;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct VariationalOptions {
    /// Random starts in addition to `initial`.
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop when the relative quotient changes over the trailing window sum
    /// to less than this (at least two counted steps).
    pub tol: f64,
    pub window: usize,
    pub initial: Option<ScalarField>,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self { restarts: 4, seed: 0, max_iter: 2000, tol: 1e-7, window: 10, initial: None }
    }
}

struct Problem<'a> {
    st: &'a Stencil,
    p: f64,
    vol: f64,
    stiff_diag: Vec<f64>,
}

struct Run {
    c: f64,
    u: Vec<f64>,
    iterations: usize,
    residual: f64,
}

impl Problem<'_> {
    fn log_quotient(&self, u: &[f64]) -> f64 {
        let num = u.iter().map(|x| x.abs().powf(self.p)).sum::<f64>() * self.vol;
        let den = self.st.gradient_energy(u, self.p);
        num.ln() - den.ln()
    }

    /// Zero-mean gradient of `log Q`.
    fn gradient(&self, u: &[f64], g: &mut [f64]) {
        let p = self.p;
        let num = u.iter().map(|x| x.abs().powf(p)).sum::<f64>() * self.vol;
        let den = self.st.gradient_energy(u, p);
        self.st.gradient_energy_derivative(u, p, g);
        for (gi, &ui) in g.iter_mut().zip(u) {
            let dn = p * ui.abs().powf(p - 1.0) * ui.signum() * self.vol;
            *gi = dn / num - *gi / den;
        }
        remove_mean(g);
    }

    /// Preconditioned ascent with the p = 2 stiffness and backtracking.
    fn ascend(&self, mut u: Vec<f64>, opts: &VariationalOptions) -> Result<Run> {
        let n = u.len();
        remove_mean(&mut u);
        normalize_lp(&mut u, self.p, self.vol);
        let mut lq = self.log_quotient(&u);
        if !lq.is_finite() {
            return Err(LabError::ConstantFunction);
        }
        let mut g = vec![0.0; n];
        let mut dir = vec![0.0; n];
        let mut trial = vec![0.0; n];
        // For p = 2 this step turns the update into one inverse iteration.
        let mut step = (-lq).exp() / (self.p * self.vol);
        let mut changes: VecDeque<f64> = VecDeque::new();
        let apply = |v: &[f64], out: &mut [f64]| self.st.apply_cell_stiffness(v, out);
        for it in 1..=opts.max_iter {
            self.gradient(&u, &mut g);
            dir.iter_mut().for_each(|x| *x = 0.0);
            cg_zero_mean(apply, &self.stiff_diag, &g, &mut dir, 1e-8, 20 * n + 1000)?;
            let slope = dot(&g, &dir);
            let mut accepted = None;
            if slope > 0.0 {
                let mut eval = |t: f64| {
                    for i in 0..n {
                        trial[i] = u[i] + t * dir[i];
                    }
                    remove_mean(&mut trial);
                    self.log_quotient(&trial)
                };
                let mut t = step;
                let mut l = eval(t);
                let mut halvings = 0;
                while !(l.is_finite() && l >= lq + 1e-4 * t * slope) && halvings < 60 {
                    t *= 0.5;
                    l = eval(t);
                    halvings += 1;
                }
                if l.is_finite() && l >= lq + 1e-4 * t * slope {
                    if halvings == 0 {
                        // Refine on [t/2, 2t] by golden section.
                        let (mut a, mut b) = (0.5 * t, 2.0 * t);
                        let r = 0.5 * (5f64.sqrt() - 1.0);
                        let (mut x1, mut x2) = (b - r * (b - a), a + r * (b - a));
                        let (mut f1, mut f2) = (eval(x1), eval(x2));
                        for _ in 0..12 {
                            if f1 >= f2 {
                                b = x2;
                                x2 = x1;
                                f2 = f1;
                                x1 = b - r * (b - a);
                                f1 = eval(x1);
                            } else {
                                a = x1;
                                x1 = x2;
                                f1 = f2;
                                x2 = a + r * (b - a);
                                f2 = eval(x2);
                            }
                        }
                        for (tc, lc) in [(x1, f1), (x2, f2)] {
                            if lc.is_finite() && lc > l {
                                t = tc;
                                l = lc;
                            }
                        }
                    }
                    eval(t);
                    accepted = Some((t, l));
                }
            }
            let change = match accepted {
                Some((t, l)) => {
                    step = t;
                    std::mem::swap(&mut u, &mut trial);
                    normalize_lp(&mut u, self.p, self.vol);
                    let c = ((l - lq).exp() - 1.0).abs();
                    lq = l;
                    c
                }
                None => 0.0,
            };
            // The first step moves off an arbitrary start and is not counted.
            if it > 1 {
                changes.push_back(change);
            }
            if changes.len() > opts.window {
                changes.pop_front();
            }
            let total: f64 = changes.iter().sum();
            if changes.len() >= 2 && total < opts.tol {
                return Ok(Run { c: lq.exp(), u, iterations: it, residual: total });
            }
        }
        Err(LabError::NotConverged { iterations: opts.max_iter, residual: changes.iter().sum() })
    }
}

/// Maximizes `∫|u|^p / ∫|∇u|^p` over zero-mean `u`: preconditioned gradient
/// ascent on `log Q` from `initial` (if any) and `restarts` seeded random
/// starts. Returns the best run.
pub fn estimate_constant_variational(d: &GridDomain, p: f64, opts: &VariationalOptions) -> Result<PoincareEstimate> {
    if !(p > 1.0) {
        return Err(LabError::InvalidArgument(format!("exponent p = {p} must exceed 1")));
    }
    require_connected(d)?;
    if opts.initial.is_none() && opts.restarts == 0 {
        return Err(LabError::InvalidArgument("no starting point: restarts = 0 and no initial guess".into()));
    }
    let st = Stencil::new(Arc::new(d.clone()));
    let problem = Problem { st: &st, p, vol: st.cell_volume(), stiff_diag: st.cell_stiffness_diagonal() };
    let mut starts = Vec::new();
    if let Some(init) = &opts.initial {
        if init.domain().spec() != d.spec() {
            return Err(LabError::Mismatch("initial guess lives on another grid".into()));
        }
        starts.push(st.gather(init));
    }
    let spec = d.spec();
    for r in 0..opts.restarts {
        let mut rng = named_stream(opts.seed, "variational-restart", r as u64);
        let lin: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let quad: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let u = st
            .cells()
            .iter()
            .map(|&c| {
                let x = spec.center(c);
                (0..3).map(|a| lin[a] * x[a] + quad[a] * x[a] * x[a]).sum::<f64>() + 0.05 * rng.gen_range(-1.0..1.0)
            })
            .collect();
        starts.push(u);
    }
    let mut best: Option<Run> = None;
    for u in starts {
        let run = problem.ascend(u, opts)?;
        if best.as_ref().map_or(true, |b| run.c > b.c) {
            best = Some(run);
        }
    }
    let run = best.expect("at least one start");
    Ok(PoincareEstimate {
        p,
        c: run.c,
        method: Method::Variational,
        residual: run.residual,
        iterations: run.iterations,
        minimizer: st.scatter(&run.u),
    })
}
