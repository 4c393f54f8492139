//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use poincare_lab::{GridDomain, GridSpec};
use rand::Rng;

/// Distance from every cell center to the nearest center of opposite state,
/// by checking all pairs.
pub fn brute_force_edt(d: &GridDomain) -> Vec<f64> {
    let spec = d.spec();
    let n = spec.num_cells();
    let centers: Vec<[f64; 3]> = (0..n).map(|i| spec.center(i)).collect();
    (0..n)
        .map(|i| {
            let mine = d.is_inside(i);
            let mut best = f64::INFINITY;
            for j in 0..n {
                if d.is_inside(j) != mine {
                    let s: f64 = (0..3).map(|a| (centers[i][a] - centers[j][a]).powi(2)).sum();
                    best = best.min(s);
                }
            }
            best.sqrt()
        })
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Per-cell component representative (`None` outside) by union-find over
/// face-adjacent inside pairs, computed from raw coordinates.
pub fn union_find_labels(d: &GridDomain) -> Vec<Option<usize>> {
    let spec = d.spec();
    let ext = spec.extents().to_vec();
    let n = spec.num_cells();
    let mut uf = UnionFind { parent: (0..n).collect() };
    for i in 0..n {
        if !d.is_inside(i) {
            continue;
        }
        let c = spec.coords(i);
        for a in 0..spec.dim() {
            if c[a] + 1 < ext[a] {
                let mut e = c;
                e[a] += 1;
                let j = spec.index(e);
                if d.is_inside(j) {
                    uf.union(i, j);
                }
            }
        }
    }
    (0..n).map(|i| if d.is_inside(i) { Some(uf.find(i)) } else { None }).collect()
}

pub fn union_find_count(d: &GridDomain) -> usize {
    let labels = union_find_labels(d);
    let mut roots: Vec<usize> = labels.iter().flatten().cloned().collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Two labelings describe the same partition.
pub fn same_partition(a: &[Option<u32>], b: &[Option<usize>]) -> bool {
    use std::collections::HashMap;
    let mut fwd: HashMap<u32, usize> = HashMap::new();
    let mut back: HashMap<usize, u32> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        match (x, y) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                if *fwd.entry(*x).or_insert(*y) != *y || *back.entry(*y).or_insert(*x) != *x {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Bernoulli indicator on an `n × n` grid of spacing `1/n`.
pub fn random_indicator(rng: &mut impl Rng, n: usize, fill: f64) -> GridDomain {
    let spec = GridSpec::new(2, &[0.0, 0.0], 1.0 / n as f64, &[n, n]).unwrap();
    let inside = (0..n * n).map(|_| rng.gen_bool(fill)).collect();
    GridDomain::new(spec, inside).unwrap()
}

/// Random 3D indicator with at least one cell of each state.
pub fn random_indicator_3d(rng: &mut impl Rng, n: usize, fill: f64) -> GridDomain {
    let spec = GridSpec::new(3, &[0.0; 3], 1.0 / n as f64, &[n, n, n]).unwrap();
    let mut inside: Vec<bool> = (0..n * n * n).map(|_| rng.gen_bool(fill)).collect();
    inside[0] = true;
    inside[1] = false;
    GridDomain::new(spec, inside).unwrap()
}

/// Frame area `|Q \ Q^δ|` of the unit square for the open erosion.
pub fn square_frame_area(delta: f64) -> f64 {
    4.0 * delta - 4.0 * delta * delta
}

/// `∫|∇u_ε|²` of the odd dumbbell witness: `|∇u| = 1/ε` on the band of
/// height `2ε` whose cross-section is the disk of radius `ε + |z|`.
pub fn dumbbell_energy(eps: f64) -> f64 {
    // ∫_{-ε}^{ε} π(ε+|z|)² dz / ε² = 2π(8ε³−ε³)/(3ε²)
    14.0 * std::f64::consts::PI * eps / 3.0
}

/// Least-squares slope and R² of `y` against `x`, written out directly.
pub fn slope_r2(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) })
}
