//! Erosion, dilation and face-adjacency connectivity on cell-center sets.

use crate::edt::{distance_to_complement, distance_to_set};
use crate::error::{LabError, Result};
use crate::grid::GridDomain;
use std::collections::VecDeque;

/// `{c in d : dist(c, complement) > delta}`. Ties at exactly `delta` are
/// excluded, matching the open-set definition.
pub fn erode(d: &GridDomain, delta: f64) -> Result<GridDomain> {
    if !(delta >= 0.0) {
        return Err(LabError::InvalidArgument(format!("erosion radius {delta} < 0")));
    }
    if d.is_empty() {
        return Ok(d.clone());
    }
    let dist = distance_to_complement(d);
    let cells = d.inside_cells().filter(|&i| dist[i] > delta);
    Ok(d.with_cells(cells.collect::<Vec<_>>()))
}

/// `{c : dist(c, seed) < r}`. Fails instead of clipping when the dilation
/// would reach centers beyond the grid.
pub fn dilate(seed: &GridDomain, r: f64) -> Result<GridDomain> {
    if !(r > 0.0) {
        return Err(LabError::InvalidArgument(format!("dilation radius {r} <= 0")));
    }
    if seed.is_empty() {
        return Err(LabError::InvalidArgument("empty seed".into()));
    }
    let spec = seed.spec();
    let h = spec.h();
    for i in seed.inside_cells() {
        let c = spec.coords(i);
        for a in 0..spec.dim() {
            // The nearest off-grid centers sit one step past either edge.
            let below = (c[a] + 1) as f64 * h;
            let above = (spec.extents()[a] - c[a]) as f64 * h;
            if below < r || above < r {
                return Err(LabError::GridTooSmall { radius: r });
            }
        }
    }
    let dist = distance_to_set(seed);
    let cells: Vec<usize> = (0..dist.len()).filter(|&i| dist[i] < r).collect();
    Ok(seed.with_cells(cells))
}

/// Component labels per cell (`None` outside) plus the component count.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub labels: Vec<Option<u32>>,
    pub count: usize,
}

impl Components {
    /// Cell counts per label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for l in self.labels.iter().flatten() {
            sizes[*l as usize] += 1;
        }
        sizes
    }

    /// Label of the largest component; ties go to the lowest label.
    pub fn largest(&self) -> Option<u32> {
        let sizes = self.sizes();
        let mut best: Option<(usize, usize)> = None;
        for (l, &s) in sizes.iter().enumerate() {
            if best.map_or(true, |(_, bs)| s > bs) {
                best = Some((l, s));
            }
        }
        best.map(|(l, _)| l as u32)
    }
}

/// Breadth-first flood fill with 4-neighbors (2D) or 6-neighbors (3D).
/// Labels are numbered in order of each component's first cell in the scan.
pub fn connected_components(d: &GridDomain) -> Components {
    let spec = d.spec();
    let mut labels = vec![None; spec.num_cells()];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in d.inside_cells() {
        if labels[start].is_some() {
            continue;
        }
        labels[start] = Some(count);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for a in 0..spec.dim() {
                for fwd in [false, true] {
                    if let Some(n) = spec.neighbor(c, a, fwd) {
                        if d.is_inside(n) && labels[n].is_none() {
                            labels[n] = Some(count);
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        count += 1;
    }
    Components { labels, count: count as usize }
}

pub fn component_count(d: &GridDomain) -> usize {
    connected_components(d).count
}
