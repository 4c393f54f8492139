//! Uniform lattices and cell-center indicator domains.
//!
//! Cells are stored row-major with the last axis fastest, so the linear
//! index order is the lexicographic scan order. Two-dimensional grids keep
//! a trailing extent of 1 and ignore the third coordinate.

use crate::error::{LabError, Result};
use std::fmt::Write as _;

/// A point in R^2 or R^3. Unused trailing coordinates are zero.
pub type Point = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    origin: Point,
    h: f64,
    extents: [usize; 3],
}

impl GridSpec {
    pub fn new(dim: usize, origin: &[f64], h: f64, extents: &[usize]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(LabError::InvalidGrid(format!("dimension {dim} not in {{2,3}}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(LabError::InvalidGrid(format!("spacing {h} must be positive")));
        }
        if origin.len() != dim || extents.len() != dim {
            return Err(LabError::InvalidGrid("origin/extents length must equal dim".into()));
        }
        if extents.iter().any(|&n| n < 2) {
            return Err(LabError::InvalidGrid("all extents must be >= 2".into()));
        }
        let mut o = [0.0; 3];
        let mut e = [1; 3];
        o[..dim].copy_from_slice(origin);
        e[..dim].copy_from_slice(extents);
        Ok(Self { dim, origin: o, h, extents: e })
    }

    /// Grid whose cell centers sit on integer multiples of `h` and cover
    /// `[lo, hi]` with `margin` extra cells on every side.
    pub fn aligned(lo: &[f64], hi: &[f64], h: f64, margin: usize) -> Result<Self> {
        let dim = lo.len();
        let mut origin = vec![0.0; dim];
        let mut extents = vec![0; dim];
        for a in 0..dim {
            let first = (lo[a] / h - 1e-9).floor() as i64 - margin as i64;
            let last = (hi[a] / h + 1e-9).ceil() as i64 + margin as i64;
            origin[a] = (first as f64 - 0.5) * h;
            extents[a] = (last - first + 1).max(2) as usize;
        }
        Self::new(dim, &origin, h, &extents)
    }

    /// Grid whose cell faces sit on integer multiples of `h`, so boxes with
    /// lattice corners are covered by whole cells.
    pub fn face_aligned(lo: &[f64], hi: &[f64], h: f64, margin: usize) -> Result<Self> {
        let dim = lo.len();
        let mut origin = vec![0.0; dim];
        let mut extents = vec![0; dim];
        for a in 0..dim {
            let first = (lo[a] / h + 1e-9).floor() as i64 - margin as i64;
            let last = (hi[a] / h - 1e-9).ceil() as i64 + margin as i64;
            origin[a] = first as f64 * h;
            extents[a] = (last - first).max(2) as usize;
        }
        Self::new(dim, &origin, h, &extents)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dim]
    }

    pub fn num_cells(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        (c[0] * self.extents[1] + c[1]) * self.extents[2] + c[2]
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.extents[2];
        let rest = idx / self.extents[2];
        [rest / self.extents[1], rest % self.extents[1], k]
    }

    /// Linear stride of one step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.extents[1] * self.extents[2],
            1 => self.extents[2],
            _ => 1,
        }
    }

    pub fn center(&self, idx: usize) -> Point {
        let c = self.coords(idx);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.origin[a] + (c[a] as f64 + 0.5) * self.h;
        }
        p
    }

    /// Face neighbor of `idx` one step along `axis` (forward when `forward`).
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let c = self.coords(idx)[axis];
        if forward {
            (c + 1 < self.extents[axis]).then(|| idx + self.stride(axis))
        } else {
            (c > 0).then(|| idx - self.stride(axis))
        }
    }

    /// Cell containing `p`, if `p` lies inside the grid's box.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        let mut c = [0usize; 3];
        for a in 0..self.dim {
            let t = ((p[a] - self.origin[a]) / self.h).floor();
            if t < 0.0 || t >= self.extents[a] as f64 {
                return None;
            }
            c[a] = t as usize;
        }
        Some(self.index(c))
    }

    /// Lower and upper corners of the grid's box.
    pub fn bounds(&self) -> (Point, Point) {
        let mut hi = [0.0; 3];
        for a in 0..self.dim {
            hi[a] = self.origin[a] + self.extents[a] as f64 * self.h;
        }
        (self.origin, hi)
    }

    /// Same lattice enlarged by `cells` on every side.
    pub fn padded(&self, cells: usize) -> GridSpec {
        let mut s = self.clone();
        for a in 0..self.dim {
            s.origin[a] -= cells as f64 * self.h;
            s.extents[a] += 2 * cells;
        }
        s
    }
}

/// Indicator of an open set on a lattice: `inside[c]` iff the center of `c`
/// belongs to the set.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    spec: GridSpec,
    inside: Vec<bool>,
}

impl GridDomain {
    pub fn new(spec: GridSpec, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != spec.num_cells() {
            return Err(LabError::InvalidGrid(format!(
                "mask has {} cells, grid has {}",
                inside.len(),
                spec.num_cells()
            )));
        }
        Ok(Self { spec, inside })
    }

    pub fn empty(spec: GridSpec) -> Self {
        let n = spec.num_cells();
        Self { spec, inside: vec![false; n] }
    }

    /// Samples `pred` at every cell center.
    pub fn from_fn(spec: GridSpec, pred: impl Fn(&Point) -> bool) -> Self {
        let inside = (0..spec.num_cells()).map(|i| pred(&spec.center(i))).collect();
        Self { spec, inside }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn mask(&self) -> &[bool] {
        &self.inside
    }

    #[inline]
    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn count_inside(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.inside.iter().any(|&b| b)
    }

    pub fn measure(&self) -> f64 {
        self.count_inside() as f64 * self.spec.cell_volume()
    }

    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.inside.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Whether the point lies in a cell whose center is inside. Points off
    /// the grid are outside.
    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.spec.locate(p).is_some_and(|i| self.inside[i])
    }

    /// Inside cells with at least one outside face neighbor. Neighbors off
    /// the grid do not count.
    pub fn boundary_cells(&self) -> Vec<usize> {
        self.inside_cells()
            .filter(|&i| {
                (0..self.spec.dim()).any(|a| {
                    [true, false].iter().any(|&f| self.spec.neighbor(i, a, f).is_some_and(|n| !self.inside[n]))
                })
            })
            .collect()
    }

    pub fn complement(&self) -> GridDomain {
        Self { spec: self.spec.clone(), inside: self.inside.iter().map(|b| !b).collect() }
    }

    fn zip_with(&self, other: &GridDomain, f: impl Fn(bool, bool) -> bool) -> Result<GridDomain> {
        if self.spec != other.spec {
            return Err(LabError::Mismatch("domains live on different grids".into()));
        }
        let inside = self.inside.iter().zip(&other.inside).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { spec: self.spec.clone(), inside })
    }

    pub fn union(&self, other: &GridDomain) -> Result<GridDomain> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &GridDomain) -> Result<GridDomain> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &GridDomain) -> Result<GridDomain> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &GridDomain) -> bool {
        self.spec == other.spec && self.inside.iter().zip(&other.inside).all(|(&a, &b)| !a || b)
    }

    /// Embeds the domain in a grid enlarged by `cells` outside cells per side.
    pub fn padded(&self, cells: usize) -> GridDomain {
        let spec = self.spec.padded(cells);
        let mut inside = vec![false; spec.num_cells()];
        for i in self.inside_cells() {
            let c = self.spec.coords(i);
            let mut d = [0usize; 3];
            for a in 0..3 {
                d[a] = if a < self.spec.dim() { c[a] + cells } else { c[a] };
            }
            inside[spec.index(d)] = true;
        }
        Self { spec, inside }
    }

    /// Restriction of `self` to the given cells (others become outside).
    pub fn with_cells(&self, cells: impl IntoIterator<Item = usize>) -> GridDomain {
        let mut out = GridDomain::empty(self.spec.clone());
        for c in cells {
            out.inside[c] = true;
        }
        out
    }

    /// Serializes to the text format: a header followed by run lengths of
    /// alternating states, starting with outside.
    pub fn to_text(&self) -> String {
        let s = &self.spec;
        let mut out = String::from("poincare-lab-grid 1\n");
        let _ = writeln!(out, "dim {}", s.dim());
        let _ = writeln!(out, "origin {}", join(s.origin()));
        let _ = writeln!(out, "h {}", s.h());
        let _ = writeln!(out, "extents {}", join(s.extents()));
        let mut runs = Vec::new();
        let mut state = false;
        let mut len = 0usize;
        for &b in &self.inside {
            if b == state {
                len += 1;
            } else {
                runs.push(len);
                state = b;
                len = 1;
            }
        }
        runs.push(len);
        let _ = writeln!(out, "runs {}", join(&runs));
        out
    }

    pub fn from_text(text: &str) -> Result<GridDomain> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let magic = lines.next().ok_or_else(|| LabError::Parse("empty input".into()))?;
        if magic != "poincare-lab-grid 1" {
            return Err(LabError::Parse(format!("bad header `{magic}`")));
        }
        let mut field = |key: &str| -> Result<Vec<String>> {
            let line = lines.next().ok_or_else(|| LabError::Parse(format!("missing `{key}`")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(LabError::Parse(format!("expected `{key}`, found `{line}`")));
            }
            Ok(parts.map(String::from).collect())
        };
        let dim: usize = parse_one(&field("dim")?)?;
        let origin: Vec<f64> = parse_all(&field("origin")?)?;
        let h: f64 = parse_one(&field("h")?)?;
        let extents: Vec<usize> = parse_all(&field("extents")?)?;
        let runs: Vec<usize> = parse_all(&field("runs")?)?;
        let spec = GridSpec::new(dim, &origin, h, &extents)?;
        let total: usize = runs.iter().sum();
        if total != spec.num_cells() {
            return Err(LabError::Parse(format!("runs cover {total} cells, header declares {}", spec.num_cells())));
        }
        let mut inside = Vec::with_capacity(total);
        for (k, &r) in runs.iter().enumerate() {
            inside.extend(std::iter::repeat(k % 2 == 1).take(r));
        }
        GridDomain::new(spec, inside)
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_all<T: std::str::FromStr>(xs: &[String]) -> Result<Vec<T>> {
    xs.iter().map(|x| x.parse().map_err(|_| LabError::Parse(format!("bad number `{x}`")))).collect()
}

fn parse_one<T: std::str::FromStr>(xs: &[String]) -> Result<T> {
    let mut v = parse_all(xs)?;
    if v.len() != 1 {
        return Err(LabError::Parse("expected a single value".into()));
    }
    Ok(v.remove(0))
}
