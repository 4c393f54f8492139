use crate::error::{LabError, Result};
use crate::grid::{GridDomain, Point};
use std::sync::Arc;

/// Real values on the inside cells of a domain. Storage is dense over the
/// grid; outside entries are held at zero and never read.
#[derive(Debug, Clone)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: Arc<GridDomain>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.spec().num_cells() {
            return Err(LabError::Mismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                domain.spec().num_cells()
            )));
        }
        for (v, &inside) in values.iter_mut().zip(domain.mask()) {
            if !inside {
                *v = 0.0;
            }
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(&Point) -> f64) -> Self {
        let spec = domain.spec();
        let values = domain
            .mask()
            .iter()
            .enumerate()
            .map(|(i, &inside)| if inside { f(&spec.center(i)) } else { 0.0 })
            .collect();
        Self { domain, values }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    /// Dense values; outside cells are zero.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.domain.spec().cell_volume()
    }

    /// Average over the domain; `None` on an empty domain.
    pub fn mean(&self) -> Option<f64> {
        let n = self.domain.count_inside();
        (n > 0).then(|| self.values.iter().sum::<f64>() / n as f64)
    }

    /// Average over the sub-domain `e` (same grid, contained in the domain).
    pub fn mean_over(&self, e: &GridDomain) -> Result<f64> {
        if e.spec() != self.domain.spec() {
            return Err(LabError::Mismatch("averaging set lives on another grid".into()));
        }
        let mut sum = 0.0;
        let mut n = 0usize;
        for i in e.inside_cells() {
            if !self.domain.is_inside(i) {
                return Err(LabError::InvalidArgument("averaging set leaves the domain".into()));
            }
            sum += self.values[i];
            n += 1;
        }
        if n == 0 {
            return Err(LabError::InvalidArgument("averaging set is empty".into()));
        }
        Ok(sum / n as f64)
    }

    /// `∫ |u|^p` as an `h^N`-weighted sum.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        let vol = self.domain.spec().cell_volume();
        self.domain.inside_cells().map(|i| self.values[i].abs().powf(p)).sum::<f64>() * vol
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        let values =
            self.values.iter().zip(self.domain.mask()).map(|(&v, &inside)| if inside { f(v) } else { 0.0 }).collect();
        Self { domain: self.domain.clone(), values }
    }

    pub fn scaled(&self, alpha: f64) -> ScalarField {
        self.map(|v| alpha * v)
    }
}
