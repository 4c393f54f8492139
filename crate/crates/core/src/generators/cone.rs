use crate::error::{LabError, Result};
use crate::grid::Point;
use serde::Serialize;

/// A finite open circular cone: apex, unit axis, half-aperture and height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeSpec {
    pub apex: Point,
    pub axis: Point,
    pub half_aperture: f64,
    pub height: f64,
}

impl ConeSpec {
    pub fn new(apex: Point, axis: Point, half_aperture: f64, height: f64) -> Result<Self> {
        if !(half_aperture > 0.0 && half_aperture < std::f64::consts::FRAC_PI_2) {
            return Err(LabError::InvalidArgument(format!("half-aperture {half_aperture} not in (0, pi/2)")));
        }
        if !(height > 0.0) {
            return Err(LabError::InvalidArgument(format!("cone height {height} <= 0")));
        }
        let n = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(LabError::InvalidArgument("cone axis is zero".into()));
        }
        let axis = [axis[0] / n, axis[1] / n, axis[2] / n];
        Ok(Self { apex, axis, half_aperture, height })
    }

    /// Shape-only cone (apex at the origin, axis e_1) used as the reference
    /// cone of the interior cone condition.
    pub fn reference(half_aperture: f64, height: f64) -> Result<Self> {
        Self::new([0.0; 3], [1.0, 0.0, 0.0], half_aperture, height)
    }

    pub fn contains(&self, y: &Point) -> bool {
        let d = [y[0] - self.apex[0], y[1] - self.apex[1], y[2] - self.apex[2]];
        let s = d[0] * self.axis[0] + d[1] * self.axis[1] + d[2] * self.axis[2];
        if !(s > 0.0 && s < self.height) {
            return false;
        }
        let lat = [d[0] - s * self.axis[0], d[1] - s * self.axis[1], d[2] - s * self.axis[2]];
        let r = (lat[0] * lat[0] + lat[1] * lat[1] + lat[2] * lat[2]).sqrt();
        r < self.half_aperture.tan() * s
    }

    /// Volume in dimension `dim` (a triangle in 2D).
    pub fn volume(&self, dim: usize) -> f64 {
        let base = self.half_aperture.tan() * self.height;
        match dim {
            2 => base * self.height,
            _ => std::f64::consts::PI * base * base * self.height / 3.0,
        }
    }
}
