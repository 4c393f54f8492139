use crate::error::{LabError, Result};
use crate::grid::{GridDomain, GridSpec, Point};
use crate::morphology::{connected_components, dilate};

/// Cells containing some point of the polyline, sampled at pitch h/8.
pub fn rasterize_polyline(spec: &GridSpec, vertices: &[Point]) -> Result<GridDomain> {
    if vertices.is_empty() {
        return Err(LabError::InvalidArgument("polyline has no vertices".into()));
    }
    let mut cells = Vec::new();
    let mut mark = |p: &Point| -> Result<()> {
        let c = spec.locate(p).ok_or_else(|| LabError::InvalidArgument("polyline leaves the grid".into()))?;
        cells.push(c);
        Ok(())
    };
    mark(&vertices[0])?;
    for w in vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = crate::edt::point_distance(&a, &b);
        let steps = ((len / (spec.h() / 8.0)).ceil() as usize).max(1);
        for s in 1..=steps {
            let t = s as f64 / steps as f64;
            mark(&[a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])])?;
        }
    }
    Ok(GridDomain::empty(spec.clone()).with_cells(cells))
}

/// `K_r = {x : d(x, K) < r}` for a connected seed `K`.
pub fn make_tube(k_cells: &GridDomain, r: f64) -> Result<GridDomain> {
    let components = connected_components(k_cells).count;
    if components != 1 {
        return Err(LabError::DisconnectedSeed { components });
    }
    dilate(k_cells, r)
}

/// Built-in connected seeds in 2D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeSeed {
    Point,
    Segment,
    LPolyline,
}

impl TubeSeed {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "point" => Ok(Self::Point),
            "segment" => Ok(Self::Segment),
            "L" | "l" | "lpolyline" => Ok(Self::LPolyline),
            other => Err(LabError::UnknownFamily(format!("tube seed `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Point => "point",
            Self::Segment => "segment",
            Self::LPolyline => "L",
        }
    }

    pub fn vertices(self) -> Vec<Point> {
        match self {
            Self::Point => vec![[0.0; 3]],
            Self::Segment => vec![[0.0; 3], [1.0, 0.0, 0.0]],
            Self::LPolyline => vec![[0.0, 1.0, 0.0], [0.0; 3], [1.0, 0.0, 0.0]],
        }
    }

    /// Seed rasterized on a center-aligned grid with room for radius `r`.
    pub fn rasterize(self, h: f64, r: f64) -> Result<GridDomain> {
        let v = self.vertices();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &v {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let margin = (r / h).ceil() as usize + 3;
        let spec = GridSpec::aligned(&lo, &hi, h, margin)?;
        rasterize_polyline(&spec, &v)
    }
}
