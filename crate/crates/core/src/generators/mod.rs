//! Analytic domain families and test functions, rasterized on request.

mod cone;
mod dumbbell;
mod lip_graph;
mod tube;

pub use cone::ConeSpec;
pub use dumbbell::{dumbbell_grid, dumbbell_resolution, make_dumbbell, make_u_eps, DumbbellSpec};
pub use lip_graph::{lip_graph_grid, make_lip_graph_domain, make_lip_patch_domain, GraphFn, LipGraphSpec};
pub use tube::{make_tube, rasterize_polyline, TubeSeed};

use crate::error::{LabError, Result};
use crate::grid::{GridDomain, GridSpec};
use std::collections::BTreeMap;

/// `key=value` parameters for named families.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.0.insert(key.to_string(), value.to_string());
    }

    /// Parses `a=1,b=2` (also accepts `;` or whitespace separators).
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::new();
        for item in text.split([',', ';', ' ']).map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) =
                item.split_once('=').ok_or_else(|| LabError::Parse(format!("expected key=value, found `{item}`")))?;
            p.insert(k.trim(), v.trim());
        }
        Ok(p)
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| LabError::Parse(format!("{key}: bad number `{v}`"))),
        }
    }

    pub fn get_str<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.0.get(key).map_or(default, String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.0.iter()
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(";"))
    }
}

/// One-line descriptions of the built-in families.
pub const FAMILIES: &[(&str, &str)] = &[
    ("square", "[0,side]^2 (side=1)"),
    ("rectangle", "[0,width]x[0,height] (width=2,height=1)"),
    ("cube", "[0,side]^3 (side=1)"),
    ("ball", "B(0,radius) in dim 2 or 3 (radius=1,dim=2)"),
    ("ball_minus_segment", "unit ball minus the slit [-half,half]x{0} (radius=1,half=0.5)"),
    ("cusp", "{0<x<1,|y|<x^exponent} joined to [1,2]x[-1,1] (exponent=2)"),
    ("dumbbell", "two opposed unit cones with neck half-height eps (eps=0.1), N=3"),
    ("half_box", "Lip patch with phi=0 (gamma=1,dim=2)"),
    ("wedge", "Lip patch with phi=M|x| (m=1,gamma=1,dim=2)"),
    ("lip_patch", "closed perturbed Lip(M,gamma) patch (m=1,gamma=1,seed=0,dim=2)"),
    ("tube", "K_r for K in point|segment|L (k=segment,r=0.25)"),
];

fn dim_param(p: &Params, default: f64) -> Result<usize> {
    let d = p.get_f64("dim", default)?;
    if d == 2.0 || d == 3.0 {
        Ok(d as usize)
    } else {
        Err(LabError::InvalidArgument(format!("dim={d} not in {{2,3}}")))
    }
}

fn boxed(lo: &[f64], hi: &[f64], h: f64) -> Result<GridDomain> {
    let spec = GridSpec::face_aligned(lo, hi, h, 2)?;
    let (lo, hi) = (lo.to_vec(), hi.to_vec());
    Ok(GridDomain::from_fn(spec, move |p| (0..lo.len()).all(|a| p[a] > lo[a] && p[a] < hi[a])))
}

/// Builds a named family member at spacing `h`.
pub fn make_named(name: &str, p: &Params, h: f64) -> Result<GridDomain> {
    match name {
        "square" => {
            let s = p.get_f64("side", 1.0)?;
            boxed(&[0.0, 0.0], &[s, s], h)
        }
        "rectangle" => {
            let w = p.get_f64("width", 2.0)?;
            let t = p.get_f64("height", 1.0)?;
            boxed(&[0.0, 0.0], &[w, t], h)
        }
        "cube" => {
            let s = p.get_f64("side", 1.0)?;
            boxed(&[0.0; 3], &[s; 3], h)
        }
        "ball" => {
            let r = p.get_f64("radius", 1.0)?;
            let dim = dim_param(p, 2.0)?;
            let spec = GridSpec::aligned(&vec![-r; dim], &vec![r; dim], h, 2)?;
            Ok(GridDomain::from_fn(spec, move |x| x.iter().map(|v| v * v).sum::<f64>() < r * r))
        }
        "ball_minus_segment" => {
            let r = p.get_f64("radius", 1.0)?;
            let half = p.get_f64("half", 0.5)?;
            let spec = GridSpec::aligned(&[-r, -r], &[r, r], h, 2)?;
            // The slit row is the row of centers on y = 0.
            Ok(GridDomain::from_fn(spec, move |x| {
                let on_slit = x[1].abs() < h / 2.0 && x[0].abs() <= half;
                x[0] * x[0] + x[1] * x[1] < r * r && !on_slit
            }))
        }
        "cusp" => {
            let e = p.get_f64("exponent", 2.0)?;
            let spec = GridSpec::aligned(&[0.0, -1.0], &[2.0, 1.0], h, 2)?;
            Ok(GridDomain::from_fn(spec, move |x| {
                let tip = x[0] > 0.0 && x[0] < 1.0 && x[1].abs() < x[0].powf(e);
                let block = x[0] >= 1.0 && x[0] < 2.0 && x[1].abs() < 1.0;
                tip || block
            }))
        }
        "dumbbell" => make_dumbbell(&DumbbellSpec::new(p.get_f64("eps", 0.1)?)?, h),
        "half_box" => make_lip_graph_domain(&LipGraphSpec::flat(dim_param(p, 2.0)?, p.get_f64("gamma", 1.0)?)?, h),
        "wedge" => make_lip_graph_domain(
            &LipGraphSpec::wedge(dim_param(p, 2.0)?, p.get_f64("m", 1.0)?, p.get_f64("gamma", 1.0)?)?,
            h,
        ),
        "lip_patch" => make_lip_patch_domain(
            &LipGraphSpec::perturbed(
                dim_param(p, 2.0)?,
                p.get_f64("m", 1.0)?,
                p.get_f64("gamma", 1.0)?,
                p.get_f64("seed", 0.0)? as u64,
            )?,
            h,
        ),
        "tube" => {
            let seed = TubeSeed::parse(p.get_str("k", "segment"))?;
            let r = p.get_f64("r", 0.25)?;
            make_tube(&seed.rasterize(h, r)?, r)
        }
        other => Err(LabError::UnknownFamily(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::{component_count, erode};

    #[test]
    fn square_measure() {
        let d = make_named("square", &Params::new(), 1.0 / 64.0).unwrap();
        assert_eq!(d.measure(), 1.0);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(make_named("teapot", &Params::new(), 0.1), Err(LabError::UnknownFamily(_))));
    }

    #[test]
    fn ball_minus_segment_stays_connected_under_erosion() {
        let h = 1.0 / 128.0;
        let d = make_named("ball_minus_segment", &Params::new(), h).unwrap();
        assert_eq!(component_count(&d), 1);
        assert!(d.measure() < std::f64::consts::PI);
        for k in 1..=10 {
            let delta = 0.02 * k as f64;
            assert_eq!(component_count(&erode(&d, delta).unwrap()), 1, "delta {delta}");
        }
    }

    #[test]
    fn cusp_is_one_piece() {
        let d = make_named("cusp", &Params::new().with("exponent", 2), 1.0 / 64.0).unwrap();
        assert_eq!(component_count(&d), 1);
    }

    #[test]
    fn params_parse() {
        let p = Params::parse("eps=0.1, k=L").unwrap();
        assert_eq!(p.get_f64("eps", 0.0).unwrap(), 0.1);
        assert_eq!(p.get_str("k", ""), "L");
        assert!(Params::parse("novalue").is_err());
    }
}
