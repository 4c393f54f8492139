//! The batch experiments. Each one reads every key it uses, rejects the
//! rest, then computes.

mod audit;
mod clarke;
mod constants;

use crate::config::Config;
use crate::output::Outcome;
use anyhow::Result;
use poincare_lab::generators::{make_named, Params};
use poincare_lab::GridDomain;

pub struct Ctx {
    pub seed: u64,
    pub jobs: usize,
}

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub run: fn(&Config, &Ctx) -> Result<Outcome>,
}

pub const ALL: &[Experiment] = &[
    Experiment {
        name: "hypotheses-audit",
        about: "R, cone condition, erosion connectivity and boundary layer for named families",
        run: audit::hypotheses_audit,
    },
    Experiment {
        name: "property-q",
        about: "boundary-layer measure against delta with a line fit",
        run: audit::property_q,
    },
    Experiment {
        name: "poincare-sweep",
        about: "Poincare constants over families, spacings and exponents",
        run: constants::poincare_sweep,
    },
    Experiment {
        name: "dumbbell-blowup",
        about: "witness energy and constant growth as the dumbbell neck closes",
        run: constants::dumbbell_blowup,
    },
    Experiment {
        name: "tube-family",
        about: "annulus identities and cone condition for tubes K_r",
        run: audit::tube_family,
    },
    Experiment {
        name: "average-scaling",
        about: "sup ratio over averages on balls E against the |E| law",
        run: constants::average_scaling,
    },
    Experiment {
        name: "clarke-band",
        about: "directional derivative of the interface distance in the boundary band",
        run: clarke::clarke_band,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    ALL.iter().find(|e| e.name == name)
}

/// Family parameters come from `<family>.<param>` keys.
pub(crate) fn family_params(cfg: &Config, family: &str) -> Result<Params> {
    Ok(Params::parse(&cfg.group(family))?)
}

pub(crate) fn build(family: &str, params: &Params, h: f64) -> Result<GridDomain> {
    Ok(make_named(family, params, h)?)
}

/// `k·h` for `k = 0..=steps`.
pub(crate) fn layer_deltas(h: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 * h).collect()
}
