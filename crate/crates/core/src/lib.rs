//! Grid experiments on Poincaré constants of uniform domains and the
//! hypotheses behind them.

pub mod clarke;
pub mod discrete;
pub mod edt;
pub mod error;
pub mod field;
pub mod generators;
pub mod grid;
pub mod hypotheses;
pub mod morphology;
pub mod poincare;
pub mod rng;
pub mod stats;

pub use error::{LabError, Result};
pub use field::ScalarField;
pub use grid::{GridDomain, GridSpec, Point};
