use thiserror::Error;

/// Errors produced by the lab's geometry, hypothesis and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate indicator: grid has no inside/outside boundary")]
    DegenerateIndicator,
    #[error("grid too small: dilation by {radius} leaves the bounding box")]
    GridTooSmall { radius: f64 },
    #[error("neck under-resolved: h = {h} exceeds eps/4 = {limit}")]
    NeckUnderResolved { h: f64, limit: f64 },
    #[error("not in Lip(M,gamma): sampled slope {slope} exceeds M = {m}")]
    NotLipschitz { slope: f64, m: f64 },
    #[error("K must be connected (found {components} components)")]
    DisconnectedSeed { components: usize },
    #[error("unknown domain family `{0}`")]
    UnknownFamily(String),
    #[error("constant function: gradient energy vanishes")]
    ConstantFunction,
    #[error("lambda_1 = 0: domain disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("cone under-resolved: height {height} < 4h = {limit}")]
    ConeUnderResolved { height: f64, limit: f64 },
    #[error("insufficient margin: sample point leaves the grid")]
    InsufficientMargin,
    #[error("mismatched field: {0}")]
    Mismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
