use thiserror::Error;

use crate::symexpr::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sample point was inside the domain of either expression")]
    NoValidSamples,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl From<EvalError> for SymError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnboundSymbol(s) => SymError::UnboundSymbol(s),
            EvalError::Domain(m) => SymError::Domain(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("symbol `{0}` is used by more than one factor")]
    SymbolCollision(String),
    #[error("unbound symbol `{0}` (not a chart coordinate or parameter)")]
    UnboundSymbol(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("metric is not symmetric: g[{0}][{1}] differs from g[{1}][{0}]")]
    NotSymmetric(usize, usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dense metric block of size {size} exceeds the supported maximum {max}")]
    TooLarge { size: usize, max: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no sample point of the chart domain was valid")]
    NoValidSamples,
}

impl From<EvalError> for GeoError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnboundSymbol(s) => GeoError::UnboundSymbol(s),
            EvalError::Domain(m) => GeoError::Domain(m),
        }
    }
}

impl From<SymError> for GeoError {
    fn from(e: SymError) -> Self {
        match e {
            SymError::UnboundSymbol(s) => GeoError::UnboundSymbol(s),
            SymError::Domain(m) => GeoError::Domain(m),
            SymError::NoValidSamples => GeoError::NoValidSamples,
            SymError::Parse(p) => GeoError::InvalidChart(p.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarpError {
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error("obstruction rank {rank} must exceed the underlying fiber dimension {dim}")]
    RankTooSmall { dim: usize, rank: usize },
    #[error("warping function is not positive: f = {value} at a sampled point")]
    NonPositiveWarp { value: f64 },
    #[error("fiber dimension {0} is too small; the curvature formulas need d >= 2")]
    FiberTooSmall(usize),
    #[error("warping function {which} uses symbol `{symbol}` outside its own factor")]
    WarpSymbols { which: &'static str, symbol: String },
    #[error("invalid fiber: {0}")]
    InvalidFiber(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EinsteinError {
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Warp(#[from] WarpError),
    #[error("n - d = {excess} > 0 requires d = n' but d = {d}, n' = {n_prime}")]
    RegimeMismatch { excess: i64, d: usize, n_prime: usize },
    #[error("no sample point of the chart domain was valid")]
    NoValidSamples,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("classification needs a passing PNDP system check: {0}")]
    NotValidated(String),
    #[error("type II projection needs dim of the Einstein factor ({tilde}) to equal n - d ({excess})")]
    DimensionMismatch { tilde: usize, excess: i64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpacetimeError {
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("throat undefined: {0}")]
    ThroatUndefined(String),
}
