use thiserror::Error;

/// Errors raised by the solvers and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("polygon vertices are not in convex position")]
    NonConvex,

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("point ({x}, {y}) lies outside the strip |y| < {limit}")]
    OutOfDomain { x: f64, y: f64, limit: f64 },

    #[error("fixed-point iteration is not contracting (distance {previous:e} -> {current:e} at iteration {iteration})")]
    NotContracting { iteration: usize, previous: f64, current: f64 },

    #[error("inner integral reached {value} at r = {radius}; the inverse map needs |y| < 1")]
    InverseDomain { radius: f64, value: f64 },

    #[error("step {step} exceeds R/100 = {limit}")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("|u'| exceeded 1e8 at r = {radius}")]
    BlowUp { radius: f64 },

    #[error("field does not match the grid: {0}")]
    MaskMismatch(String),

    #[error("Newton stalled at t = {t}, mu = {mu}: residual {residual:e} after {iterations} iterations")]
    NewtonStalled { t: f64, mu: f64, residual: f64, iterations: usize },

    #[error("sparse factorization failed: {0}")]
    LinearSolveSingular(String),

    #[error("lift on disk centre ({cx}, {cy}) radius {radius} failed: {source}")]
    SubSolveFailed { cx: f64, cy: f64, radius: f64, source: Box<Error> },

    #[error("boundary function is not convex near x = {x}")]
    NotConvex { x: f64 },

    #[error("no convergence after {sweeps} sweeps (last sup-change {last_change:e})")]
    NoConvergence { sweeps: usize, last_change: f64 },

    #[error("domain half-width {half_width} is not below pi/2")]
    NotInStrip { half_width: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("no barrier on the ladder; condition {condition} failed last")]
    NoBarrierFound { condition: String },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
