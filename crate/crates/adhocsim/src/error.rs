use thiserror::Error;

/// Errors produced by simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A root search or probability search did not reach its target.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A bracketing solver found no sign change over `[lo, hi]`.
    #[error("no sign change in bracket [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    /// A flow could not be routed over non-empty cells.
    #[error("routing failed for flow {flow}: no path over non-empty cells")]
    RoutingFailure { flow: usize },

    /// A transmitter-receiver pair exceeds the transmission radius.
    #[error("link {index} has length {dist} exceeding the transmission radius {radius}")]
    InfeasibleLink { index: usize, dist: f64, radius: f64 },

    /// Rate is undefined because no cell carries any traffic.
    #[error("achieved rate undefined: all cell loads are zero")]
    UndefinedRate,
}

pub type Result<T> = std::result::Result<T, Error>;
