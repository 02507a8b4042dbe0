use thiserror::Error;

use crate::model::GraphDiagonalState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The post-selected branch has (numerically) zero probability.
    #[error("degenerate input: success probability {norm:e} is below the cutoff")]
    Degenerate { norm: f64 },

    /// Fixed-point iteration did not settle; carries the last iterate.
    #[error("no convergence after {iterations} iterations (last fidelity {:.6})", last.fidelity())]
    NonConvergence {
        iterations: usize,
        last: GraphDiagonalState,
    },

    #[error("dense oracle: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
