use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// Variants are grouped loosely by the module that raises them; the CLI maps
/// [`LabError::is_validation`] errors to exit code 1 and everything else to 2.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("edge {index} ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { index: usize, u: usize, v: usize, n: usize },
    #[error("edge {index} ({u}, {v}) duplicates edge {first}")]
    DuplicateEdge { index: usize, first: usize, u: usize, v: usize },
    #[error("edge {index} ({u}, {v}) has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, u: usize, v: usize, weight: f64 },
    #[error("edge {index} is a self-loop at vertex {u}")]
    SelfLoop { index: usize, u: usize },
    #[error("graph is disconnected: vertex {a} cannot reach vertex {b}")]
    Disconnected { a: usize, b: usize },
    #[error("vertex {vertex} is not in the graph (n = {n})")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "boundary guard: {steps} steps need 3*n^(1/d_w) = {required:.1} hops of clearance but the start is {available} hops from the boundary; use a graph at least {suggested} hops across"
    )]
    GuardViolation { steps: u64, required: f64, available: usize, suggested: usize },
    #[error("memory budget exceeded: need about {required} bytes, budget is {budget}")]
    MemoryBudget { required: usize, budget: usize },
    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("state space too large for exact search: {0}")]
    TooLarge(String),
    #[error("subgraph is not connected")]
    SubgraphDisconnected,
    #[error("fit window has {points} points, at least 4 are required")]
    ShortWindow { points: usize },
    #[error("width cutoff {0} exceeds the supported maximum of 512")]
    WidthCutoff(usize),
}

impl LabError {
    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            LabError::Io { .. } | LabError::NoConvergence { .. } | LabError::MemoryBudget { .. }
        )
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        LabError::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
