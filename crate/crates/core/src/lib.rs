//! Numerical toolkit for quantum channels built from bipartite unitary
//! dilations: Kraus extraction, unitality verdicts via two independent
//! routes (direct `Φ(1)` and reservoir-averaged block commutators), von
//! Neumann entropy bookkeeping, and two worked qubit scenarios (a quantum
//! Maxwell demon cycle and a two-qubit heating/cooling swap).

pub mod channel;
pub mod cli;
pub mod linalg;
pub mod sampler;
pub mod scenarios;
pub mod state;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix shapes incompatible with the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A domain invariant (hermiticity, positivity, unitarity, trace) failed.
    #[error("validation failed: {0}")]
    Validation(String),
    /// Out-of-range or otherwise unusable argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use channel::{
    BipartiteUnitary, BlockDecomposition, KrausChannel, UnitalityMethod, UnitalityReport,
};
pub use linalg::{Complex64, ComplexMatrix, DimensionSplit, Subsystem};
pub use sampler::{EnvMode, SamplerSeed, SweepResult};
pub use scenarios::{DemonConfig, ScenarioReport};
pub use state::DensityMatrix;
