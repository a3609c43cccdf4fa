//! Dense complex linear algebra for the small Hilbert spaces that appear in
//! the protocol: slit qubits, bipartite toy commitments up to 4x4, and the
//! density operators derived from them.
//!
//! Everything here is immutable after construction. Matrices are stored as
//! `nalgebra::DMatrix<Complex64>` and never exceed [`MAX_DIM`] on a side.

mod density;
mod helstrom;
mod state;
mod unitary;

pub use density::{
    dm_from_state, partial_trace, trace_distance, trace_norm, DensityMatrix, Subsystem,
};
pub use helstrom::{helstrom_success, HelstromMeasurement};
pub use state::{PureState, Slit, SlitState};
pub use unitary::{find_local_unitary, LocalUnitary};

pub use num_complex::Complex64;

use thiserror::Error;

/// Largest Hilbert-space dimension any operation accepts.
pub const MAX_DIM: usize = 16;

/// Numeric tolerances shared by every quantum-core check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Equality of states, reduced states and unitarity.
    pub equality: f64,
    /// Lowest admissible eigenvalue of a density matrix (as `-positivity`).
    pub positivity: f64,
    /// Hermiticity and unit-trace checks on density matrices.
    pub structure: f64,
    /// Accepted deviation of a pure state's norm from one.
    pub normalization: f64,
    /// Schmidt coefficients below this are treated as zero.
    pub degeneracy: f64,
}

pub const TOL: Tolerances = Tolerances {
    equality: 1e-8,
    positivity: 1e-9,
    structure: 1e-9,
    normalization: 1e-6,
    degeneracy: 1e-10,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("priors must be nonnegative and sum to one (got {p0}, {p1})")]
    BadPriors { p0: f64, p1: f64 },
    #[error("reduced states differ (trace distance {distance:e})")]
    ReducedStatesDiffer { distance: f64 },
}

pub type Result<T> = std::result::Result<T, QuantumError>;
