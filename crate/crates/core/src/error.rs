//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong when building or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// A basis-state name that is not one of `H`, `V`, `D`, `A`.
    #[error("unknown basis state `{0}` (expected one of H, V, D, A)")]
    UnknownBasis(String),

    /// A propagation distance that is negative, NaN, or infinite.
    #[error("propagation distance must be finite and non-negative, got {0}")]
    InvalidDistance(f64),

    /// A scalar parameter outside its documented domain.
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// A power transmission outside (0, 1]; its logarithm would not yield a
    /// meaningful loss rate.
    #[error("transmission must lie in (0, 1], got {0}")]
    InvalidTransmission(f64),

    /// A lattice state whose length does not match the Hamiltonian it is
    /// propagated under.
    #[error("lattice state has {state} sites but the Hamiltonian has {hamiltonian}")]
    DimensionMismatch { state: usize, hamiltonian: usize },

    /// Visibility is a ratio against the distinguishable coincidence rate and
    /// is undefined when that rate vanishes.
    #[error("visibility is undefined: the distinguishable coincidence rate is zero")]
    UndefinedVisibility,

    /// No polarizer sample constrains the phase, so the fit cannot proceed.
    #[error("phase is unidentifiable: every sample has sin\u{b2}(2\u{3c6}) \u{2248} 0")]
    UnidentifiablePhase,

    /// A sweep axis with no points.
    #[error("{0} axis must contain at least one point")]
    EmptyAxis(&'static str),

    /// Malformed input that does not fit a more specific variant (counts,
    /// sample tables, CSV rows).
    #[error("{0}")]
    InvalidInput(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
