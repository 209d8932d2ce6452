//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// An input that must be strictly positive was not.
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// Polarizability diagonal not supplied in ascending order.
    #[error("polarizability diagonal must satisfy 0 <= a11 <= a22 <= a33, got ({a11}, {a22}, {a33})")]
    UnsortedPolarizability { a11: f64, a22: f64, a33: f64 },

    /// All integrated polarizabilities vanish.
    #[error("degenerate particle: integrated polarizability trace is zero")]
    DegenerateParticle,

    /// Anisotropy parameters outside the physical domain
    /// 0 <= gamma_s < 1, 0 <= gamma_a <= min(gamma_s, 1 - gamma_s).
    #[error("gamma parameters out of domain: gamma_s = {gamma_s}, gamma_a = {gamma_a}")]
    GammaOutOfDomain { gamma_s: f64, gamma_a: f64 },

    /// A corrugation profile failed validation.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// A quadrature specification failed validation.
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    /// Quadrature or extrapolation did not reach the requested tolerance.
    #[error("failed to converge: achieved error estimate {achieved:.3e}, required {required:.3e}")]
    Convergence { achieved: f64, required: f64 },

    /// The origin curvature keeps one sign over the whole width bracket, so
    /// no critical width exists at this anisotropy.
    #[error(
        "origin curvature does not change sign for d/z0 in [{lo}, {hi}] at gamma_s = {gamma_s}; \
         no critical width (gamma_s below the family threshold)"
    )]
    NoSignChange { gamma_s: f64, lo: f64, hi: f64 },

    /// The corrugation curvature overwhelms the harmonic trap.
    #[error("trap destabilized: omega_trap^2 + U''/m = {omega_sq_eff:.3e} < 0")]
    TrapDestabilized { omega_sq_eff: f64 },

    /// A numerical sanity check failed (sign scans, residues).
    #[error("numerical check failed: {0}")]
    Numerical(String),

    /// Generic argument validation failure.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
