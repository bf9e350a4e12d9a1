//! Floquet spectroscopy of periodically driven two-level systems.
//!
//! This crate computes quasienergies, Floquet modes, and steady-state
//! resonance-fluorescence spectra of a two-level system driven by an
//! arbitrary periodic signal and weakly coupled to multiple dissipative
//! baths. The driving is treated exactly (Sambe-space diagonalization or,
//! for a single harmonic, the CHRW unitary transformation), the baths to
//! second order through a secular master equation in the Floquet basis.
//!
//! All frequencies and rates are dimensionless, expressed in units of the
//! bare level splitting (`omega0 = 1` by convention).
//!
//! The main pipeline is
//!
//! 1. [`driving`] — describe the periodic drive,
//! 2. [`floquet`] — solve for quasienergies and mode Fourier tables,
//!    or [`chrw`] for the analytic single-harmonic solution,
//! 3. [`bath`] + [`rates`] — relaxation/dephasing rates and steady
//!    Floquet-state populations,
//! 4. [`spectrum`] — line catalog (coherent deltas + Lorentzians) and
//!    sampled intensity,
//! 5. [`resonance`] — locate (multi-photon) resonances from the
//!    time-averaged transition probability.

pub mod bath;
pub mod chrw;
pub mod config;
pub mod driving;
pub mod figures;
pub mod floquet;
pub mod output;
pub mod rates;
pub mod resonance;
pub mod run;
pub mod special;
pub mod spectrum;

use thiserror::Error;

/// Errors produced by solvers and the configuration layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("driving frequency must be positive (got {0})")]
    NonPositiveFrequency(f64),
    #[error("invalid driving: {0}")]
    InvalidDriving(String),
    #[error("truncation n_max={n_max} is smaller than the highest harmonic index {max_harmonic}")]
    TruncationTooSmall { n_max: usize, max_harmonic: usize },
    #[error(
        "Floquet expansion not converged: boundary weight {achieved:.3e} exceeds {tolerance:.1e} at n_max={n_max}"
    )]
    TruncationNotConverged {
        achieved: f64,
        tolerance: f64,
        n_max: usize,
    },
    #[error("fewer than two quasienergies in the first zone (found {0})")]
    ModeSelectionFailed(usize),
    #[error("one-period propagator drifted from unitarity by {drift:.3e}; increase steps")]
    NonUnitaryPropagator { drift: f64 },
    #[error(
        "self-consistency equation has no sign change on [0,1]: residual {res_lo:.3e} at xi=0, {res_hi:.3e} at xi=1"
    )]
    XiBracketFailure { res_lo: f64, res_hi: f64 },
    #[error("empty bath list")]
    EmptyBathList,
    #[error(
        "transition-table range too small: outermost shell contributes {contribution:.3e} of the rate sum"
    )]
    RateSumNotConverged { contribution: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonPositiveFrequency(_)
            | Error::InvalidDriving(_)
            | Error::InvalidConfig(_)
            | Error::EmptyBathList
            | Error::TruncationTooSmall { .. } => 2,
            Error::TruncationNotConverged { .. }
            | Error::ModeSelectionFailed(_)
            | Error::NonUnitaryPropagator { .. }
            | Error::XiBracketFailure { .. }
            | Error::RateSumNotConverged { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}
