//! Weakly end-coupled XY spin chains via free fermions.
//!
//! This crate computes two-site quantum correlations (quantum discord,
//! classical correlation, mutual information, concurrence) and energy gaps
//! in finite XY spin chains whose two edge spins couple to the bulk through
//! weak bonds (λ₁ for the x spin component, λ₂ for y). The chain Hamiltonian
//! is quadratic after a Jordan-Wigner transformation, so everything reduces
//! to dense linear algebra on a pair of N×N coupling matrices instead of the
//! 2^N many-body problem.
//!
//! The pipeline is
//!
//! ```text
//! ChainSpec -> QuadraticForm -> FermionSpectrum -> CorrelationMatrix
//!           -> TwoSiteCorrelators -> CorrelationMeasures
//! ```
//!
//! built from [`chain`], [`fermion`], [`correlators`] and [`qinfo`].
//! [`freezing`] runs λ₁ sweeps over that pipeline and detects the freezing
//! length, frozen discord value, entanglement sudden death, the anisotropy
//! order parameter and the thermal critical temperature. [`oracle`] is an
//! independent brute-force check: full 2^N exact diagonalization, partial
//! traces, measurement-grid discord and Wootters concurrence, used to
//! arbitrate every formula the fast path relies on.
//!
//! All couplings are in units of the bulk energy scale κ = 1, temperatures
//! in κ/k_B, discord-like measures in bits, concurrence in ebits.

pub mod chain;
pub mod correlators;
pub mod fermion;
pub mod freezing;
pub mod oracle;
pub mod qinfo;

pub use chain::{build_quadratic_form, Boundary, ChainSpec, QuadraticForm, Temperature};
pub use correlators::{
    bell_state, end_to_end_correlators, pair_correlators, BellDiagonalState, TwoSiteCorrelators,
};
pub use fermion::{correlation_matrix, diagonalize, energy_gap, CorrelationMatrix, FermionSpectrum};
pub use freezing::{
    anisotropy_scan, detect_freezing, evaluate_end_pair, gap_freezing, linear_fit, sweep,
    thermal_scan, AnisotropyReport, FreezeDetection, FreezingReport, GapFreezeReport, Grid,
    SweepContext, SweepPoint, SweepResult, ThermalReport, ThermalScanConfig, ThermalTolerance,
};
pub use qinfo::{measures, CorrelationMeasures};

/// Errors produced by chain construction, the solver and the analysis layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("singular value decomposition did not converge")]
    SvdConvergence,
    #[error("site pair ({i}, {j}) out of range for a chain of {n} spins")]
    SiteRange { i: usize, j: usize, n: usize },
    #[error("end-to-end correlators are defined for open chains only")]
    ClosedChain,
    #[error("(A - B) is numerically singular: the instance is gapless or degenerate; perturb the couplings")]
    SingularQuadraticForm,
    #[error("Bell eigenvalue {value} outside [0, 1]: correlators are inconsistent")]
    InconsistentCorrelators { value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too coarse for freezing detection: step {step} exceeds {max_step}")]
    GridTooCoarse { step: f64, max_step: f64 },
    #[error("sweep failed at lambda1 = {lambda1}: {source}")]
    SweepPoint {
        lambda1: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("exact diagonalization is limited to {max} spins, got {n}")]
    OracleTooLarge { n: usize, max: usize },
    #[error("invalid temperature: {0}")]
    InvalidTemperature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
