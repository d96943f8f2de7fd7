//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by seal construction, linear algebra, attack simulation,
/// and the POVM optimizer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {off_diag:.3e})")]
    NoConvergence { sweeps: usize, off_diag: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("q_max must lie in (0, 1], got {0}")]
    QmaxOutOfRange(f64),

    #[error("scheme has q_max = 0: the two sealed states are indistinguishable")]
    QmaxZero,

    #[error("q must lie in [0, q_max = {q_max}], got {q}")]
    QOutOfRange { q: f64, q_max: f64 },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("guessing requires a two-outcome measurement, got {0} outcomes")]
    WrongOutcomeCount(usize),

    #[error("measurement operators are too close to singular to renormalize (min eigenvalue {0:.3e})")]
    SingularRetraction(f64),

    #[error("no restart met the information-gain constraint |q - {q_target}| <= {tolerance:.1e}; closest was {closest:.3e} away")]
    NoFeasiblePoint {
        q_target: f64,
        tolerance: f64,
        closest: f64,
    },

    #[error("fidelity bound violated at q = {q}: measured {best_fbar} > bound {bound} + 1e-6")]
    BoundViolation {
        q: f64,
        best_fbar: f64,
        bound: f64,
        povm: Box<crate::attack::Povm>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error in scheme file: {0}")]
    Parse(String),

    #[error("state in scheme file is not normalized (norm {0})")]
    NormalizationError(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
