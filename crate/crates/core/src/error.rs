use thiserror::Error;

/// Errors raised by the cloning model and its numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument lies outside its admissible domain.
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        /// Argument name.
        name: &'static str,
        /// Offending value.
        value: f64,
        /// Admissible domain.
        reason: &'static str,
    },
    /// A covariance matrix violates the uncertainty relation or positivity.
    #[error("unphysical covariance matrix (determinant {det}, minimum diagonal {min_diag})")]
    Unphysical {
        /// Determinant of the offending 2×2 block.
        det: f64,
        /// Smallest diagonal entry.
        min_diag: f64,
    },
    /// A two-mode covariance matrix is not positive definite.
    #[error("two-mode covariance matrix is not positive definite")]
    NotPositiveDefinite,
    /// A matrix that must be inverted is singular.
    #[error("singular matrix (determinant {0})")]
    Singular(f64),
    /// A matrix expected to be symmetric is not.
    #[error("matrix is not symmetric (asymmetry {0})")]
    NotSymmetric(f64),
    /// A computed fidelity exceeds one beyond round-off.
    #[error("fidelity {0} exceeds 1")]
    FidelityOutOfRange(f64),
    /// Mode index other than 1 or 2.
    #[error("invalid mode index {0}, expected 1 or 2")]
    InvalidMode(usize),
    /// The cloner is not at its unity-gain operating point.
    #[error("configuration is not unity gain (tau2 = {tau2}, g = {g}, expected g = {expected})")]
    NotUnityGain {
        /// Second beam-splitter transmissivity.
        tau2: f64,
        /// Configured gain.
        g: f64,
        /// Unity gain for the configured first transmissivity.
        expected: f64,
    },
    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: error estimate {achieved:e} > requested {requested:e}")]
    QuadratureNonConvergence {
        /// Error estimate at termination.
        achieved: f64,
        /// Requested absolute error.
        requested: f64,
    },
    /// The optimizer could not bracket a maximum.
    #[error("optimizer failed to bracket a maximum on [{lo}, {hi}]")]
    BracketFailure {
        /// Lower end of the search interval.
        lo: f64,
        /// Upper end of the search interval.
        hi: f64,
    },
    /// The Fock truncation loses more probability than allowed.
    #[error("Fock truncation at dimension {dim} leaks {leakage:e} of the trace")]
    InsufficientTruncation {
        /// Truncation dimension.
        dim: usize,
        /// Trace deficit.
        leakage: f64,
    },
    /// Operands have incompatible Fock dimensions.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    /// A density matrix has a negative eigenvalue beyond round-off.
    #[error("density matrix has eigenvalue {0} below tolerance")]
    NegativeEigenvalue(f64),
    /// The outcome grid of the Fock channel is too coarse.
    #[error("outcome grid too coarse: channel trace {0}")]
    GridTooCoarse(f64),
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
