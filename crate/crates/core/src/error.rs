use thiserror::Error;

use crate::operator_algebra::SpaceTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),

    #[error("Fock cutoff n_max = {n_max} too small for amplitude {amplitude:.4}: need at least {required:.1} (override with allow_small_cutoff)")]
    CutoffTooSmall {
        n_max: usize,
        amplitude: f64,
        required: f64,
    },

    #[error("expected a {expected:?} operand, found {found:?}")]
    SpaceMismatch { expected: SpaceTag, found: SpaceTag },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("Hermitian eigendecomposition did not converge (dim {dim})")]
    Eigendecomposition { dim: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("coupling beta is zero: the transformed-frame evolution divides by |beta|; use the plain JCM numeric path instead")]
    ZeroCoupling,

    #[error("the closed-form inversion requires a real beta, got imaginary part {imag:.3e}; use the operator path for complex beta")]
    ComplexBeta { imag: f64 },

    #[error("inversion series not converged after {terms} terms (Poisson mass {mass:.3e}); |alpha - beta| too large for the series config")]
    SeriesNotConverged { terms: usize, mass: f64 },

    #[error("imaginary residue {residue:.3e} in inversion sample at tau = {tau}")]
    ComplexInversion { tau: f64, residue: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("envelope window {window} must exceed the grid spacing {spacing}")]
    WindowTooSmall { window: f64, spacing: f64 },

    #[error("trace spans tau <= {span}, shorter than the required {required}")]
    TraceTooShort { span: f64, required: f64 },
}
