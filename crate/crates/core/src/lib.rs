//! Charge qubit coupled to a cavity mode: exact numerics, transformed-frame
//! evolution, the analytic inversion series and revival analysis.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod inversion;
pub mod operator_algebra;
#[cfg(test)]
mod properties;
pub mod scalar;
pub mod scenario;
pub mod validation;

pub use analysis::{RevivalConfig, RevivalReport};
pub use dynamics::{EvolutionResult, Method, TimeGrid};
pub use error::{Error, Result};
pub use inversion::SeriesConfig;
pub use hamiltonians::{CircuitParams, Resonance, ResonanceReport, SystemParams};
pub use operator_algebra::{FockCutoff, OperatorMatrix, QubitState, Space, SpaceTag, Spectrum, StateVector};
pub use scalar::Real;
pub use scenario::Scenario;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type Operator = OperatorMatrix<f64>;
pub type State = StateVector<f64>;
pub type Params = SystemParams<f64>;
pub type Grid = TimeGrid<f64>;
pub type Evolution = EvolutionResult<f64>;
