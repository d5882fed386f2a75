//! A qubit starting in `|e⟩` with the cavity in a coherent state, run through
//! any of the evolution routes with consistent metadata.

use nalgebra::Complex;

use crate::dynamics::{evolve_numeric, evolve_transformed, EvolutionResult, Method, TimeGrid};
use crate::error::Result;
use crate::hamiltonians::{build_full_hamiltonian, build_jcm_hamiltonian, build_two_photon_hamiltonian, SystemParams};
use crate::inversion::{analytic_inversion, SeriesConfig};
use crate::operator_algebra::{coherent_state, FockCutoff, QubitState, StateVector};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T: Real> {
    pub params: SystemParams<T>,
    pub alpha: Complex<T>,
    pub cutoff: FockCutoff,
    pub allow_small_cutoff: bool,
    pub series: SeriesConfig,
}

impl<T: Real> Scenario<T> {
    pub fn new(params: SystemParams<T>, alpha: Complex<T>, cutoff: FockCutoff) -> Self {
        Self {
            params,
            alpha,
            cutoff,
            allow_small_cutoff: false,
            series: SeriesConfig::default(),
        }
    }

    pub fn allow_small_cutoff(mut self, allow: bool) -> Self {
        self.allow_small_cutoff = allow;
        self
    }

    /// `|g|`, or 1 when there is no coupling so that `τ = t`.
    pub fn time_scale(&self) -> T {
        let g = self.params.coupling_magnitude();
        if g > T::zero() {
            g
        } else {
            T::one()
        }
    }

    pub fn grid(&self, tau_max: T, n_points: usize) -> Result<TimeGrid<T>> {
        TimeGrid::uniform(tau_max, n_points, self.time_scale())
    }

    pub fn initial_state(&self) -> Result<StateVector<T>> {
        let field = coherent_state(self.alpha, self.cutoff, self.allow_small_cutoff)?;
        StateVector::product(QubitState::Excited, &field)
    }

    /// Mean photon number that sets the revival timescale of `method`.
    pub fn mean_photon(&self, method: Method) -> T {
        match method {
            Method::JcmNumeric | Method::TwoPhotonNumeric | Method::Numeric => self.alpha.norm_sqr(),
            Method::FullNumeric | Method::TransformedAnalytic | Method::AnalyticSeries => {
                (self.alpha - self.params.beta).norm_sqr()
            }
        }
    }

    pub fn run(&self, method: Method, grid: &TimeGrid<T>) -> Result<EvolutionResult<T>> {
        self.params.validate()?;
        let result = match method {
            Method::AnalyticSeries => return analytic_inversion(self.alpha, &self.params, grid, &self.series),
            Method::TransformedAnalytic => evolve_transformed(&self.params, &self.initial_state()?, grid, self.cutoff)?,
            Method::FullNumeric | Method::Numeric => {
                let h = build_full_hamiltonian(&self.params, self.cutoff)?;
                evolve_numeric(&h, &self.initial_state()?, grid)?
            }
            Method::JcmNumeric => {
                let h = build_jcm_hamiltonian(&self.params, self.cutoff)?;
                evolve_numeric(&h, &self.initial_state()?, grid)?
            }
            Method::TwoPhotonNumeric => {
                let h = build_two_photon_hamiltonian(&self.params, self.cutoff)?;
                evolve_numeric(&h, &self.initial_state()?, grid)?
            }
        };
        let method = if method == Method::Numeric { Method::FullNumeric } else { method };
        Ok(result
            .with_provenance(method, self.params)
            .with_mean_photon(self.mean_photon(method)))
    }
}
