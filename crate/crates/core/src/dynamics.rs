//! Time evolution: exact-diagonalization propagation (the numerical oracle)
//! and the transformed-frame composite evolution `T†(t) U_0T(t) U_I(t) T(0)`.

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{build_jcm_hamiltonian, resonance_check, Resonance, SystemParams};
use crate::operator_algebra::{
    annihilation, displacement, hermitian_function, number, pauli, tensor, FockCutoff, OperatorMatrix, Pauli, Space,
    SpaceTag, Spectrum, StateVector,
};
use crate::scalar::{cis, modulus, Real};

/// Ordered grid of scaled times `τ = |g| t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T: Real> {
    tau: Vec<T>,
    g_magnitude: T,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(tau: Vec<T>, g_magnitude: T) -> Result<Self> {
        if tau.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if tau[0] != T::zero() {
            return Err(Error::InvalidGrid(format!("first value must be 0, got {}", tau[0])));
        }
        if tau.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value".into()));
        }
        if tau.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("values must be strictly increasing".into()));
        }
        if !(g_magnitude > T::zero()) || !g_magnitude.is_finite() {
            return Err(Error::InvalidGrid(format!("|g| must be positive, got {g_magnitude}")));
        }
        Ok(Self { tau, g_magnitude })
    }

    /// `n_points` equally spaced values on `[0, tau_max]`.
    pub fn uniform(tau_max: T, n_points: usize, g_magnitude: T) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        if !(tau_max > T::zero()) {
            return Err(Error::InvalidGrid(format!("tau_max must be positive, got {tau_max}")));
        }
        let step = tau_max / T::lit((n_points - 1) as f64);
        let tau = (0..n_points)
            .map(|k| if k + 1 == n_points { tau_max } else { step * T::lit(k as f64) })
            .collect();
        Self::new(tau, g_magnitude)
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn tau(&self) -> &[T] {
        &self.tau
    }

    pub fn g_magnitude(&self) -> T {
        self.g_magnitude
    }

    pub fn tau_max(&self) -> T {
        *self.tau.last().expect("grid is non-empty")
    }

    /// Physical time of each sample, `t = τ / |g|`.
    pub fn times(&self) -> Vec<T> {
        self.tau.iter().map(|&x| x / self.g_magnitude).collect()
    }

    pub fn max_spacing(&self) -> T {
        self.tau
            .windows(2)
            .fold(T::zero(), |acc, w| acc.max(w[1] - w[0]))
    }
}

/// How a trace was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Generic exact-diagonalization run without further provenance.
    Numeric,
    FullNumeric,
    JcmNumeric,
    TransformedAnalytic,
    TwoPhotonNumeric,
    AnalyticSeries,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::FullNumeric => "full_numeric",
            Method::JcmNumeric => "jcm_numeric",
            Method::TransformedAnalytic => "transformed_analytic",
            Method::TwoPhotonNumeric => "two_photon_numeric",
            Method::AnalyticSeries => "analytic_series",
        }
    }
}

/// Qubit inversion trace with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult<T: Real> {
    pub grid: TimeGrid<T>,
    pub sigma_z_trace: Vec<T>,
    pub states: Option<Vec<StateVector<T>>>,
    pub method: Method,
    pub cutoff: Option<FockCutoff>,
    pub params: Option<SystemParams<T>>,
    /// Mean photon number setting the revival timescale, when known.
    pub mean_photon: Option<T>,
}

impl<T: Real> EvolutionResult<T> {
    pub fn new(grid: TimeGrid<T>, sigma_z_trace: Vec<T>, method: Method) -> Result<Self> {
        if grid.len() != sigma_z_trace.len() {
            return Err(Error::DimensionMismatch {
                left: grid.len(),
                right: sigma_z_trace.len(),
            });
        }
        Ok(Self {
            grid,
            sigma_z_trace,
            states: None,
            method,
            cutoff: None,
            params: None,
            mean_photon: None,
        })
    }

    pub fn with_provenance(mut self, method: Method, params: SystemParams<T>) -> Self {
        self.method = method;
        self.params = Some(params);
        self
    }

    pub fn with_mean_photon(mut self, n: T) -> Self {
        self.mean_photon = Some(n);
        self
    }

    pub fn tau(&self) -> &[T] {
        self.grid.tau()
    }

    pub fn len(&self) -> usize {
        self.sigma_z_trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_z_trace.is_empty()
    }

    /// Ordinary revival time `2π√n̄` in scaled units, when `n̄` is known.
    pub fn revival_time(&self) -> Option<T> {
        self.mean_photon.map(|n| T::two_pi() * n.sqrt())
    }
}

/// `exp(−iHt)` by spectral decomposition.
pub fn propagator<T: Real>(h: &OperatorMatrix<T>, t: T) -> Result<OperatorMatrix<T>> {
    hermitian_function(h, |lambda| cis(-lambda * t))
}

/// `⟨σ_z ⊗ I⟩ = Σ_n |⟨e,n|ψ⟩|² − |⟨g,n|ψ⟩|²`.
pub fn expectation_sigma_z<T: Real>(psi: &StateVector<T>) -> Result<T> {
    match psi.space() {
        Space::Composite(c) => Ok(sigma_z_of(psi.amplitudes(), c.field_dim())),
        other => Err(Error::SpaceMismatch {
            expected: SpaceTag::Composite,
            found: other.tag(),
        }),
    }
}

fn sigma_z_of<T: Real>(amps: &DVector<Complex<T>>, d: usize) -> T {
    let ground = amps.rows(0, d).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let excited = amps.rows(d, d).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    excited - ground
}

fn check_initial_state<T: Real>(psi0: &StateVector<T>, space: Space) -> Result<FockCutoff> {
    let cutoff = match space {
        Space::Composite(c) => c,
        other => {
            return Err(Error::SpaceMismatch {
                expected: SpaceTag::Composite,
                found: other.tag(),
            })
        }
    };
    if psi0.space() != space {
        return Err(Error::DimensionMismatch {
            left: space.dim(),
            right: psi0.dim(),
        });
    }
    let dev = (psi0.norm_squared() - T::one()).abs();
    if dev >= T::tol(1e-9) {
        return Err(Error::InvalidParams(format!(
            "initial state is not normalized (|norm^2 - 1| = {dev})"
        )));
    }
    Ok(cutoff)
}

/// Exact evolution under a time-independent Hamiltonian; records `⟨σ_z⟩` only.
pub fn evolve_numeric<T: Real>(
    h: &OperatorMatrix<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
) -> Result<EvolutionResult<T>> {
    evolve_numeric_with(h, psi0, grid, false)
}

/// Diagonalizes `h` once and applies spectral phases per grid point.
pub fn evolve_numeric_with<T: Real>(
    h: &OperatorMatrix<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    retain_states: bool,
) -> Result<EvolutionResult<T>> {
    let cutoff = check_initial_state(psi0, h.space())?;
    let spectrum = Spectrum::new(h)?;
    let coords = spectrum.to_eigenbasis(psi0)?;
    let d = cutoff.field_dim();
    let times = grid.times();
    let samples: Vec<(T, Option<StateVector<T>>)> = times
        .par_iter()
        .map(|&t| {
            let phased = DVector::from_iterator(
                coords.len(),
                coords
                    .iter()
                    .zip(spectrum.values().iter())
                    .map(|(c, &lambda)| *c * cis(-lambda * t)),
            );
            let amps = spectrum.from_eigenbasis(&phased);
            let w = sigma_z_of(&amps, d);
            let state = retain_states.then(|| StateVector::from_parts(h.space(), amps, psi0.truncation_tail()));
            (w, state)
        })
        .collect();
    let (trace, states): (Vec<T>, Vec<Option<StateVector<T>>>) = samples.into_iter().unzip();
    let mut result = EvolutionResult::new(grid.clone(), trace, Method::Numeric)?;
    result.cutoff = Some(cutoff);
    if retain_states {
        result.states = Some(states.into_iter().flatten().collect());
    }
    Ok(result)
}

/// Closed-form Jaynes-Cummings propagator
/// `½[C_{n+1}+C_n] + ½[C_{n+1}−C_n]σ_z + (β/|β|) S_{n+1} a σ₊ − (β*/|β|) a† S_{n+1} σ₋`
/// with `C_{n+1} = cos(|g|t√(aa†))`, `C_n = cos(|g|t√(a†a))`, `S_{n+1} = sin(|g|t√(aa†))/√(aa†)`.
pub fn jcm_evolution_operator<T: Real>(p: &SystemParams<T>, t: T, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let beta_mag = modulus(p.beta);
    if beta_mag == T::zero() {
        return Err(Error::ZeroCoupling);
    }
    let phase = p.beta / beta_mag;
    let gt = p.coupling_magnitude() * t;
    let a = annihilation::<T>(cutoff);
    let a_ad = a.mul(&a.adjoint())?;
    let ad_a = number::<T>(cutoff);
    let real = |x: T| Complex::new(x, T::zero());

    let c_upper = hermitian_function(&a_ad, |x| real((gt * x.max(T::zero()).sqrt()).cos()))?;
    let c_lower = hermitian_function(&ad_a, |x| real((gt * x.max(T::zero()).sqrt()).cos()))?;
    let s_upper = hermitian_function(&a_ad, |x| {
        let root = x.max(T::zero()).sqrt();
        if root == T::zero() {
            real(gt)
        } else {
            real((gt * root).sin() / root)
        }
    })?;

    let half = T::lit(0.5);
    let qubit_id = OperatorMatrix::identity(Space::Qubit);
    let diag = tensor(&qubit_id, &c_upper.add(&c_lower)?.scale_real(half))?
        .add(&tensor(&pauli::<T>(Pauli::Z), &c_upper.sub(&c_lower)?.scale_real(half))?)?;
    let raise = tensor(&pauli::<T>(Pauli::Plus), &s_upper.mul(&a)?.scale(phase))?;
    let lower = tensor(&pauli::<T>(Pauli::Minus), &a.adjoint().mul(&s_upper)?.scale(phase.conj()))?;
    diag.add(&raise)?.sub(&lower)
}

/// The field-space operator `D(ξ,γ) = e^{iE_z t} exp[½(ξa† − ξ*a)] e^{iγ/2}`, `ξ(t) = iβ* e^{iωt}`.
pub fn transform_displacement<T: Real>(p: &SystemParams<T>, t: T, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let half = T::lit(0.5);
    let xi = Complex::new(T::zero(), T::one()) * p.beta.conj() * cis(p.omega * t);
    let d = displacement(xi * half, cutoff)?;
    Ok(d.scale(cis(p.e_z * t + p.gamma * half)))
}

/// Unitary `T = (1/√2){ −½[D†−D] I − ½[D†+D] σ_z + D σ₊ + D† σ₋ }`.
pub fn transform_t<T: Real>(p: &SystemParams<T>, t: T, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let d = transform_displacement(p, t, cutoff)?;
    let dd = d.adjoint();
    let half = T::lit(0.5);
    let qubit_id = OperatorMatrix::identity(Space::Qubit);
    let total = tensor(&qubit_id, &dd.sub(&d)?.scale_real(-half))?
        .add(&tensor(&pauli::<T>(Pauli::Z), &dd.add(&d)?.scale_real(-half))?)?
        .add(&tensor(&pauli::<T>(Pauli::Plus), &d)?)?
        .add(&tensor(&pauli::<T>(Pauli::Minus), &dd)?)?;
    Ok(total.scale_real(T::lit(0.5).sqrt()))
}

/// `D(ξ(t)/2)` from `D(ξ(0)/2)`: `ξ(t) = ξ(0)e^{iωt}` is a photon-number rotation,
/// so entries pick up `e^{iωt(m−n)}`.
fn rotate_displacement<T: Real>(d0: &DMatrix<Complex<T>>, theta: T, scalar: Complex<T>) -> DMatrix<Complex<T>> {
    let phases: Vec<Complex<T>> = (0..d0.nrows()).map(|m| cis(theta * T::lit(m as f64))).collect();
    DMatrix::from_fn(d0.nrows(), d0.ncols(), |m, n| d0[(m, n)] * phases[m] * phases[n].conj() * scalar)
}

/// Composite evolution `|ψ(t)⟩ = T†(t) U_0T(t) U_I(t) T(0) |ψ(0)⟩` with
/// `U_0T = exp(−i(E_J/2)σ_z t)` and `U_I` the transformed-frame JCM propagator.
pub fn evolve_transformed<T: Real>(
    p: &SystemParams<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    cutoff: FockCutoff,
) -> Result<EvolutionResult<T>> {
    evolve_transformed_with(p, psi0, grid, cutoff, false)
}

pub fn evolve_transformed_with<T: Real>(
    p: &SystemParams<T>,
    psi0: &StateVector<T>,
    grid: &TimeGrid<T>,
    cutoff: FockCutoff,
    retain_states: bool,
) -> Result<EvolutionResult<T>> {
    if modulus(p.beta) == T::zero() {
        return Err(Error::ZeroCoupling);
    }
    let space = Space::Composite(cutoff);
    check_initial_state(psi0, space)?;
    let check = resonance_check(p, Resonance::OnePhoton);
    if !check.satisfied {
        log::warn!(
            "transformed evolution outside one-photon resonance (detuning {}, gamma offset {})",
            check.detuning,
            check.gamma_offset
        );
    }
    if p.e_z != T::zero() {
        log::warn!("E_z = {} is outside the regime the transformed-frame JCM was derived for", p.e_z);
    }

    let half = T::lit(0.5);
    let d0 = transform_displacement(&SystemParams { e_z: T::zero(), gamma: T::zero(), ..*p }, T::zero(), cutoff)?
        .into_entries();
    let t0 = transform_t(p, T::zero(), cutoff)?;
    let phi0 = t0.apply(psi0)?;
    let jcm = Spectrum::new(&build_jcm_hamiltonian(p, cutoff)?)?;
    let coords = jcm.to_eigenbasis(&phi0)?;
    let d = cutoff.field_dim();
    let inv_sqrt2 = Complex::new(half.sqrt(), T::zero());

    let times = grid.times();
    let samples: Vec<(T, Option<StateVector<T>>)> = times
        .par_iter()
        .map(|&t| {
            let phased = DVector::from_iterator(
                coords.len(),
                coords
                    .iter()
                    .zip(jcm.values().iter())
                    .map(|(c, &lambda)| *c * cis(-lambda * t)),
            );
            let chi = jcm.from_eigenbasis(&phased);
            // U_0T: |g⟩ picks up e^{+iE_J t/2}, |e⟩ picks up e^{−iE_J t/2}
            let rot = cis(p.e_j * t * half);
            let xg = chi.rows(0, d) * rot;
            let xe = chi.rows(d, d) * rot.conj();
            let k = rotate_displacement(&d0, p.omega * t, cis(p.e_z * t + p.gamma * half));
            let psi_g = k.ad_mul(&(&xg + &xe)) * inv_sqrt2;
            let psi_e = (&k * (&xg - &xe)) * inv_sqrt2;
            let mut amps = DVector::zeros(2 * d);
            amps.rows_mut(0, d).copy_from(&psi_g);
            amps.rows_mut(d, d).copy_from(&psi_e);
            let w = sigma_z_of(&amps, d);
            let state = retain_states.then(|| StateVector::from_parts(space, amps, psi0.truncation_tail()));
            (w, state)
        })
        .collect();
    let (trace, states): (Vec<T>, Vec<Option<StateVector<T>>>) = samples.into_iter().unzip();
    let mut result = EvolutionResult::new(grid.clone(), trace, Method::TransformedAnalytic)?.with_provenance(
        Method::TransformedAnalytic,
        *p,
    );
    result.cutoff = Some(cutoff);
    if retain_states {
        result.states = Some(states.into_iter().flatten().collect());
    }
    Ok(result)
}
