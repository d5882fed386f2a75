//! Charge-qubit/cavity Hamiltonians in ħ = 1 units.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::operator_algebra::{
    annihilation, creation, hermitian_function, number, pauli, tensor, FockCutoff, OperatorMatrix, Pauli, Space,
};
use crate::scalar::{modulus, Real};

/// Circuit-level description of the Cooper-pair box in the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams<T: Real> {
    /// Single-electron charging energy.
    pub e_ch: T,
    /// Dimensionless gate charge.
    pub n_g: T,
    /// Josephson coupling energy.
    pub e_j: T,
    /// Classical flux in units of the flux quantum, `Φ_c / Φ₀`.
    pub phi_ratio: T,
    /// `π η / Φ₀`.
    pub beta: Complex<T>,
}

impl<T: Real> CircuitParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.e_ch > T::zero()) {
            return Err(Error::InvalidParams(format!("e_ch must be positive, got {}", self.e_ch)));
        }
        if !(self.e_j > T::zero()) {
            return Err(Error::InvalidParams(format!("e_j must be positive, got {}", self.e_j)));
        }
        if !(self.n_g >= T::zero() && self.n_g <= T::one()) {
            return Err(Error::InvalidParams(format!("n_g must lie in [0, 1], got {}", self.n_g)));
        }
        Ok(())
    }
}

/// Model constants of the full Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T: Real> {
    pub omega: T,
    pub e_z: T,
    pub e_j: T,
    pub gamma: T,
    pub beta: Complex<T>,
}

impl<T: Real> SystemParams<T> {
    pub fn new(omega: T, e_z: T, e_j: T, gamma: T, beta: Complex<T>) -> Result<Self> {
        let p = Self {
            omega,
            e_z,
            e_j,
            gamma,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// The resonant one-photon configuration: `ω = E_J`, `γ = π/4`, `E_z = 0`.
    pub fn resonant(omega: T, beta: Complex<T>) -> Self {
        Self {
            omega,
            e_z: T::zero(),
            e_j: omega,
            gamma: T::frac_pi_4(),
            beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > T::zero()) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.e_j > T::zero()) {
            return Err(Error::InvalidParams(format!("e_j must be positive, got {}", self.e_j)));
        }
        let finite = [self.omega, self.e_z, self.e_j, self.gamma, self.beta.re, self.beta.im]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        Ok(())
    }

    /// Effective one-photon coupling `g = β ω / 2` (carries the phase of β).
    pub fn coupling(&self) -> Complex<T> {
        self.beta * (self.omega / T::lit(2.0))
    }

    /// `|g| = |β| ω / 2`.
    pub fn coupling_magnitude(&self) -> T {
        modulus(self.beta) * self.omega / T::lit(2.0)
    }
}

/// Maps circuit constants onto the model: `ω = 4E_ch`, `E_z = −2E_ch(1 − 2n_g)`, `γ = πΦ_c/Φ₀`.
pub fn derive_system_params<T: Real>(c: &CircuitParams<T>) -> Result<SystemParams<T>> {
    c.validate()?;
    Ok(SystemParams {
        omega: T::lit(4.0) * c.e_ch,
        e_z: -T::lit(2.0) * c.e_ch * (T::one() - T::lit(2.0) * c.n_g),
        e_j: c.e_j,
        gamma: T::pi() * c.phi_ratio,
        beta: c.beta,
    })
}

fn composite_hermiticity<T: Real>(h: OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    let deviation = h.hermiticity_deviation();
    if deviation >= T::tol(1e-12) {
        return Err(Error::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }
    Ok(h)
}

/// `cos(γI + βa + β*a†)` on the field space, evaluated spectrally.
pub fn flux_cosine<T: Real>(p: &SystemParams<T>, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let field = Space::Field(cutoff);
    let a = annihilation::<T>(cutoff);
    let arg = OperatorMatrix::identity(field)
        .scale_real(p.gamma)
        .add(&a.scale(p.beta))?
        .add(&creation::<T>(cutoff).scale(p.beta.conj()))?;
    hermitian_function(&arg, |x| Complex::new(x.cos(), T::zero()))
}

/// Full nonlinear Hamiltonian
/// `ω a†a + E_z σ_z − E_J σ_x ⊗ cos(γ + βa + β*a†)`, without expanding the cosine.
pub fn build_full_hamiltonian<T: Real>(p: &SystemParams<T>, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let field_id = OperatorMatrix::identity(Space::Field(cutoff));
    let qubit_id = OperatorMatrix::identity(Space::Qubit);
    let cavity = tensor(&qubit_id, &number::<T>(cutoff))?.scale_real(p.omega);
    let qubit = tensor(&pauli::<T>(Pauli::Z), &field_id)?.scale_real(p.e_z);
    let coupling = tensor(&pauli::<T>(Pauli::X), &flux_cosine(p, cutoff)?)?.scale_real(-p.e_j);
    composite_hermiticity(cavity.add(&qubit)?.add(&coupling)?)
}

/// Transformed-frame one-photon Hamiltonian `−i(g* a†σ₋ − g aσ₊)`, `g = βω/2`.
pub fn build_jcm_hamiltonian<T: Real>(p: &SystemParams<T>, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    let check = resonance_check(p, Resonance::OnePhoton);
    if !check.satisfied {
        log::warn!(
            "one-photon resonance not satisfied (detuning {}, gamma offset {})",
            check.detuning,
            check.gamma_offset
        );
    }
    let g = p.coupling();
    let i = Complex::new(T::zero(), T::one());
    let a = annihilation::<T>(cutoff);
    let raise = tensor(&pauli::<T>(Pauli::Plus), &a)?.scale(i * g);
    let lower = tensor(&pauli::<T>(Pauli::Minus), &a.adjoint())?.scale(-(i * g.conj()));
    composite_hermiticity(raise.add(&lower)?)
}

/// Transformed-frame two-photon Hamiltonian at `2ω = E_J`:
/// `i(E_J/2)[β*² a†² σ₋ − β² a² σ₊]`.
///
/// The printed form carries `σ₊` on both terms, which is not Hermitian;
/// `β² a² σ₊` is the resonant term and the first is its conjugate partner.
pub fn build_two_photon_hamiltonian<T: Real>(p: &SystemParams<T>, cutoff: FockCutoff) -> Result<OperatorMatrix<T>> {
    if modulus(p.beta).powi(4) >= T::lit(0.1) {
        log::warn!("|beta|^4 = {} is not small; two-photon reduction is unreliable", modulus(p.beta).powi(4));
    }
    let check = resonance_check(p, Resonance::TwoPhoton);
    if !check.satisfied {
        log::warn!(
            "two-photon resonance not satisfied (detuning {}, gamma offset {})",
            check.detuning,
            check.gamma_offset
        );
    }
    let half_ej = p.e_j / T::lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    let a = annihilation::<T>(cutoff);
    let a2 = a.mul(&a)?;
    let beta2 = p.beta * p.beta;
    let emit = tensor(&pauli::<T>(Pauli::Minus), &a2.adjoint())?.scale(i * beta2.conj() * half_ej);
    let absorb = tensor(&pauli::<T>(Pauli::Plus), &a2)?.scale(-(i * beta2 * half_ej));
    composite_hermiticity(emit.add(&absorb)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resonance {
    OnePhoton,
    TwoPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceReport<T: Real> {
    pub satisfied: bool,
    pub detuning: T,
    /// `γ − π/4` wrapped to `(−π/2, π/2]`.
    pub gamma_offset: T,
}

pub fn resonance_check<T: Real>(p: &SystemParams<T>, case: Resonance) -> ResonanceReport<T> {
    let photons = match case {
        Resonance::OnePhoton => T::one(),
        Resonance::TwoPhoton => T::lit(2.0),
    };
    let detuning = photons * p.omega - p.e_j;
    let quarter = T::frac_pi_4();
    let half = T::frac_pi_2();
    let x = p.gamma - quarter;
    let mut offset = x - T::pi() * (x / T::pi()).round();
    if offset <= -half {
        offset += T::pi();
    }
    let rel = T::lit(1e-9);
    let scale = (photons * p.omega).abs().max(p.e_j.abs());
    let satisfied = detuning.abs() <= rel * scale && offset.abs() <= rel * quarter;
    ResonanceReport {
        satisfied,
        detuning,
        gamma_offset: offset,
    }
}
