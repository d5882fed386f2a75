//! Named numerical invariant checks with timings.

use std::time::{Duration, Instant};

use nalgebra::Complex;

use crate::dynamics::{evolve_numeric_with, jcm_evolution_operator, propagator, transform_t, TimeGrid};
use crate::error::Result;
use crate::hamiltonians::{build_full_hamiltonian, build_jcm_hamiltonian, build_two_photon_hamiltonian, SystemParams};
use crate::operator_algebra::{
    annihilation, coherent_state, displacement, number, pauli, tensor, FockCutoff, OperatorMatrix, Pauli,
    QubitState, Space, StateVector,
};
use crate::scalar::cis;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub total_runtime: Duration,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Check = fn() -> Result<f64>;

fn c64(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn cutoff(n: usize) -> FockCutoff {
    FockCutoff::new(n).expect("positive cutoff")
}

fn generic_params() -> SystemParams<f64> {
    SystemParams {
        omega: 1.0,
        e_z: 0.15,
        e_j: 0.9,
        gamma: 0.7,
        beta: c64(0.2, 0.1),
    }
}

fn resonant() -> SystemParams<f64> {
    SystemParams::resonant(1.0, c64(0.2, 0.0))
}

fn hermiticity_full() -> Result<f64> {
    Ok(build_full_hamiltonian(&generic_params(), cutoff(40))?.hermiticity_deviation())
}

fn hermiticity_jcm() -> Result<f64> {
    Ok(build_jcm_hamiltonian(&generic_params(), cutoff(40))?.hermiticity_deviation())
}

fn hermiticity_two_photon() -> Result<f64> {
    let p = SystemParams { beta: c64(0.1, -0.05), ..generic_params() };
    Ok(build_two_photon_hamiltonian(&p, cutoff(40))?.hermiticity_deviation())
}

fn propagator_unitarity() -> Result<f64> {
    let h = build_full_hamiltonian(&generic_params(), cutoff(40))?;
    Ok(propagator(&h, 37.5)?.unitarity_deviation())
}

fn norm_conservation() -> Result<f64> {
    let c = cutoff(60);
    let h = build_full_hamiltonian(&generic_params(), c)?;
    let psi = StateVector::product(QubitState::Excited, &coherent_state(c64(3.0, 0.5), c, false)?)?;
    let grid = TimeGrid::uniform(50.0, 40, 1.0)?;
    let r = evolve_numeric_with(&h, &psi, &grid, true)?;
    Ok(r.states
        .unwrap_or_default()
        .iter()
        .fold(0.0, |acc, s| acc.max((s.norm_squared() - 1.0).abs())))
}

fn excitation_commutator(h: &OperatorMatrix<f64>, qubit_weight: f64, c: FockCutoff, keep: usize) -> Result<f64> {
    let sz = tensor(&pauli::<f64>(Pauli::Z), &OperatorMatrix::identity(Space::Field(c)))?;
    let n = tensor(&OperatorMatrix::identity(Space::Qubit), &number::<f64>(c))?;
    let excitation = sz.scale_real(qubit_weight).add(&n)?;
    h.commutator(&excitation)?
        .interior_max_abs_diff(&OperatorMatrix::zeros(h.space()), keep)
}

fn jcm_excitation_conserved() -> Result<f64> {
    let c = cutoff(30);
    excitation_commutator(&build_jcm_hamiltonian(&resonant(), c)?, 0.5, c, 28)
}

fn two_photon_excitation_conserved() -> Result<f64> {
    let c = cutoff(30);
    let p = SystemParams { omega: 0.5, beta: c64(0.1, 0.0), ..resonant() };
    excitation_commutator(&build_two_photon_hamiltonian(&p, c)?, 1.0, c, 27)
}

fn transform_unitarity() -> Result<f64> {
    Ok(transform_t(&resonant(), 1.0, cutoff(40))?.interior_unitarity_deviation(30))
}

fn displacement_composition() -> Result<f64> {
    let c = cutoff(40);
    let (x1, x2) = (c64(0.3, 0.2), c64(-0.1, 0.35));
    let lhs = displacement(x1, c)?.mul(&displacement(x2, c)?)?;
    let rhs = displacement(x1 + x2, c)?.scale(cis((x1 * x2.conj()).im));
    lhs.interior_max_abs_diff(&rhs, 25)
}

fn ladder_commutator_interior() -> Result<f64> {
    let c = cutoff(20);
    let a = annihilation::<f64>(c);
    a.commutator(&a.adjoint())?
        .interior_max_abs_diff(&OperatorMatrix::identity(Space::Field(c)), 19)
}

fn jcm_closed_form() -> Result<f64> {
    let c = cutoff(30);
    let p = resonant();
    let t = 80.0;
    jcm_evolution_operator(&p, t, c)?.max_abs_diff(&propagator(&build_jcm_hamiltonian(&p, c)?, t)?)
}

fn energy_conservation() -> Result<f64> {
    let c = cutoff(60);
    let h = build_full_hamiltonian(&generic_params(), c)?;
    let psi = StateVector::product(QubitState::Excited, &coherent_state(c64(3.0, 0.5), c, false)?)?;
    let e0 = psi.expectation(&h)?.re;
    let grid = TimeGrid::uniform(50.0, 20, 1.0)?;
    let r = evolve_numeric_with(&h, &psi, &grid, true)?;
    let mut worst: f64 = 0.0;
    for s in r.states.unwrap_or_default() {
        worst = worst.max((s.expectation(&h)?.re - e0).abs() / e0.abs().max(1.0));
    }
    Ok(worst)
}

const CHECKS: &[(&str, f64, Check)] = &[
    ("hermiticity_full_hamiltonian", 1e-12, hermiticity_full),
    ("hermiticity_jcm_hamiltonian", 1e-12, hermiticity_jcm),
    ("hermiticity_two_photon_hamiltonian", 1e-12, hermiticity_two_photon),
    ("propagator_unitarity", 1e-10, propagator_unitarity),
    ("norm_conservation", 1e-9, norm_conservation),
    ("jcm_excitation_commutator", 1e-12, jcm_excitation_conserved),
    ("two_photon_excitation_commutator", 1e-12, two_photon_excitation_conserved),
    ("transform_unitarity", 1e-8, transform_unitarity),
    ("displacement_composition", 1e-6, displacement_composition),
    ("ladder_commutator_interior", 1e-12, ladder_commutator_interior),
    ("jcm_closed_form_vs_propagator", 1e-9, jcm_closed_form),
    ("energy_conservation", 1e-9, energy_conservation),
];

/// Runs every check. A check that errors is recorded as failed with value `NaN`.
pub fn run_all() -> ValidationReport {
    let start = Instant::now();
    let checks = CHECKS
        .iter()
        .map(|&(name, tolerance, check)| {
            let t0 = Instant::now();
            let outcome = check();
            let runtime = t0.elapsed();
            if let Err(e) = &outcome {
                log::error!("check {name} failed to run: {e}");
            }
            let value = outcome.unwrap_or(f64::NAN);
            CheckResult {
                name,
                value,
                tolerance,
                passed: value < tolerance,
                runtime,
            }
        })
        .collect();
    ValidationReport {
        checks,
        total_runtime: start.elapsed(),
    }
}
