//! Randomized invariant checks.

use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

use crate::analysis::{detect_revivals, envelope, RevivalConfig};
use crate::dynamics::{
    evolve_numeric, evolve_numeric_with, evolve_transformed_with, propagator, transform_t, EvolutionResult, Method,
    TimeGrid,
};
use crate::hamiltonians::{build_full_hamiltonian, build_jcm_hamiltonian, build_two_photon_hamiltonian, SystemParams};
use crate::inversion::{analytic_inversion, inversion_series, SeriesConfig};
use crate::operator_algebra::{
    coherent_state, displacement, hermitian_function, number, pauli, tensor, FockCutoff, OperatorMatrix, Pauli,
    QubitState, Space, StateVector,
};
use crate::scalar::cis;

fn cut(n: usize) -> FockCutoff {
    FockCutoff::new(n).unwrap()
}

fn complex(max: f64) -> impl Strategy<Value = Complex<f64>> {
    (-max..max, -max..max).prop_map(|(re, im)| Complex::new(re, im))
}

fn params() -> impl Strategy<Value = SystemParams<f64>> {
    (0.2..2.0, -0.5..0.5, 0.1..2.0, 0.0..3.0, complex(0.4))
        .prop_map(|(omega, e_z, e_j, gamma, beta)| SystemParams { omega, e_z, e_j, gamma, beta })
}

fn hermitian(dim: usize, seed: Vec<(f64, f64)>) -> OperatorMatrix<f64> {
    let raw = DMatrix::from_fn(dim, dim, |i, j| {
        let (re, im) = seed[(i * dim + j) % seed.len()];
        Complex::new(re, im)
    });
    let h = (&raw + raw.adjoint()) * Complex::new(0.5, 0.0);
    OperatorMatrix::new(Space::Field(cut(dim - 1)), h).unwrap()
}

fn excited_coherent(alpha: Complex<f64>, c: FockCutoff) -> StateVector<f64> {
    StateVector::product(QubitState::Excited, &coherent_state(alpha, c, true).unwrap()).unwrap()
}

fn excitation(qubit_weight: f64, c: FockCutoff) -> OperatorMatrix<f64> {
    tensor(&pauli::<f64>(Pauli::Z), &OperatorMatrix::identity(Space::Field(c)))
        .unwrap()
        .scale_real(qubit_weight)
        .add(&tensor(&OperatorMatrix::identity(Space::Qubit), &number::<f64>(c)).unwrap())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_identity_reconstructs(dim in 2usize..64, seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..200)) {
        let m = hermitian(dim, seed);
        let back = hermitian_function(&m, |x| Complex::new(x, 0.0)).unwrap();
        prop_assert!(back.max_abs_diff(&m).unwrap() < 1e-12);
    }

    #[test]
    fn spectral_exponential_is_unitary(dim in 2usize..40, t in -50.0..50.0f64, seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..100)) {
        let m = hermitian(dim, seed);
        let u = hermitian_function(&m, |x| cis(-x * t)).unwrap();
        prop_assert!(u.unitarity_deviation() < 1e-10);
    }

    #[test]
    fn displacement_composition(x1 in complex(0.35), x2 in complex(0.35)) {
        let c = cut(40);
        let lhs = displacement(x1, c).unwrap().mul(&displacement(x2, c).unwrap()).unwrap();
        let rhs = displacement(x1 + x2, c).unwrap().scale(cis((x1 * x2.conj()).im));
        prop_assert!(lhs.interior_max_abs_diff(&rhs, 20).unwrap() < 1e-6);
    }

    #[test]
    fn tensor_mixed_product(seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4..40)) {
        let c = cut(3);
        let field = |k: usize| OperatorMatrix::new(Space::Field(c), DMatrix::from_fn(4, 4, |i, j| {
            let (re, im) = seed[(k * 16 + i * 4 + j) % seed.len()];
            Complex::new(re, im)
        })).unwrap();
        let qubit = |k: usize| OperatorMatrix::new(Space::Qubit, DMatrix::from_fn(2, 2, |i, j| {
            let (re, im) = seed[(k * 7 + i * 2 + j) % seed.len()];
            Complex::new(im, re)
        })).unwrap();
        let (a, b, cq, d) = (qubit(0), field(1), qubit(2), field(3));
        let lhs = tensor(&a, &b).unwrap().mul(&tensor(&cq, &d).unwrap()).unwrap();
        let rhs = tensor(&a.mul(&cq).unwrap(), &b.mul(&d).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn builders_are_hermitian(p in params()) {
        let c = cut(25);
        prop_assert!(build_full_hamiltonian(&p, c).unwrap().hermiticity_deviation() < 1e-12);
        prop_assert!(build_jcm_hamiltonian(&p, c).unwrap().hermiticity_deviation() < 1e-12);
        prop_assert!(build_two_photon_hamiltonian(&p, c).unwrap().hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn excitation_number_conserved(p in params()) {
        let c = cut(25);
        let zero = OperatorMatrix::zeros(Space::Composite(c));
        let jcm = build_jcm_hamiltonian(&p, c).unwrap().commutator(&excitation(0.5, c)).unwrap();
        prop_assert!(jcm.interior_max_abs_diff(&zero, 23).unwrap() < 1e-12);
        let two = build_two_photon_hamiltonian(&p, c).unwrap().commutator(&excitation(1.0, c)).unwrap();
        prop_assert!(two.interior_max_abs_diff(&zero, 22).unwrap() < 1e-12);
    }

    #[test]
    fn jcm_closed_form_matches_numeric(beta in complex(0.4), alpha in complex(2.1), tau_max in 1.0..50.0f64) {
        prop_assume!(beta.norm() > 0.05);
        let c = cut(30);
        let p = SystemParams::resonant(1.0, beta);
        let psi0 = excited_coherent(alpha, c);
        let grid = TimeGrid::uniform(tau_max, 6, p.coupling_magnitude()).unwrap();
        let numeric = evolve_numeric(&build_jcm_hamiltonian(&p, c).unwrap(), &psi0, &grid).unwrap();
        for (k, &t) in grid.times().iter().enumerate() {
            let u = crate::dynamics::jcm_evolution_operator(&p, t, c).unwrap();
            let w = crate::dynamics::expectation_sigma_z(&u.apply(&psi0).unwrap()).unwrap();
            prop_assert!((w - numeric.sigma_z_trace[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_and_norm_conserved(p in params(), alpha in complex(2.0)) {
        let c = cut(40);
        let h = build_full_hamiltonian(&p, c).unwrap();
        let psi0 = excited_coherent(alpha, c);
        let e0 = psi0.expectation(&h).unwrap().re;
        let grid = TimeGrid::uniform(40.0, 8, 1.0).unwrap();
        let r = evolve_numeric_with(&h, &psi0, &grid, true).unwrap();
        for s in r.states.unwrap() {
            prop_assert!((s.norm_squared() - 1.0).abs() < 1e-9);
            prop_assert!((s.expectation(&h).unwrap().re - e0).abs() <= 1e-9 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn propagator_composes(p in params(), t1 in 0.0..20.0f64, t2 in 0.0..20.0f64) {
        let h = build_full_hamiltonian(&p, cut(15)).unwrap();
        let lhs = propagator(&h, t1).unwrap().mul(&propagator(&h, t2).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&propagator(&h, t1 + t2).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn transform_is_unitary_on_interior(beta in complex(0.4), t in 0.0..100.0f64) {
        let p = SystemParams::resonant(1.0, beta);
        prop_assert!(transform_t(&p, t, cut(40)).unwrap().interior_unitarity_deviation(30) < 1e-8);
    }

    #[test]
    fn transformed_states_stay_normalized(beta in complex(0.3), alpha in complex(2.0)) {
        prop_assume!(beta.norm() > 0.05);
        let c = cut(40);
        let p = SystemParams::resonant(1.0, beta);
        let grid = TimeGrid::uniform(30.0, 7, p.coupling_magnitude()).unwrap();
        let r = evolve_transformed_with(&p, &excited_coherent(alpha, c), &grid, c, true).unwrap();
        for s in r.states.unwrap() {
            prop_assert!((s.norm_squared() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn series_bounded_and_converged(beta in 0.05..0.5f64, alpha in complex(5.0), tau_max in 1.0..300.0f64) {
        let p = SystemParams::resonant(1.0, Complex::new(beta, 0.0));
        let grid = TimeGrid::uniform(tau_max, 200, p.coupling_magnitude()).unwrap();
        let cfg = SeriesConfig::default();
        let a = analytic_inversion(alpha, &p, &grid, &cfg).unwrap();
        prop_assert!(a.sigma_z_trace.iter().all(|w| w.abs() <= 1.0 + 1e-9));
        let finer = SeriesConfig { tail_epsilon: cfg.tail_epsilon / 10.0, ..cfg };
        let b = analytic_inversion(alpha, &p, &grid, &finer).unwrap();
        for (x, y) in a.sigma_z_trace.iter().zip(&b.sigma_z_trace) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn series_generic_precision(d in complex(3.0), g in 0.05..0.3f64) {
        let grid64 = TimeGrid::uniform(20.0, 50, g).unwrap();
        let grid32 = TimeGrid::uniform(20.0f32, 50, g as f32).unwrap();
        let cfg = SeriesConfig::default();
        let w64 = inversion_series(d, g, 1.0, &grid64, &cfg).unwrap();
        let d32 = Complex::new(d.re as f32, d.im as f32);
        let w32 = inversion_series(d32, g as f32, 1.0, &grid32, &cfg).unwrap();
        for (x, y) in w64.iter().zip(&w32) {
            prop_assert!((x - *y as f64).abs() < 2e-3);
        }
    }

    #[test]
    fn envelope_brackets_trace(seed in prop::collection::vec(-1.0..1.0f64, 50..400), window in 0.2..5.0f64) {
        let n = seed.len();
        let grid = TimeGrid::uniform(10.0, n, 1.0).unwrap();
        prop_assume!(window > grid.max_spacing());
        let tr = EvolutionResult::new(grid, seed.clone(), Method::Numeric).unwrap();
        for (p, w) in envelope(&tr, window).unwrap().iter().zip(&seed) {
            prop_assert!(p.upper >= *w && *w >= p.lower);
            prop_assert!(p.upper <= 1.0 && p.lower >= -1.0);
        }
    }

    #[test]
    fn revival_report_sign_invariant(d in complex(4.0), g in 0.1..0.3f64) {
        let grid = TimeGrid::uniform(120.0, 3000, g).unwrap();
        let w = inversion_series(d, g, 0.8, &grid, &SeriesConfig::default()).unwrap();
        let tr = EvolutionResult::new(grid, w, Method::AnalyticSeries).unwrap();
        let mut flipped = tr.clone();
        flipped.sigma_z_trace.iter_mut().for_each(|x| *x = -*x);
        let cfg = RevivalConfig::default();
        prop_assert_eq!(detect_revivals(&tr, &cfg).unwrap(), detect_revivals(&flipped, &cfg).unwrap());
    }
}
