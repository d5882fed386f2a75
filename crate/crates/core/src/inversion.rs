//! Closed-form qubit inversion as a Poisson-weighted series over Fock levels.

use nalgebra::Complex;
use rayon::prelude::*;

use crate::dynamics::{EvolutionResult, Method, TimeGrid};
use crate::error::{Error, Result};
use crate::hamiltonians::SystemParams;
use crate::scalar::{cis, Real};

/// Truncation of the Fock sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Stop once the accumulated Poisson weight exceeds `1 - tail_epsilon`.
    pub tail_epsilon: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            tail_epsilon: 1e-12,
            max_terms: 512,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon < 1e-3) {
            return Err(Error::InvalidParams(format!(
                "tail_epsilon must lie in (0, 1e-3), got {}",
                self.tail_epsilon
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParams("max_terms must be positive".into()));
        }
        Ok(())
    }
}

/// `|α − β|²`, the Poisson mean of the series weights.
pub fn effective_mean_photon<T: Real>(alpha: Complex<T>, beta: T) -> T {
    (alpha - Complex::new(beta, T::zero())).norm_sqr()
}

/// Coherent amplitude seen by the transformed-frame JCM when the lab-frame
/// field starts in `|α⟩`: the transformation at `t = 0` shifts it by `−iβ*/2`.
pub fn transformed_frame_amplitude<T: Real>(alpha: Complex<T>, beta: Complex<T>) -> Complex<T> {
    alpha - Complex::new(T::zero(), T::lit(0.5)) * beta.conj()
}

struct Term<T> {
    weight: T,
    ratio1: T,
    ratio2: T,
}

fn series_terms<T: Real>(r2: T, cfg: &SeriesConfig) -> Result<Vec<Term<T>>> {
    let stop = T::one() - T::lit(cfg.tail_epsilon).max(T::tol(1e-12));
    let ln_r2 = r2.ln();
    let mut ln_fact = vec![T::zero()];
    let mut terms = Vec::new();
    let mut mass = T::zero();
    for n in 0..cfg.max_terms {
        while ln_fact.len() < n + 3 {
            let k = ln_fact.len();
            let next = ln_fact[k - 1] + T::lit(k as f64).ln();
            ln_fact.push(next);
        }
        let weight = if r2 == T::zero() {
            if n == 0 {
                T::one()
            } else {
                T::zero()
            }
        } else {
            (T::lit(n as f64) * ln_r2 - r2 - ln_fact[n]).exp()
        };
        let half = T::lit(0.5);
        let ratio1 = (ln_fact[n] - half * ln_fact[n] - half * ln_fact[n + 1]).exp();
        let ratio2 = (ln_fact[n] - half * ln_fact[n] - half * ln_fact[n + 2]).exp();
        terms.push(Term { weight, ratio1, ratio2 });
        mass += weight;
        if mass >= stop {
            return Ok(terms);
        }
    }
    Err(Error::SeriesNotConverged {
        terms: cfg.max_terms,
        mass: mass.as_f64(),
    })
}

/// Evaluates
/// `W = ½ Σ p_n { 2cos(Ωt) c_{n+1}c_n + [d* e^{iΩt} + d e^{−iΩt}] (c_{n+2}−c_n) s_{n+1}/√(n+1)
///               − [d*² e^{iΩt} + d² e^{−iΩt}] s_{n+2}s_{n+1}/√((n+1)(n+2)) }`
/// with `p_n` Poisson in `|d|²`, `c_n = cos(gt√n)`, `s_n = sin(gt√n)` and `Ω = phase_rate`.
/// `g` carries its sign; samples are taken at the grid's physical times.
pub fn inversion_series<T: Real>(
    d: Complex<T>,
    g: T,
    phase_rate: T,
    grid: &TimeGrid<T>,
    cfg: &SeriesConfig,
) -> Result<Vec<T>> {
    cfg.validate()?;
    let terms = series_terms(d.norm_sqr(), cfg)?;
    let residue_tol = T::tol(1e-10);
    let times = grid.times();
    let samples: Vec<Result<T>> = times
        .par_iter()
        .zip(grid.tau().par_iter())
        .map(|(&t, &tau)| {
            let gt = g * t;
            let c = |k: usize| (gt * T::lit(k as f64).sqrt()).cos();
            let s = |k: usize| (gt * T::lit(k as f64).sqrt()).sin();
            let rot = cis(phase_rate * t);
            let first = d.conj() * rot + d * rot.conj();
            let second = d.conj() * d.conj() * rot + d * d * rot.conj();
            let two_cos = T::lit(2.0) * (phase_rate * t).cos();
            let mut sum = Complex::new(T::zero(), T::zero());
            let (mut c0, mut c1, mut s1) = (c(0), c(1), s(1));
            for (n, term) in terms.iter().enumerate() {
                let (c2, s2) = (c(n + 2), s(n + 2));
                let diag = Complex::new(two_cos * c1 * c0, T::zero());
                let cross = first * (term.ratio1 * (c2 - c0) * s1);
                let double = second * (term.ratio2 * s2 * s1);
                sum += (diag + cross - double) * term.weight;
                c0 = c1;
                c1 = c2;
                s1 = s2;
            }
            let w = sum * T::lit(0.5);
            if w.im.abs() >= residue_tol {
                return Err(Error::ComplexInversion {
                    tau: tau.as_f64(),
                    residue: w.im.as_f64(),
                });
            }
            Ok(w.re)
        })
        .collect();
    samples.into_iter().collect()
}

/// Closed-form inversion for a qubit starting in `|e⟩` and the field in `|α⟩`,
/// with Poisson amplitude `α − β`. Requires real, non-zero `β`.
pub fn analytic_inversion<T: Real>(
    alpha: Complex<T>,
    p: &SystemParams<T>,
    grid: &TimeGrid<T>,
    cfg: &SeriesConfig,
) -> Result<EvolutionResult<T>> {
    p.validate()?;
    if p.beta.im != T::zero() {
        return Err(Error::ComplexBeta { imag: p.beta.im.as_f64() });
    }
    let beta = p.beta.re;
    if beta == T::zero() {
        return Err(Error::ZeroCoupling);
    }
    let d = alpha - Complex::new(beta, T::zero());
    let trace = inversion_series(d, p.coupling().re, p.e_j, grid, cfg)?;
    Ok(EvolutionResult::new(grid.clone(), trace, Method::AnalyticSeries)?
        .with_provenance(Method::AnalyticSeries, *p)
        .with_mean_photon(effective_mean_photon(alpha, beta)))
}
