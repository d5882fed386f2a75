//! Collapse, revival and super-revival features of inversion traces, and
//! cutoff convergence studies.

use std::collections::VecDeque;

use nalgebra::Complex;

use crate::dynamics::{evolve_numeric, EvolutionResult, TimeGrid};
use crate::error::{Error, Result};
use crate::hamiltonians::{build_full_hamiltonian, SystemParams};
use crate::operator_algebra::{coherent_state, FockCutoff, QubitState, StateVector};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint<T> {
    pub tau: T,
    pub upper: T,
    pub lower: T,
}

impl<T: Real> EnvelopePoint<T> {
    /// Half the peak-to-peak spread inside the window.
    pub fn height(&self) -> T {
        (self.upper - self.lower) * T::lit(0.5)
    }
}

/// Max and min of `values` over the centered window `[τ_i − half, τ_i + half]`.
fn sliding_extremes<T: Real>(tau: &[T], values: &[T], half: T) -> Vec<(T, T)> {
    let n = tau.len();
    let mut out = Vec::with_capacity(n);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut hi = 0;
    let mut lo = 0;
    for i in 0..n {
        while hi < n && tau[hi] <= tau[i] + half {
            while maxq.back().is_some_and(|&k| values[k] <= values[hi]) {
                maxq.pop_back();
            }
            maxq.push_back(hi);
            while minq.back().is_some_and(|&k| values[k] >= values[hi]) {
                minq.pop_back();
            }
            minq.push_back(hi);
            hi += 1;
        }
        while tau[lo] < tau[i] - half {
            lo += 1;
        }
        while maxq.front().is_some_and(|&k| k < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k < lo) {
            minq.pop_front();
        }
        out.push((values[maxq[0]], values[minq[0]]));
    }
    out
}

/// Sliding-window upper and lower envelope of `W` with window width `window_tau`.
pub fn envelope<T: Real>(trace: &EvolutionResult<T>, window_tau: T) -> Result<Vec<EnvelopePoint<T>>> {
    let spacing = trace.grid.max_spacing();
    if !(window_tau > spacing) {
        return Err(Error::WindowTooSmall {
            window: window_tau.as_f64(),
            spacing: spacing.as_f64(),
        });
    }
    let tau = trace.tau();
    let ext = sliding_extremes(tau, &trace.sigma_z_trace, window_tau * T::lit(0.5));
    Ok(tau
        .iter()
        .zip(ext)
        .map(|(&tau, (upper, lower))| EnvelopePoint { tau, upper, lower })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalEvent<T> {
    pub tau_peak: T,
    pub amplitude: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperRevival<T> {
    pub detected: bool,
    pub envelope_period: Option<T>,
    pub modulation_depth: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalReport<T> {
    pub collapse_tau: Option<T>,
    pub revival_events: Vec<RevivalEvent<T>>,
    pub super_revival: SuperRevival<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalConfig<T> {
    pub collapse_threshold: T,
    pub revival_threshold: T,
    pub window_tau: T,
    /// Trough-then-peak depth of the long-scale envelope that counts as a super-revival.
    pub super_revival_depth: T,
    /// Ordinary revival time; falls back to the trace's mean photon number.
    pub revival_scale: Option<T>,
}

impl<T: Real> Default for RevivalConfig<T> {
    fn default() -> Self {
        Self {
            collapse_threshold: T::lit(0.1),
            revival_threshold: T::lit(0.25),
            window_tau: T::frac_pi_2(),
            super_revival_depth: T::lit(0.1),
            revival_scale: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Peak(usize),
    Trough(usize),
}

/// Alternating peaks and troughs of `h` that move by at least `hysteresis`.
fn zigzag<T: Real>(h: &[T], hysteresis: T) -> Vec<Extremum> {
    #[derive(PartialEq)]
    enum Mode {
        Unknown,
        Rising,
        Falling,
    }
    let mut out = Vec::new();
    let mut mode = Mode::Unknown;
    let (mut imax, mut imin) = (0, 0);
    for i in 1..h.len() {
        match mode {
            Mode::Unknown => {
                if h[i] > h[imax] {
                    imax = i;
                }
                if h[i] < h[imin] {
                    imin = i;
                }
                if h[i] < h[imax] - hysteresis {
                    out.push(Extremum::Peak(imax));
                    mode = Mode::Falling;
                    imin = i;
                } else if h[i] > h[imin] + hysteresis {
                    out.push(Extremum::Trough(imin));
                    mode = Mode::Rising;
                    imax = i;
                }
            }
            Mode::Falling => {
                if h[i] < h[imin] {
                    imin = i;
                } else if h[i] > h[imin] + hysteresis {
                    out.push(Extremum::Trough(imin));
                    mode = Mode::Rising;
                    imax = i;
                }
            }
            Mode::Rising => {
                if h[i] > h[imax] {
                    imax = i;
                } else if h[i] < h[imax] - hysteresis {
                    out.push(Extremum::Peak(imax));
                    mode = Mode::Falling;
                    imin = i;
                }
            }
        }
    }
    out
}

/// Vertex of the parabola through the three samples around `i`.
fn refine_peak<T: Real>(tau: &[T], h: &[T], i: usize) -> (T, T) {
    if i == 0 || i + 1 >= h.len() {
        return (tau[i], h[i]);
    }
    let (x0, x1, x2) = (tau[i - 1], tau[i], tau[i + 1]);
    let (y0, y1, y2) = (h[i - 1], h[i], h[i + 1]);
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curv = (d1 - d0) / (x2 - x0);
    if curv >= T::zero() {
        return (tau[i], h[i]);
    }
    // y = y1 + b(x − x1) + curv(x − x1)², with b the slope at x1
    let b = d0 + curv * (x1 - x0);
    let dx = -b / (T::lit(2.0) * curv);
    let dx = dx.max(x0 - x1).min(x2 - x1);
    (x1 + dx, y1 + b * dx + curv * dx * dx)
}

/// Collapse, revival and super-revival features of an inversion trace.
pub fn detect_revivals<T: Real>(trace: &EvolutionResult<T>, cfg: &RevivalConfig<T>) -> Result<RevivalReport<T>> {
    let t_r = cfg.revival_scale.or_else(|| trace.revival_time());
    let tau_max = trace.grid.tau_max();
    if let Some(t_r) = t_r {
        if tau_max < t_r {
            return Err(Error::TraceTooShort {
                span: tau_max.as_f64(),
                required: t_r.as_f64(),
            });
        }
    }
    let env = envelope(trace, cfg.window_tau)?;
    let tau = trace.tau();
    let h: Vec<T> = env.iter().map(EnvelopePoint::height).collect();

    let collapse_tau = env
        .iter()
        .zip(&h)
        .find(|(_, &hi)| hi < cfg.collapse_threshold)
        .map(|(p, _)| p.tau);

    let ceiling = T::one() + T::tol(1e-9);
    let mut revival_events = Vec::new();
    let mut last_trough: Option<T> = None;
    for ext in zigzag(&h, cfg.collapse_threshold) {
        match ext {
            Extremum::Trough(i) => last_trough = Some(h[i]),
            Extremum::Peak(i) => {
                if let Some(floor) = last_trough {
                    if h[i] - floor >= cfg.revival_threshold {
                        let (tau_peak, amplitude) = refine_peak(tau, &h, i);
                        revival_events.push(RevivalEvent {
                            tau_peak,
                            amplitude: amplitude.max(T::zero()).min(ceiling),
                        });
                    }
                }
            }
        }
    }

    let scale = t_r.or_else(|| revival_events.first().map(|e| e.tau_peak));
    let super_revival = match scale {
        Some(scale) => long_scale_modulation(tau, &h, scale, cfg.super_revival_depth),
        None => SuperRevival {
            detected: false,
            envelope_period: None,
            modulation_depth: T::zero(),
        },
    };

    Ok(RevivalReport {
        collapse_tau,
        revival_events,
        super_revival,
    })
}

/// Trough-then-peak depth of the running max of `h` over `±scale`.
fn long_scale_modulation<T: Real>(tau: &[T], h: &[T], scale: T, threshold: T) -> SuperRevival<T> {
    let a: Vec<T> = sliding_extremes(tau, h, scale).into_iter().map(|(hi, _)| hi).collect();
    let n = a.len();
    let mut prefix = Vec::with_capacity(n);
    let mut best = 0;
    for i in 0..n {
        if a[i] > a[best] {
            best = i;
        }
        prefix.push(best);
    }
    let mut suffix = vec![n - 1; n];
    let mut best = n - 1;
    for i in (0..n).rev() {
        if a[i] > a[best] {
            best = i;
        }
        suffix[i] = best;
    }
    let mut depth = T::zero();
    let mut period = None;
    for i in 0..n {
        let d = (a[prefix[i]] - a[i]).min(a[suffix[i]] - a[i]);
        if d > depth {
            depth = d;
            period = Some(tau[suffix[i]] - tau[prefix[i]]);
        }
    }
    let depth = depth.min(T::one());
    SuperRevival {
        detected: depth >= threshold,
        envelope_period: period.filter(|_| depth >= threshold),
        modulation_depth: depth,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint<T> {
    pub n_max: usize,
    pub sup_deviation: T,
}

/// Sup-norm change of the full-Hamiltonian inversion between consecutive cutoffs,
/// for a qubit starting in `|e⟩` and the field in `|α⟩`.
pub fn convergence_study<T: Real>(
    p: &SystemParams<T>,
    alpha: Complex<T>,
    grid: &TimeGrid<T>,
    cutoffs: &[FockCutoff],
) -> Result<Vec<ConvergencePoint<T>>> {
    if cutoffs.len() < 2 {
        return Err(Error::InvalidParams("convergence study needs at least 2 cutoffs".into()));
    }
    if cutoffs.windows(2).any(|w| w[1].n_max() < w[0].n_max()) {
        return Err(Error::InvalidParams("cutoffs must be non-decreasing".into()));
    }
    let traces = cutoffs
        .iter()
        .map(|&c| {
            let psi0 = StateVector::product(QubitState::Excited, &coherent_state(alpha, c, true)?)?;
            let h = build_full_hamiltonian(p, c)?;
            Ok(evolve_numeric(&h, &psi0, grid)?.sigma_z_trace)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(traces
        .windows(2)
        .zip(cutoffs.iter().skip(1))
        .map(|(pair, c)| ConvergencePoint {
            n_max: c.n_max(),
            sup_deviation: pair[0]
                .iter()
                .zip(&pair[1])
                .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).abs())),
        })
        .collect())
}
