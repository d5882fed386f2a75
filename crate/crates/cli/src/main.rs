//! `scq`: simulate, compare and analyze qubit-inversion traces.

mod config;
mod trace_io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use scq_core::analysis::detect_revivals;
use scq_core::hamiltonians::{resonance_check, Resonance};
use scq_core::{validation, Error, Evolution, Grid, Method, RevivalConfig, Scenario};

use config::RunConfig;
use trace_io::Table;

#[derive(Parser)]
#[command(name = "scq", version, about = "Charge qubit in a cavity: inversion traces and revival analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method and write `tau,W`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept a Fock cutoff below the sizing rule.
        #[arg(long)]
        allow_small_cutoff: bool,
    },
    /// Run the series, transformed-frame and full-Hamiltonian routes side by side.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_small_cutoff: bool,
    },
    /// Report collapse, revivals and super-revival of a trace CSV.
    Analyze {
        #[arg(long)]
        trace: PathBuf,
        /// W column to analyze; defaults to the first one.
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        window: f64,
        #[arg(long, default_value_t = 0.1)]
        collapse_threshold: f64,
        #[arg(long, default_value_t = 0.25)]
        revival_threshold: f64,
        /// Ordinary revival time; defaults to 2π√(mean_photon) from the trace metadata.
        #[arg(long)]
        revival_scale: Option<f64>,
    },
    /// Run the numerical invariant checks.
    Validate,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

/// Parameter and input problems exit 2; everything the numerics reject exits 3.
fn classify(error: anyhow::Error) -> Failure {
    let code = match error.downcast_ref::<Error>() {
        Some(
            Error::CutoffTooSmall { .. }
            | Error::Eigendecomposition { .. }
            | Error::SeriesNotConverged { .. }
            | Error::ComplexInversion { .. }
            | Error::NotHermitian { .. }
            | Error::SpaceMismatch { .. }
            | Error::DimensionMismatch { .. },
        ) => 3,
        _ => 2,
    };
    Failure { code, error }
}

fn metadata(cfg: &RunConfig, scenario: &Scenario<f64>, grid: &Grid) -> Vec<(String, String)> {
    let p = &scenario.params;
    vec![
        ("omega".into(), p.omega.to_string()),
        ("e_z".into(), p.e_z.to_string()),
        ("e_j".into(), p.e_j.to_string()),
        ("gamma".into(), p.gamma.to_string()),
        ("beta_re".into(), p.beta.re.to_string()),
        ("beta_im".into(), p.beta.im.to_string()),
        ("alpha_re".into(), cfg.alpha_re.to_string()),
        ("alpha_im".into(), cfg.alpha_im.to_string()),
        ("n_max".into(), cfg.n_max.to_string()),
        ("g_magnitude".into(), grid.g_magnitude().to_string()),
    ]
}

fn run(scenario: &Scenario<f64>, method: Method, grid: &Grid) -> Result<Evolution, Failure> {
    scenario.run(method, grid).map_err(|e| classify(e.into()))
}

fn output_path(cfg: &RunConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.output_path.clone())
}

fn load(config: &Path, allow_small_cutoff: bool) -> Result<(RunConfig, Scenario<f64>, Grid), Failure> {
    let cfg = RunConfig::load(config).map_err(usage)?;
    let scenario = cfg.scenario(allow_small_cutoff).map_err(classify)?;
    let grid = scenario.grid(cfg.tau_max, cfg.n_steps).map_err(|e| usage(e.into()))?;
    Ok((cfg, scenario, grid))
}

fn simulate(config: &Path, out: Option<PathBuf>, allow_small_cutoff: bool) -> Result<(), Failure> {
    let (cfg, scenario, grid) = load(config, allow_small_cutoff)?;
    let method = cfg.method.method();
    let trace = run(&scenario, method, &grid)?;
    let mut meta = vec![("method".to_string(), method.name().to_string())];
    meta.extend(metadata(&cfg, &scenario, &grid));
    if let Some(n) = trace.mean_photon {
        meta.push(("mean_photon".into(), n.to_string()));
    }
    let table = Table {
        meta,
        tau: grid.tau().to_vec(),
        columns: vec![("W".into(), trace.sigma_z_trace)],
    };
    let path = output_path(&cfg, out);
    table.write(&path).map_err(usage)?;
    log::info!("wrote {} samples to {}", grid.len(), path.display());
    Ok(())
}

fn deviations(a: &[f64], b: &[f64]) -> (f64, f64) {
    let sup = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mean = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64;
    (sup, mean)
}

fn compare(config: &Path, out: Option<PathBuf>, allow_small_cutoff: bool) -> Result<(), Failure> {
    let (cfg, scenario, grid) = load(config, allow_small_cutoff)?;
    let check = resonance_check(&scenario.params, Resonance::OnePhoton);
    if !check.satisfied {
        return Err(usage(anyhow!(
            "compare needs one-photon resonance (E_J = omega, gamma = pi/4 mod pi); detuning {}, gamma offset {}",
            check.detuning,
            check.gamma_offset
        )));
    }
    let analytic = run(&scenario, Method::AnalyticSeries, &grid)?;
    let transformed = run(&scenario, Method::TransformedAnalytic, &grid)?;
    let full = run(&scenario, Method::FullNumeric, &grid)?;
    let mut meta = vec![("method".to_string(), "compare".to_string())];
    meta.extend(metadata(&cfg, &scenario, &grid));
    if let Some(n) = analytic.mean_photon {
        meta.push(("mean_photon".into(), n.to_string()));
    }
    let pairs = [
        ("analytic_transformed", &analytic, &transformed),
        ("analytic_full", &analytic, &full),
        ("transformed_full", &transformed, &full),
    ];
    for (name, a, b) in pairs {
        let (sup, mean) = deviations(&a.sigma_z_trace, &b.sigma_z_trace);
        meta.push((format!("sup_dev_{name}"), sup.to_string()));
        meta.push((format!("mean_dev_{name}"), mean.to_string()));
    }
    let table = Table {
        meta,
        tau: grid.tau().to_vec(),
        columns: vec![
            ("W_analytic".into(), analytic.sigma_z_trace),
            ("W_transformed".into(), transformed.sigma_z_trace),
            ("W_full".into(), full.sigma_z_trace),
        ],
    };
    table.write(&output_path(&cfg, out)).map_err(usage)
}

fn format_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| format!("{v:.4}"))
}

fn analyze(trace: &Path, column: Option<String>, cfg: RevivalConfig<f64>) -> Result<(), Failure> {
    let table = Table::read(trace).map_err(usage)?;
    let name = column.unwrap_or_else(|| table.columns[0].0.clone());
    let w = table
        .column(&name)
        .ok_or_else(|| usage(anyhow!("no column `{name}` in {}", trace.display())))?
        .to_vec();
    let grid = Grid::new(table.tau.clone(), 1.0).map_err(|e| usage(e.into()))?;
    let mut evolution = Evolution::new(grid, w, Method::Numeric).map_err(|e| usage(e.into()))?;
    if let Some(n) = table.meta_map().get("mean_photon") {
        let n: f64 = n
            .parse()
            .map_err(|_| usage(anyhow!("metadata mean_photon = `{n}` is not a number")))?;
        evolution = evolution.with_mean_photon(n);
    }
    let report = detect_revivals(&evolution, &cfg).map_err(|e| usage(e.into()))?;
    println!("column: {name}");
    println!("collapse_tau: {}", format_opt(report.collapse_tau));
    println!("revival_events: {}", report.revival_events.len());
    for e in &report.revival_events {
        println!("  tau_peak = {:.4}, amplitude = {:.4}", e.tau_peak, e.amplitude);
    }
    let sr = &report.super_revival;
    println!(
        "super_revival: {}",
        if sr.detected { "detected" } else { "not detected" }
    );
    println!("modulation_depth: {:.4}", sr.modulation_depth);
    println!("envelope_period: {}", format_opt(sr.envelope_period));
    Ok(())
}

fn validate() -> Result<(), Failure> {
    let report = validation::run_all();
    for c in &report.checks {
        println!(
            "{} {:<36} value {:.3e}  tol {:.0e}  {:.1} ms",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance,
            c.runtime.as_secs_f64() * 1e3
        );
    }
    println!(
        "{} checks, {} failed, {:.2} s",
        report.checks.len(),
        report.failures().count(),
        report.total_runtime.as_secs_f64()
    );
    if !report.all_passed() {
        return Err(Failure {
            code: 1,
            error: anyhow!("validation failed"),
        });
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            allow_small_cutoff,
        } => simulate(&config, out, allow_small_cutoff),
        Command::Compare {
            config,
            out,
            allow_small_cutoff,
        } => compare(&config, out, allow_small_cutoff),
        Command::Analyze {
            trace,
            column,
            window,
            collapse_threshold,
            revival_threshold,
            revival_scale,
        } => {
            if revival_scale.is_some_and(|s| !(s > 0.0)) {
                return Err(usage(anyhow!("--revival-scale must be positive")));
            }
            let cfg = RevivalConfig {
                collapse_threshold,
                revival_threshold,
                window_tau: window,
                revival_scale,
                ..RevivalConfig::default()
            };
            analyze(&trace, column, cfg)
        }
        Command::Validate => validate(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
