//! Subcommand implementations: each reads a JSON config, runs the solver
//! machinery, and emits CSV/JSON into the output directory.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use blackstock::error::SolveError;
use blackstock::io::{
    write_coefficient_csv, write_residual_history_csv, write_symbol_csv, write_trajectory_csv,
};
use blackstock::linear::{check_invertibility, symbol, symbol_rows};
use blackstock::model::ProblemSpec;
use blackstock::oracle::{compare, find_attractor, OracleConfig, OracleState};
use blackstock::picard::{forcing_spec_from_field, manufactured_rhs, solve, SolveReport};
use blackstock::spectral::norms::{l2_norm, ps_norm};
use blackstock::spectral::{Basis, SpectralField};

use crate::config::*;

/// Process exit codes: `0` success, `1` bad config, `2` divergence or
/// resonance, `3` incompatible Neumann data, `4` attractor not found.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_INCOMPATIBLE: i32 = 3;
pub const EXIT_NO_ATTRACTOR: i32 = 4;

pub fn exit_code_for(err: &SolveError) -> i32 {
    match err {
        SolveError::IncompatibleData { .. } => EXIT_INCOMPATIBLE,
        SolveError::Resonance { .. } => EXIT_DIVERGED,
        SolveError::AttractorNotFound { .. } | SolveError::OutOfRegime { .. } => EXIT_NO_ATTRACTOR,
        _ => EXIT_CONFIG,
    }
}

/// Expands validation failures into their per-field diagnostics.
pub fn describe_error(err: &SolveError) -> String {
    match err {
        SolveError::Validation(v) => format!("{err}: {}", v.describe()),
        _ => err.to_string(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
}

fn write_solution(out_dir: &Path, field: &SpectralField<f64>) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(out_dir.join("solution.csv"))?);
    write_coefficient_csv(&mut f, field)
}

fn write_report(out_dir: &Path, report: &SolveReport<f64>) -> std::io::Result<()> {
    write_json(&out_dir.join("report.json"), report)?;
    let mut f = BufWriter::new(File::create(out_dir.join("residual_history.csv"))?);
    write_residual_history_csv(&mut f, report)
}

/// `solve`: one fixed-point run; emits solution coefficients, the solve
/// report, and the residual history.
pub fn cmd_solve(cfg: &SolveConfig, out_dir: &Path) -> Result<i32, String> {
    let problem = cfg.problem.build()?;
    let fp = cfg.fixed_point.build();
    match solve(&problem, &fp) {
        Ok((solution, report)) => {
            write_solution(out_dir, &solution.banded_total()).map_err(|e| e.to_string())?;
            write_report(out_dir, &report).map_err(|e| e.to_string())?;
            Ok(if report.converged {
                EXIT_OK
            } else {
                EXIT_DIVERGED
            })
        }
        Err(e) => {
            eprintln!("solve failed: {}", describe_error(&e));
            Ok(exit_code_for(&e))
        }
    }
}

/// `mms`: manufactured-solution verification across resolutions.
pub fn cmd_mms(cfg: &MmsConfig, out_dir: &Path) -> Result<i32, String> {
    let template = cfg.problem.build()?;
    if cfg.resolutions.is_empty() {
        return Err("mms requires at least one resolution".into());
    }
    for r in &cfg.resolutions {
        if r.n_spatial_modes.len() != template.domain.dimension {
            return Err("resolution dimensionality does not match the domain".into());
        }
    }
    // the largest listed resolution must contain the manufactured solution
    let max_res = cfg
        .resolutions
        .iter()
        .max_by_key(|r| {
            (
                r.n_temporal_modes,
                r.n_spatial_modes.iter().product::<usize>(),
            )
        })
        .unwrap();
    let max_basis = Basis::from_domain(&template.domain, &max_res.n_spatial_modes);
    let mut u_star =
        SpectralField::zero(max_basis.clone(), max_res.n_temporal_modes, template.period);
    for term in &cfg.manufactured {
        if term.temporal_mode.unsigned_abs() as usize > max_res.n_temporal_modes {
            return Err(format!(
                "manufactured mode m = {} is outside the largest listed resolution",
                term.temporal_mode
            ));
        }
        for (axis, &n) in term.spatial.iter().enumerate() {
            let limit = max_res.n_spatial_modes[axis];
            let ok = match template.domain.bc_kind {
                blackstock::model::BcKind::Dirichlet => n >= 1 && n <= limit,
                blackstock::model::BcKind::Neumann => n <= limit,
            };
            if !ok {
                return Err(format!(
                    "manufactured wavenumber {n} on axis {axis} is outside the largest listed resolution"
                ));
            }
        }
        u_star.add_real_mode(
            term.temporal_mode,
            &term.spatial,
            term.amplitude,
            term.phase,
        );
    }
    let fp = cfg.fixed_point.build();
    let u_star_norm_ps = ps_norm(&u_star).max(f64::MIN_POSITIVE);
    let u_star_norm_l2 = l2_norm(&u_star).max(f64::MIN_POSITIVE);

    let mut csv = String::from("m_modes");
    for axis in 0..template.domain.dimension {
        csv.push_str(&format!(",n{}", axis + 1));
    }
    csv.push_str(",rel_ps_error,rel_l2_error\n");

    for res in &cfg.resolutions {
        let basis = Basis::from_domain(&template.domain, &res.n_spatial_modes);
        let u_res = u_star.resample(&basis, res.n_temporal_modes);
        let f_res = manufactured_rhs(&u_res, &template.params);
        let mut problem = template.clone();
        problem.n_temporal_modes = res.n_temporal_modes;
        problem.n_spatial_modes = res.n_spatial_modes.clone();
        problem.forcing = forcing_spec_from_field(&f_res);
        match solve(&problem, &fp) {
            Ok((solution, report)) => {
                if !report.converged {
                    return Err(format!(
                        "manufactured solve diverged at resolution M = {}",
                        res.n_temporal_modes
                    ));
                }
                // compare in the widest band so truncated content counts
                let diff = solution
                    .banded_total()
                    .resample(&max_basis, max_res.n_temporal_modes)
                    .sub(&u_star);
                csv.push_str(&format!("{}", res.n_temporal_modes));
                for n in &res.n_spatial_modes {
                    csv.push_str(&format!(",{n}"));
                }
                csv.push_str(&format!(
                    ",{},{}\n",
                    ps_norm(&diff) / u_star_norm_ps,
                    l2_norm(&diff) / u_star_norm_l2
                ));
            }
            Err(e) => {
                eprintln!("mms solve failed: {}", describe_error(&e));
                return Ok(exit_code_for(&e));
            }
        }
    }
    std::fs::write(out_dir.join("mms_errors.csv"), csv).map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

/// `resonance-sweep`: scales the dissipation pair `(a, b)` through a grid of
/// factors, recording the smallest oscillatory `|sigma|` and the linear
/// response amplitude at the tuned mode.
pub fn cmd_resonance_sweep(cfg: &ResonanceSweepConfig, out_dir: &Path) -> Result<i32, String> {
    let problem = cfg.problem.build()?;
    if cfg.deltas.iter().any(|&d| d <= 0.0) {
        return Err("dissipation scales must be positive".into());
    }
    let basis = Basis::from_domain(&problem.domain, &problem.n_spatial_modes);
    let tuned_flat = basis.flat_of_wavenumbers(&cfg.tuned.spatial);
    let tuned_lambda = basis.eigenvalue(tuned_flat);
    if cfg.tuned.temporal_mode == 0
        || cfg.tuned.temporal_mode.unsigned_abs() as usize > problem.n_temporal_modes
    {
        return Err("tuned temporal mode must be oscillatory and in band".into());
    }
    let omega = problem.omega();

    let rows: Vec<(f64, f64, f64)> = cfg
        .deltas
        .par_iter()
        .map(|&delta| {
            let scaled = problem.params.scaled_dissipation(delta);
            let scan =
                check_invertibility(&scaled, problem.period, problem.n_temporal_modes, &basis);
            let min_sigma = match scan {
                Ok(s) => s.min_abs_sigma,
                Err(SolveError::Resonance { abs_sigma, .. }) => abs_sigma,
                Err(_) => f64::NAN,
            };
            let response =
                1.0 / symbol(cfg.tuned.temporal_mode, tuned_lambda, &scaled, omega).norm();
            (delta, min_sigma, response)
        })
        .collect();

    let mut csv = String::from("delta,min_abs_sigma,response_amplitude\n");
    for (delta, min_sigma, response) in &rows {
        csv.push_str(&format!("{delta},{min_sigma},{response}\n"));
    }
    std::fs::write(out_dir.join("sweep.csv"), csv).map_err(|e| e.to_string())?;

    // full symbol table at the unscaled parameters
    let mut f =
        BufWriter::new(File::create(out_dir.join("symbols.csv")).map_err(|e| e.to_string())?);
    let table = symbol_rows(
        &problem.params,
        problem.period,
        problem.n_temporal_modes,
        &basis,
    );
    write_symbol_csv(&mut f, &table).map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ComparisonOutput {
    rel_l2: f64,
    max_abs_diff: f64,
    ref_l2: f64,
    periods_used: usize,
    final_period_diff: f64,
    solver_iterations: usize,
}

/// `oracle-compare`: harmonic-balance fixed point against the time-stepping
/// attractor.
pub fn cmd_oracle_compare(
    cfg: &OracleCompareConfig,
    out_dir: &Path,
    seed: u64,
) -> Result<i32, String> {
    let problem = cfg.problem.build()?;
    let fp = cfg.fixed_point.build();
    let (solution, report) = match solve(&problem, &fp) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("solve failed: {}", describe_error(&e));
            return Ok(exit_code_for(&e));
        }
    };
    write_solution(out_dir, &solution.banded_total()).map_err(|e| e.to_string())?;
    write_report(out_dir, &report).map_err(|e| e.to_string())?;
    if !report.converged {
        eprintln!("fixed-point iteration diverged; no comparison possible");
        return Ok(EXIT_DIVERGED);
    }

    let oracle_cfg = OracleConfig {
        dt: problem.period / cfg.oracle.steps_per_period as f64,
        max_periods: cfg.oracle.max_periods,
        tol: cfg.oracle.tol,
    };
    let initial = if cfg.oracle.random_initial {
        let basis = Basis::from_domain(&problem.domain, &problem.n_spatial_modes);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = cfg.oracle.initial_scale;
        let mut state = OracleState::zero(basis.spatial_len());
        for v in state
            .u
            .iter_mut()
            .chain(state.w.iter_mut())
            .chain(state.zeta.iter_mut())
        {
            *v = rng.gen_range(-scale..=scale);
        }
        Some(state)
    } else {
        None
    };
    let trajectory = match find_attractor(&problem, &oracle_cfg, initial) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("attractor search failed: {}", describe_error(&e));
            return Ok(exit_code_for(&e));
        }
    };
    let comparison = compare(&solution.banded_total(), &trajectory).map_err(|e| e.to_string())?;

    let mut f =
        BufWriter::new(File::create(out_dir.join("trajectory.csv")).map_err(|e| e.to_string())?);
    write_trajectory_csv(&mut f, &trajectory).map_err(|e| e.to_string())?;
    write_json(
        &out_dir.join("comparison.json"),
        &ComparisonOutput {
            rel_l2: comparison.rel_l2,
            max_abs_diff: comparison.max_abs_diff,
            ref_l2: comparison.ref_l2,
            periods_used: trajectory.periods_used,
            final_period_diff: trajectory.final_period_diff,
            solver_iterations: report.iterations,
        },
    )
    .map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ScanEntryOutput {
    amplitude: f64,
    converged: bool,
    iterations: usize,
    mean_ratio: Option<f64>,
}

#[derive(Serialize)]
struct ScanOutput {
    entries: Vec<ScanEntryOutput>,
    largest_converged: Option<f64>,
    smallest_diverged: Option<f64>,
}

/// `epsilon-scan`: the solver across a monotone amplitude grid; independent
/// solves fan out across the worker pool.
pub fn cmd_epsilon_scan(cfg: &EpsilonScanConfig, out_dir: &Path) -> Result<i32, String> {
    let problem = cfg.problem.build()?;
    let fp = cfg.fixed_point.build();
    if cfg.amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err("amplitude grid must be strictly increasing".into());
    }
    let results: Vec<Result<(f64, SolveReport<f64>), SolveError>> = cfg
        .amplitudes
        .par_iter()
        .map(|&amp| {
            let scaled: ProblemSpec<f64> = problem.scaled_data(amp);
            solve(&scaled, &fp).map(|(_, report)| (amp, report))
        })
        .collect();

    let mut entries = Vec::new();
    let mut largest_converged = None;
    let mut smallest_diverged = None;
    for result in results {
        match result {
            Ok((amp, report)) => {
                let mean_ratio = if report.contraction_ratios.is_empty() {
                    None
                } else {
                    Some(
                        report.contraction_ratios.iter().sum::<f64>()
                            / report.contraction_ratios.len() as f64,
                    )
                };
                if report.converged {
                    largest_converged = Some(amp);
                } else if smallest_diverged.is_none() {
                    smallest_diverged = Some(amp);
                }
                entries.push(ScanEntryOutput {
                    amplitude: amp,
                    converged: report.converged,
                    iterations: report.iterations,
                    mean_ratio,
                });
            }
            Err(e) => {
                eprintln!("scan solve failed: {}", describe_error(&e));
                return Ok(exit_code_for(&e));
            }
        }
    }

    let mut csv = String::from("amplitude,converged,iterations,mean_ratio\n");
    for e in &entries {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            e.amplitude,
            e.converged,
            e.iterations,
            e.mean_ratio.map(|r| r.to_string()).unwrap_or_default()
        ));
    }
    std::fs::write(out_dir.join("scan.csv"), csv).map_err(|e| e.to_string())?;
    write_json(
        &out_dir.join("threshold.json"),
        &ScanOutput {
            entries,
            largest_converged,
            smallest_diverged,
        },
    )
    .map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}
