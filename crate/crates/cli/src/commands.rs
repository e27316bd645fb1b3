use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use stroblim_core::experiments::{
    check_sweep, run_method, run_scenario, sweep_point, sweep_report, Scenario,
};
use stroblim_core::trajectory::Method;

use crate::csv_io::{output_columns, write_deviations, write_sweep, TrajectoryTable};
use crate::error::{CliError, Outcome};
use crate::plot::{render, PlotKind};
use crate::scenario;

pub const THREADS_ENV: &str = "STROBLIM_THREADS";

/// Options shared by the scenario commands.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub grid_points: Option<usize>,
    pub tolerance: Option<f64>,
}

fn load(path: &Path, opts: &RunOptions) -> Result<Scenario, CliError> {
    let mut s = scenario::load(path)?.scenario;
    if let Some(n) = opts.grid_points {
        if n < 2 {
            return Err(CliError::Usage("--grid-points must be at least 2".into()));
        }
        s.grid_points = Some(n);
    }
    if let Some(tol) = opts.tolerance {
        if !(tol >= 0.0) {
            return Err(CliError::Usage("--tolerance must be non-negative".into()));
        }
        s.tolerance = tol;
    }
    Ok(s)
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn unique_methods(methods: &[Method]) -> Vec<Method> {
    let mut out = Vec::new();
    for &m in methods {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Writes `{name}_{method}.csv` for each method and `{name}.csv` with all rows.
pub fn run(path: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let s = load(path, opts)?;
    prepare_dir(&opts.out_dir)?;
    let columns = output_columns(&s.outputs, s.hamiltonian.dims().sys);
    let mut combined = TrajectoryTable::new(columns.clone());
    let mut written = Vec::new();
    for method in unique_methods(&s.methods) {
        let mut table = TrajectoryTable::new(columns.clone());
        for st in &s.initial_states {
            let traj = run_method(&s, &st.state, method)?;
            if let Some(cut) = &traj.truncated {
                warn!(
                    "{} {}: stopped at t = {} (success probability {:e})",
                    st.label, method, cut.t, cut.probability
                );
            }
            table.push_trajectory(&st.label, &traj);
        }
        let file = opts
            .out_dir
            .join(format!("{}_{}.csv", s.name, method.tag()));
        table.write(&file)?;
        info!("wrote {}", file.display());
        combined.rows.extend(table.rows);
        written.push(file);
    }
    let file = opts.out_dir.join(format!("{}.csv", s.name));
    combined.write(&file)?;
    info!("wrote {}", file.display());
    written.push(file);
    Ok(written)
}

/// Runs all methods, writes `{name}_deviation.csv` and returns the verdict
/// with a printable summary.
pub fn compare(path: &Path, opts: &RunOptions) -> Result<(Outcome, String), CliError> {
    let s = load(path, opts)?;
    if s.methods.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least two methods, scenario '{}' lists {}",
            s.name,
            s.methods.len()
        )));
    }
    prepare_dir(&opts.out_dir)?;
    let report = run_scenario(&s)?;
    let file = opts.out_dir.join(format!("{}_deviation.csv", s.name));
    write_deviations(&file, &report.comparisons)?;
    info!("wrote {}", file.display());
    let outcome = if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    let summary = format!(
        "{report}max {} deviation {:.6e} tolerance {:.6e}: {}\n",
        s.metric.tag(),
        report.max_deviation(),
        s.tolerance,
        if outcome == Outcome::Pass {
            "PASS"
        } else {
            "FAIL"
        }
    );
    Ok((outcome, summary))
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
    }
}

/// Convergence table at fixed Ω over the given τ values; PASS iff the
/// deviation strictly decreases in the order given.
pub fn sweep(path: &Path, taus: &[f64], opts: &RunOptions) -> Result<(Outcome, String), CliError> {
    check_sweep(taus).map_err(|e| CliError::Usage(e.to_string()))?;
    let s = load(path, opts)?;
    if s.methods.len() < 2 {
        return Err(CliError::Usage(
            "a sweep needs two methods to compare".into(),
        ));
    }
    prepare_dir(&opts.out_dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let points = pool.install(|| {
        taus.par_iter()
            .map(|&tau| sweep_point(&s, tau))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let report = sweep_report(&s, points);
    let file = opts.out_dir.join(format!("{}_sweep.csv", s.name));
    write_sweep(&file, &report.convergence)?;
    info!("wrote {}", file.display());
    let outcome = if report.convergence.strictly_decreasing() {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    let summary = format!(
        "{report}deviation {}: {}\n",
        if outcome == Outcome::Pass {
            "strictly decreasing"
        } else {
            "not strictly decreasing"
        },
        if outcome == Outcome::Pass {
            "PASS"
        } else {
            "FAIL"
        }
    );
    Ok((outcome, summary))
}

pub fn plot(csv: &Path, svg: &Path) -> Result<PlotKind, CliError> {
    let table = TrajectoryTable::read(csv)?;
    let kind = PlotKind::detect(&table).ok_or_else(|| {
        CliError::Schema(format!(
            "{}: needs a p_up column or r1 and r3 columns",
            csv.display()
        ))
    })?;
    let text = render(&table, kind)?;
    if let Some(parent) = svg.parent().filter(|p| !p.as_os_str().is_empty()) {
        prepare_dir(parent)?;
    }
    fs::write(svg, text).map_err(|e| CliError::io(svg, e))?;
    info!("wrote {}", svg.display());
    Ok(kind)
}
