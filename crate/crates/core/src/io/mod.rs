//! Run orchestration: configuration, snapshots, ledger files and the
//! convergence driver.

pub mod config;
pub mod snapshot;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::{info, warn};
use thiserror::Error;

use crate::diagnostics::{eoc_column, l1_error, restrict, DiagnosticsError, ErrorReport, RunLedger, LEDGER_COLUMNS, LEDGER_SCHEMA};
use crate::driver::{RunError, Simulation};
use crate::grid::{Grid, State};
use crate::problems::ProblemSpec;
use crate::Real;

pub use config::{parse_config, ConfigError, Precision, RunConfig};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotError, SnapshotHeader};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNPHYSICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum RunFailure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("setup failed: {0}")]
    Setup(RunError),
    #[error("{error}; failure snapshot written to {}", snapshot.display())]
    Unphysical { error: RunError, snapshot: PathBuf },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

impl RunFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunFailure::Config(_) | RunFailure::Setup(_) => EXIT_CONFIG,
            RunFailure::Unphysical { .. } => EXIT_UNPHYSICAL,
            _ => 1,
        }
    }
}

/// What a completed run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub steps: usize,
    pub t: f64,
    pub ledger: RunLedger,
    pub final_snapshot: PathBuf,
    pub ledger_file: PathBuf,
}

/// Renders the ledger as CSV with a schema comment line.
pub fn ledger_csv(ledger: &RunLedger) -> String {
    let mut s = format!("# mhd4 ledger schema {LEDGER_SCHEMA}\n{}\n", LEDGER_COLUMNS.join(","));
    for r in &ledger.rows {
        let v = r.values();
        let cells: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn write_state<T: Real>(dir: &Path, name: &str, cfg: &RunConfig, sim: &Simulation<T>) -> Result<PathBuf, SnapshotError> {
    let path = dir.join(name);
    let h = snapshot::header_for(&sim.grid, &sim.scheme.eos, sim.t(), sim.clock.step, cfg.scheme.name(), cfg.problem.name());
    write_snapshot(&path, &h, &sim.grid, &sim.state)?;
    Ok(path)
}

fn new_simulation<T: Real>(cfg: &RunConfig, n: [usize; 3]) -> Result<Simulation<T>, RunFailure> {
    let mut sim = Simulation::<T>::new(&cfg.problem, n, cfg.scheme_config(), cfg.t_end).map_err(RunFailure::Setup)?;
    sim.clock.c_cfl = T::lit(cfg.cfl);
    sim.ledger_every = cfg.ledger_every;
    Ok(sim)
}

fn run_typed<T: Real>(cfg: &RunConfig) -> Result<RunSummary, RunFailure> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let mut sim = new_simulation::<T>(cfg, cfg.resolution)?;
    info!("{} {:?} {} to t = {}", cfg.problem.name(), cfg.resolution, cfg.scheme.name(), cfg.t_end);
    write_state(&dir, "snapshot_0000.snap", cfg, &sim)?;
    let ledger_file = dir.join("ledger.csv");
    let mut next_snap = cfg.snapshot_interval;
    let mut count = 1;
    let mut io_err: Option<SnapshotError> = None;
    let result = sim.run_with(|s| {
        if cfg.snapshot_interval > 0.0 && s.t() >= next_snap && s.t() < cfg.t_end {
            if let Err(e) = write_state(&dir, &format!("snapshot_{count:04}.snap"), cfg, s) {
                io_err.get_or_insert(e);
            }
            count += 1;
            while next_snap <= s.t() {
                next_snap += cfg.snapshot_interval;
            }
        }
    });
    fs::write(&ledger_file, ledger_csv(&sim.ledger))?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    match result {
        Ok(()) => {
            let final_snapshot = write_state(&dir, "final.snap", cfg, &sim)?;
            info!("finished after {} steps, max |div B| = {:.3e}", sim.clock.step, sim.ledger.max_div_b());
            Ok(RunSummary { steps: sim.clock.step, t: sim.t(), ledger: sim.ledger, final_snapshot, ledger_file })
        }
        Err(error) => {
            warn!("{error}");
            let snapshot = write_state(&dir, "failure.snap", cfg, &sim)?;
            Err(RunFailure::Unphysical { error, snapshot })
        }
    }
}

/// Initialises, advances to `t_end` and writes snapshots plus `ledger.csv`
/// into the output directory. An unrecoverable state writes `failure.snap`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, RunFailure> {
    cfg.validate()?;
    match cfg.precision {
        Precision::F64 => run_typed::<f64>(cfg),
        Precision::F32 => run_typed::<f32>(cfg),
    }
}

/// One line of a convergence table.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub error: ErrorReport,
    pub eoc: Option<f64>,
    pub max_div_b: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub problem: String,
    pub scheme: String,
    pub t: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn csv(&self) -> String {
        let mut s = String::from("resolution,delta_w_mean,eoc,max_div_b,per_variable\n");
        for r in &self.rows {
            let per: Vec<String> = r.error.per_variable.iter().map(|x| format!("{x:.6e}")).collect();
            let eoc = r.eoc.map_or(String::new(), |x| format!("{x:.4}"));
            let _ = writeln!(s, "{},{:.6e},{},{:.3e},{}", r.resolution, r.error.mean, eoc, r.max_div_b, per.join(" "));
        }
        s
    }

    pub fn text(&self) -> String {
        let mut s = format!("{} / {} at t = {}\n{:>10} {:>14} {:>8}\n", self.problem, self.scheme, self.t, "N", "dW_mean", "EOC");
        for r in &self.rows {
            let eoc = r.eoc.map_or("-".to_string(), |x| format!("{x:.2}"));
            let _ = writeln!(s, "{:>10} {:>14.4e} {:>8}", r.resolution, r.error.mean, eoc);
        }
        s
    }
}

/// Resolution `r` on every axis the configuration leaves active.
pub fn scaled_resolution(cfg: &RunConfig, r: usize) -> [usize; 3] {
    cfg.resolution.map(|n| if n > 1 { r } else { 1 })
}

fn has_exact_return(p: &ProblemSpec) -> bool {
    matches!(p, ProblemSpec::AlfvenWave { .. } | ProblemSpec::MhdVortex3d { .. })
}

fn converge_typed<T: Real>(cfg: &RunConfig, resolutions: &[usize]) -> Result<ConvergenceTable, RunFailure> {
    let exact = has_exact_return(&cfg.problem);
    let reference: Option<(Grid<T>, State<T>)> = if exact {
        None
    } else {
        let r = cfg.reference.ok_or(ConfigError::Missing("converge.reference"))?;
        let mut sim = new_simulation::<T>(cfg, scaled_resolution(cfg, r))?;
        info!("reference run at {r}");
        sim.run().map_err(|error| RunFailure::Unphysical { error, snapshot: PathBuf::new() })?;
        Some((sim.grid, sim.state))
    };
    let mut rows = Vec::new();
    for &r in resolutions {
        let mut sim = new_simulation::<T>(cfg, scaled_resolution(cfg, r))?;
        let initial = sim.state.clone();
        sim.run().map_err(|error| RunFailure::Unphysical { error, snapshot: PathBuf::new() })?;
        let target = match &reference {
            None => initial,
            Some((g, s)) => restrict(g, s, &sim.grid)?,
        };
        let error = l1_error(&sim.grid, &sim.state, &target, &sim.scheme.eos);
        info!("{r}: dW_mean = {:.4e}", error.mean);
        rows.push(ConvergenceRow { resolution: r, error, eoc: None, max_div_b: sim.ledger.max_div_b() });
    }
    let orders = eoc_column(&rows.iter().map(|r| (r.resolution, r.error.mean)).collect::<Vec<_>>());
    for (row, o) in rows.iter_mut().zip(orders) {
        row.eoc = o;
    }
    Ok(ConvergenceTable { problem: cfg.problem.name().into(), scheme: cfg.scheme.name().into(), t: cfg.t_end, rows })
}

/// Runs every resolution to `t_end` and tabulates `dW_mean` and the EOC.
/// Periodic-return problems compare against their initial state; the others
/// against a run at `converge.reference`, restricted to each test grid.
pub fn convergence_suite(cfg: &RunConfig, resolutions: &[usize]) -> Result<ConvergenceTable, RunFailure> {
    cfg.validate()?;
    let table = match cfg.precision {
        Precision::F64 => converge_typed::<f64>(cfg, resolutions)?,
        Precision::F32 => converge_typed::<f32>(cfg, resolutions)?,
    };
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("convergence.csv"), table.csv())?;
    fs::write(dir.join("convergence.txt"), table.text())?;
    Ok(table)
}
