//! Command-line front end: `evolve`, `leakage`, `validate`, `sweep`.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 bad arguments or
//! config, 3 numeric event (pole, degeneracy, non-finite value) outside
//! sweeps. `validate` also returns 1 when a criterion fails without a
//! documented cause.

pub mod config;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::integrator::{evolve, Termination, Trajectory};
use crate::leakage::{leakage_large_j, leakage_rate, leakage_spin_half};
use crate::validation::run_all;
pub use config::{ConfigError, Format, RawConfig, RunConfig};
pub use output::{Cell, Document, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pxp-tdvp", version, about = "TDVP dynamics and leakage for the spin-J PXP model")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// `key = value` config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; overrides `output.path`. Stdout when neither is set.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the equations of motion and write the trajectory.
    Evolve(Common),
    /// Energy, variance and leakage rate at the initial state.
    Leakage(Common),
    /// Run the built-in acceptance checks.
    Validate(Common),
    /// Evolve every point of a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numeric(crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) | CliError::Other(_) => EXIT_FAILURE,
        }
    }
}

/// What a command produced: the document to write and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    pub format: Format,
    pub destination: Option<PathBuf>,
    pub exit_code: i32,
    /// Lines for stderr.
    pub diagnostics: Vec<String>,
}

fn destination(common: &Common, cfg_output: Option<&str>) -> Option<PathBuf> {
    common.output.clone().or_else(|| cfg_output.map(PathBuf::from))
}

fn format_for(dest: Option<&PathBuf>, cfg: &RunConfig, raw: &RawConfig) -> Format {
    if raw.get("output.format").is_some() {
        return cfg.format;
    }
    match dest.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    }
}

fn with_format(mut cfg: RunConfig, format: Format) -> RunConfig {
    cfg.format = format;
    cfg
}

fn load(common: &Common) -> Result<(RawConfig, RunConfig), CliError> {
    let raw = RawConfig::load(&common.config)?;
    let cfg = RunConfig::resolve(&raw)?;
    Ok((raw, cfg))
}

fn trajectory_meta(traj: &Trajectory) -> Vec<(String, String)> {
    let mut meta = vec![
        ("termination".to_string(), traj.termination.as_str().to_string()),
        ("max_energy_drift".into(), output::fmt_num(traj.max_energy_drift())),
    ];
    if let Some(ev) = &traj.event {
        meta.push(("event_time".into(), output::fmt_num(ev.time)));
        meta.push(("event_substep".into(), ev.substep.to_string()));
        meta.push(("event_error".into(), ev.error.to_string()));
    }
    meta
}

pub fn cmd_evolve(common: &Common) -> Result<Outcome, CliError> {
    let (raw, cfg) = load(common)?;
    let traj = evolve(&cfg.state, &cfg.params, cfg.t_end, cfg.dt, cfg.rhs, cfg.record_every)
        .map_err(|e| CliError::Config(ConfigError { line: None, key: None, msg: e.to_string() }))?;
    let mut diagnostics = vec![];
    let mut exit_code = EXIT_OK;
    if let Some(ev) = &traj.event {
        exit_code = EXIT_NUMERIC;
        diagnostics.push(format!(
            "{} at t = {} (stage {}): {}",
            traj.termination.as_str(),
            ev.time,
            ev.substep,
            ev.error
        ));
        diagnostics.push(format!("theta = {:?}", ev.state.theta));
        diagnostics.push(format!("phi = {:?}", ev.state.phi));
    }
    if traj.drift_exceeds(cfg.drift_bound) {
        diagnostics.push(format!(
            "warning: energy drift {:e} exceeds {:e}; reduce run.dt",
            traj.max_energy_drift(),
            cfg.drift_bound
        ));
    }
    let dest = destination(common, cfg.output.as_deref());
    let format = format_for(dest.as_ref(), &cfg, &raw);
    let document = Document {
        config: with_format(cfg.clone(), format).resolved(),
        meta: trajectory_meta(&traj),
        table: output::trajectory_table(&traj, cfg.params.k),
    };
    Ok(Outcome { document, format, destination: dest, exit_code, diagnostics })
}

pub fn cmd_leakage(common: &Common) -> Result<Outcome, CliError> {
    let (raw, cfg) = load(common)?;
    let (p, s) = (&cfg.params, &cfg.state);
    let energy = crate::variational_energy(p, s).map_err(CliError::Numeric)?;
    let rep = leakage_rate(p, s).map_err(CliError::Numeric)?;
    let vel = cfg.rhs.velocity(p, s).map_err(CliError::Numeric)?;
    let mut rows: Vec<(String, f64)> = vec![
        ("energy".into(), energy),
        ("energy_per_site".into(), energy / p.k as f64),
        ("variance".into(), rep.total),
        ("variance_zz".into(), rep.var_zz),
        ("variance_zxxz".into(), rep.var_zxxz),
        ("variance_xx".into(), rep.var_xx),
        ("gamma2".into(), rep.gamma2),
        ("gamma2_raw".into(), rep.gamma2_raw),
    ];
    rows.extend(rep.gamma2_breakdown.iter().enumerate().map(|(i, v)| (format!("gamma2_term_{}", i + 1), *v)));
    if p.two_j() == 1 {
        rows.push(("gamma2_spin_half".into(), leakage_spin_half(p, s).map_err(CliError::Numeric)?));
    }
    if let Ok(v) = leakage_large_j(p, s) {
        rows.push(("gamma2_large_j".into(), v));
    }
    for i in 0..p.k {
        rows.push((format!("theta_dot_{}", i + 1), vel.theta_dot[i]));
    }
    for i in 0..p.k {
        rows.push((format!("phi_dot_{}", i + 1), vel.phi_dot[i]));
    }
    let table = Table {
        columns: vec!["quantity".into(), "value".into()],
        rows: rows.into_iter().map(|(k, v)| vec![Cell::Text(k), Cell::Num(v)]).collect(),
    };
    let dest = destination(common, cfg.output.as_deref());
    let format = format_for(dest.as_ref(), &cfg, &raw);
    let meta = vec![("rhs".to_string(), cfg.rhs.name().to_string())];
    Ok(Outcome {
        document: Document { config: with_format(cfg.clone(), format).resolved(), meta, table },
        format,
        destination: dest,
        exit_code: EXIT_OK,
        diagnostics: vec![],
    })
}

/// `validate` only reads `run.seed` and the output keys, so the model
/// section may be omitted.
pub fn cmd_validate(common: &Common) -> Result<Outcome, CliError> {
    let raw = RawConfig::load(&common.config)?;
    let seed: u64 = raw.parsed("run.seed")?.unwrap_or(crate::validation::DEFAULT_SEED);
    let reports = run_all(seed);
    let mut rows = vec![];
    let mut diagnostics = vec![];
    for r in &reports {
        diagnostics.push(r.summary_line());
        for c in &r.checks {
            let status = match (c.passed, c.documented) {
                (true, _) => "pass",
                (false, Some(_)) => "fail_documented",
                (false, None) => "fail",
            };
            rows.push(vec![
                Cell::Num(r.id as f64),
                Cell::Text(c.name.clone()),
                Cell::Num(c.measured),
                Cell::Num(c.bound),
                Cell::Text(status.into()),
            ]);
        }
    }
    let all = reports.iter().all(|r| r.accepted());
    let out_path = raw.get("output.path").map(|e| e.value.clone());
    let dest = destination(common, out_path.as_deref());
    let format = match raw.get("output.format").map(|e| e.value.as_str()) {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return Err(raw.err("output.format", format!("`{other}` is not csv or json")).into()),
        None if dest.as_ref().and_then(|p| p.extension()).is_some_and(|e| e == "json") => Format::Json,
        None => Format::Csv,
    };
    let config = vec![("run.seed".to_string(), seed.to_string())];
    let meta = vec![("accepted".to_string(), all.to_string())];
    let table = Table {
        columns: ["criterion", "check", "measured", "bound", "status"].map(String::from).to_vec(),
        rows,
    };
    Ok(Outcome {
        document: Document { config, meta, table },
        format,
        destination: dest,
        exit_code: if all { EXIT_OK } else { EXIT_FAILURE },
        diagnostics,
    })
}

/// Numeric events end individual grid points and show up in the
/// `termination` column; they do not change the exit code.
pub fn cmd_sweep(common: &Common, threads: Option<usize>) -> Result<Outcome, CliError> {
    let (raw, cfg) = load(common)?;
    if cfg.axes.is_empty() {
        return Err(ConfigError { line: None, key: Some("sweep.axis1.name".into()), msg: "sweep needs at least one axis".into() }.into());
    }
    if threads == Some(0) {
        return Err(ConfigError { line: None, key: None, msg: "--threads must be at least 1".into() }.into());
    }
    let points = sweep::grid(&raw, &cfg)?;
    let rows = sweep::run(&points, threads).map_err(|e| CliError::Other(e.to_string()))?;
    let names: Vec<String> = cfg.axes.iter().map(|a| a.name.clone()).collect();
    let n_events = rows.iter().filter(|r| r.termination != Termination::Completed).count();
    let dest = destination(common, cfg.output.as_deref());
    let format = format_for(dest.as_ref(), &cfg, &raw);
    let meta = vec![("points".to_string(), rows.len().to_string()), ("events".into(), n_events.to_string())];
    Ok(Outcome {
        document: Document { config: with_format(cfg.clone(), format).resolved(), meta, table: sweep::table(&names, &rows) },
        format,
        destination: dest,
        exit_code: EXIT_OK,
        diagnostics: vec![],
    })
}

pub fn execute(args: &Args) -> Result<Outcome, CliError> {
    match &args.command {
        Command::Evolve(c) => cmd_evolve(c),
        Command::Leakage(c) => cmd_leakage(c),
        Command::Validate(c) => cmd_validate(c),
        Command::Sweep { common, threads } => cmd_sweep(common, *threads),
    }
}

fn emit(outcome: &Outcome) -> Result<(), CliError> {
    let text = outcome.document.render(outcome.format);
    match &outcome.destination {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parse arguments, run, write output; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match execute(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    match emit(&outcome) {
        Ok(()) => outcome.exit_code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
