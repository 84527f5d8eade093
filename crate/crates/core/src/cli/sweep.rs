//! Grid sweeps over config keys, run on a rayon pool.

use rayon::prelude::*;

use super::config::{apply_axis, ConfigError, RawConfig, RunConfig};
use super::output::{Cell, Table};
use crate::integrator::{evolve, Termination};

/// One grid point: the axis values and the config they produce.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub coords: Vec<f64>,
    pub config: RunConfig,
}

/// Cartesian product of the axes, last axis fastest. Every point is resolved
/// up front so a bad value is reported before any work starts.
pub fn grid(raw: &RawConfig, base: &RunConfig) -> Result<Vec<GridPoint>, ConfigError> {
    let mut coords: Vec<Vec<f64>> = vec![vec![]];
    for axis in &base.axes {
        coords = coords
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    coords
        .into_iter()
        .map(|c| {
            let mut r = raw.clone();
            for (axis, &v) in base.axes.iter().zip(&c) {
                apply_axis(&mut r, &axis.name, v, base.params.k);
            }
            let config = RunConfig::resolve(&r).map_err(|e| ConfigError {
                msg: format!("at grid point {c:?}: {}", e.msg),
                ..e
            })?;
            Ok(GridPoint { coords: c, config })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub t_final: f64,
    pub energy_0: f64,
    pub energy_final: f64,
    pub max_energy_drift: f64,
    pub gamma2_0: f64,
    pub gamma2_final: f64,
    pub accumulated_leakage: f64,
    pub termination: Termination,
}

fn run_point(p: &GridPoint) -> SweepRow {
    let c = &p.config;
    let nan_row = |t| SweepRow {
        coords: p.coords.clone(),
        t_final: 0.0,
        energy_0: f64::NAN,
        energy_final: f64::NAN,
        max_energy_drift: f64::NAN,
        gamma2_0: f64::NAN,
        gamma2_final: f64::NAN,
        accumulated_leakage: 0.0,
        termination: t,
    };
    // Only the final state matters, so record sparsely.
    let every = usize::MAX;
    match evolve(&c.state, &c.params, c.t_end, c.dt, c.rhs, every) {
        Err(e) => nan_row(Termination::from_error(&e)),
        Ok(tr) if tr.is_empty() => nan_row(tr.termination),
        Ok(tr) => {
            let n = tr.len() - 1;
            let t_final = match &tr.event {
                Some(ev) => ev.time,
                None => tr.times[n],
            };
            SweepRow {
                coords: p.coords.clone(),
                t_final,
                energy_0: tr.energy[0],
                energy_final: tr.energy[n],
                max_energy_drift: tr.max_energy_drift(),
                gamma2_0: tr.gamma2[0],
                gamma2_final: tr.gamma2[n],
                accumulated_leakage: tr.accumulated_leakage[n],
                termination: tr.termination,
            }
        }
    }
}

/// Run every grid point; rows come back in grid order whatever the thread
/// count.
pub fn run(points: &[GridPoint], threads: Option<usize>) -> Result<Vec<SweepRow>, rayon::ThreadPoolBuildError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    let pool = b.build()?;
    Ok(pool.install(|| points.par_iter().map(run_point).collect()))
}

pub fn table(axis_names: &[String], rows: &[SweepRow]) -> Table {
    let mut columns: Vec<String> = axis_names.to_vec();
    columns.extend(
        [
            "t_final",
            "energy_0",
            "energy_final",
            "max_energy_drift",
            "gamma2_0",
            "gamma2_final",
            "accumulated_leakage",
            "termination",
        ]
        .map(String::from),
    );
    let rows = rows
        .iter()
        .map(|r| {
            let mut cells: Vec<Cell> = r.coords.iter().map(|&v| Cell::Num(v)).collect();
            cells.extend(
                [
                    r.t_final,
                    r.energy_0,
                    r.energy_final,
                    r.max_energy_drift,
                    r.gamma2_0,
                    r.gamma2_final,
                    r.accumulated_leakage,
                ]
                .map(Cell::Num),
            );
            cells.push(Cell::Text(r.termination.as_str().into()));
            cells
        })
        .collect();
    Table { columns, rows }
}
