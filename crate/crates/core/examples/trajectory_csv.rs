// Integrate a Z_2 orbit, write it as CSV, read it back.

use pxp_tdvp::cli::output::{trajectory_table, Document};
use pxp_tdvp::integrator::{evolve, Rhs};
use pxp_tdvp::{ModelParams, VariationalState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::uniform(2, 1.0, 1.0, 0.0)?;
    let state = VariationalState::new(vec![0.6, 2.2], vec![0.0, 0.0]);
    let traj = evolve(&state, &params, 5.0, 0.01, Rhs::Exact, 50)?;
    println!("{} samples, termination {}, energy drift {:.1e}", traj.len(), traj.termination.as_str(), traj.max_energy_drift());

    let doc = Document { config: vec![], meta: vec![], table: trajectory_table(&traj, 2) };
    let csv = doc.to_csv();
    print!("{}", csv.lines().take(4).map(|l| format!("{l}\n")).collect::<String>());
    if Document::from_csv(&csv)? != doc {
        return Err("CSV round trip changed the numbers".into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
