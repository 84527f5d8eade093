// A 2-axis grid through the same path the `sweep` subcommand uses.

use pxp_tdvp::cli::{sweep, RawConfig, RunConfig};

const CONFIG: &str = "\
model.K = 2
model.J = 0.5
model.Omega = 1
state.theta = 0.8, 2.0
run.t_end = 1
run.dt = 0.01
sweep.axis1.name = model.J
sweep.axis1.values = 0.5, 1, 2
sweep.axis2.name = model.Delta
sweep.axis2.start = -0.5
sweep.axis2.stop = 0.5
sweep.axis2.count = 3
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let raw = RawConfig::parse(CONFIG)?;
    let cfg = RunConfig::resolve(&raw)?;
    let points = sweep::grid(&raw, &cfg)?;
    let rows = sweep::run(&points, Some(2))?;
    for r in &rows {
        println!(
            "J = {:3} Delta = {:+.1}: E = {:.6}, gamma2 = {:.3e}, {}",
            r.coords[0],
            r.coords[1],
            r.energy_final,
            r.gamma2_final,
            r.termination.as_str()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
