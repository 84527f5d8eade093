// Finite periodic chains: constrained Hilbert space and the MPS at size L.

use pxp_tdvp::oracle::{build_basis, exact_report};
use pxp_tdvp::{eom_exact, leakage_rate, variational_energy, ModelParams, VariationalState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::uniform(2, 0.5, 1.0, 0.0)?;
    let state = VariationalState::new(vec![1.0, 2.0], vec![0.0, 0.0]);
    let e_inf = variational_energy(&params, &state)? / 2.0; // per site
    let g_inf = leakage_rate(&params, &state)?.gamma2;
    let v = eom_exact(&params, &state)?;
    for l in [8, 12, 16] {
        let dim = build_basis(l, 1)?.dim();
        let r = exact_report(&params, &state, l, &v)?;
        println!(
            "L = {l:2} dim = {dim:5}  E/L - E = {:+.2e}  gamma2_L - gamma2 = {:+.2e}",
            r.energy_density - e_inf,
            r.gamma2 - g_inf
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
