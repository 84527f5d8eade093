// Energy variance and the leakage rate out of the manifold.
//
// At `J = 1/2`, `K = 2` and `θ = (π/2, π/2)` the rate is `Γ² = 1/12`.

use std::f64::consts::FRAC_PI_2;

use pxp_tdvp::{leakage_rate, leakage_spin_half, ModelParams, VariationalState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::uniform(2, 0.5, 1.0, 0.0)?;
    let state = VariationalState::new(vec![FRAC_PI_2; 2], vec![0.0; 2]);
    let r = leakage_rate(&params, &state)?;
    println!("variance per site  {:.12}", r.total);
    println!("gamma2 closed form {:.12}", r.gamma2);
    println!("gamma2 raw         {:.12}", r.gamma2_raw);
    println!("gamma2 spin-1/2    {:.12}", leakage_spin_half(&params, &state)?);
    for (i, t) in r.gamma2_breakdown.iter().enumerate() {
        println!("  term {}: {t:+.6}", i + 1);
    }
    if (r.gamma2 - 1.0 / 12.0).abs() > 1e-12 {
        return Err(format!("expected 1/12, got {}", r.gamma2).into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
