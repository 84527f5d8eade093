// Closed forms against brute-force environments from power iteration.

use pxp_tdvp::oracle::numeric_environment;
use pxp_tdvp::{eom_exact, gram_bundle, leakage_rate, ModelParams, VariationalState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(1.5, vec![1.0, 0.8, 1.2], vec![0.3, -0.1, 0.0])?;
    let state = VariationalState::new(vec![0.9, 1.7, 2.4], vec![0.2, 0.5, -0.4]);
    let env = numeric_environment(&params, &state)?;
    let g = gram_bundle(&params, &state)?;
    let v = eom_exact(&params, &state)?;
    let r = leakage_rate(&params, &state)?;
    println!("|lambda2/lambda1|      {:.3}", env.lambda2);
    println!("Gram theta-phi |diff|  {:.1e}", (&g.g_tp - &env.g_tp).camax());
    println!("velocity |diff|        {:.1e}", v.max_abs_diff(&env.velocity));
    println!("gamma2 closed {:.10}  oracle {:.10}", r.gamma2, env.gamma2);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
