// The four velocity evaluators on one state.

use pxp_tdvp::{eom_exact, eom_large_j, eom_series, eom_spin_half, ModelParams, VariationalState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let state = VariationalState::new(vec![1.2, 0.7], vec![0.1, -0.3]);

    let half = ModelParams::uniform(2, 0.5, 1.0, 0.2)?;
    let exact = eom_exact(&half, &state)?;
    let compact = eom_spin_half(&half, &state)?;
    let series = eom_series(&half, &state, 1e-14)?;
    println!("J = 1/2 exact     theta_dot = {:?}", exact.theta_dot);
    println!("        spin-1/2 |diff| = {:.1e}", exact.max_abs_diff(&compact));
    println!("        series   |diff| = {:.1e}", exact.max_abs_diff(&series));

    let big = ModelParams::uniform(3, 40.0, 1.0, 0.0)?;
    let s3 = VariationalState::new(vec![1.2, 0.7, 2.0], vec![0.1, -0.3, 0.2]);
    let exact = eom_exact(&big, &s3)?;
    let limit = eom_large_j(&big, &s3)?;
    println!("J = 40  large-J  |diff| = {:.1e}", exact.max_abs_diff(&limit));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
