// Run one acceptance criterion and print its checks.
//
// ```text
// cargo run --release --example acceptance_report -- 6
// ```

use pxp_tdvp::validation::{run_criterion, DEFAULT_SEED};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let id: u8 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let r = run_criterion(id, DEFAULT_SEED);
    println!("{}", r.summary_line());
    for n in &r.notes {
        println!("  {n}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
