// Leakage falls like 1/J for odd cells; `J Γ²` against the limit.

use pxp_tdvp::validation::large_j_point;
use pxp_tdvp::{leakage_large_j, leakage_rate};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for j in [1.0, 5.0, 25.0, 100.0] {
        let (p, s) = large_j_point(3, j);
        let g = leakage_rate(&p, &s)?.gamma2;
        let lim = leakage_large_j(&p, &s)?;
        println!("K = 3 J = {j:5}: gamma2 = {g:.3e}, large-J form = {lim:.3e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
