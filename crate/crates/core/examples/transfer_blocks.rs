// Closed-form transfer blocks against the literal product of site matrices.
//
// ```text
// cargo run --example transfer_blocks
// ```

use pxp_tdvp::transfer::{block_transfer, ordered_product};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let xs = [0.9, -0.4, 0.7, 0.2];
    for n in 1..=xs.len() {
        let b = block_transfer(&xs[..n]);
        let err = (b.mat - ordered_product(&xs[..n])).amax();
        println!("n = {n}: alpha = {:+.6}, beta = {:+.6}, |closed - product| = {err:.1e}", b.alpha, b.beta);
        if err > 1e-12 {
            return Err(format!("closed form disagrees at n = {n}").into());
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
