// Spin coherent amplitudes on the Dicke basis.

use pxp_tdvp::spin_coherent::coherent_coefficients;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (theta, phi) = (1.1, 0.4);
    for two_j in 1..=4 {
        let c = coherent_coefficients(theta, phi, two_j);
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        // overlap with the blockaded |J, -J> state
        let ground = c[0].norm();
        println!("J = {:.1}: {} amplitudes, norm = {norm:.15}, <-J|theta,phi> = {ground:.6}", two_j as f64 / 2.0, c.len());
        if (norm - 1.0).abs() > 1e-12 {
            return Err("coherent state not normalised".into());
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
