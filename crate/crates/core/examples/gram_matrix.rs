// Connected Gram blocks of a Z_3 state and the closed-form inverse of `Im G_θφ`.

use pxp_tdvp::{gram_bundle, ModelParams, VariationalState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::uniform(3, 1.0, 1.0, 0.0)?;
    let state = VariationalState::new(vec![1.0, 1.3, 1.1], vec![0.3, -0.2, 0.1]);
    let g = gram_bundle(&params, &state)?;
    let im = g.im_g_tp();
    println!("Im G_theta_phi ={im:.6}");
    let inv = g.inv_im_g_tp.ok_or("state sits on a pole")?;
    let err = (&im * &inv - nalgebra::DMatrix::<f64>::identity(3, 3)).amax();
    println!("|Im G * inverse - 1| = {err:.1e}");
    if err > 1e-10 {
        return Err("closed-form inverse is off".into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
