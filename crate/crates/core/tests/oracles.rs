use nalgebra::{DMatrix, SymmetricEigen};

use pxp_tdvp::oracle::{build_basis, build_hamiltonian, exact_report, numeric_environment};
use pxp_tdvp::{eom_exact, gram_bundle, leakage_rate, variational_energy, ModelParams, VariationalState};

fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut e = SymmetricEigen::new(m).eigenvalues.as_slice().to_vec();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn pxp_ring_of_four_matches_textbook_block() {
    // ring of 4 with no two adjacent excitations: 7 configurations, PXP flips one site
    let states: Vec<u32> = (0..16u32).filter(|s| s & s.rotate_right(1) & 0xF == 0 && (s & 1 == 0 || s & 8 == 0)).collect();
    assert_eq!(states.len(), 7);
    let mut h = DMatrix::zeros(7, 7);
    for (a, &sa) in states.iter().enumerate() {
        for (b, &sb) in states.iter().enumerate() {
            if (sa ^ sb).count_ones() == 1 {
                h[(a, b)] = 1.0;
            }
        }
    }
    let params = ModelParams::uniform(1, 0.5, 1.0, 0.0).unwrap();
    let basis = build_basis(4, 1).unwrap();
    let ours = build_hamiltonian(&basis, &params).unwrap().to_dense();
    let (a, b) = (sorted_eigs(h), sorted_eigs(ours));
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12), "{a:?} vs {b:?}");
}

#[test]
fn closed_forms_match_environment_oracle() {
    let cases = [
        (0.5, vec![1.0, 1.2], vec![0.3, -0.5], vec![1.1, 2.5], vec![0.2, -0.7]),
        (1.0, vec![0.7, 1.0, 1.4], vec![0.0, 0.2, -0.1], vec![0.8, -1.9, 2.6], vec![1.0, 0.1, -2.0]),
        (2.0, vec![1.0; 4], vec![0.5; 4], vec![1.0, 1.7, 0.6, 2.2], vec![0.3, -0.2, 0.0, 0.9]),
    ];
    for (spin, omega, delta, theta, phi) in cases {
        let p = ModelParams::new(spin, omega, delta).unwrap();
        let s = VariationalState::new(theta, phi);
        let env = numeric_environment(&p, &s).unwrap();
        let g = gram_bundle(&p, &s).unwrap();
        let v = eom_exact(&p, &s).unwrap();
        let r = leakage_rate(&p, &s).unwrap();
        let e = variational_energy(&p, &s).unwrap();
        assert!((&g.g_tt - &env.g_tt).camax() < 1e-10);
        assert!((&g.g_pp - &env.g_pp).camax() < 1e-10);
        assert!(v.max_abs_diff(&env.velocity) < 1e-9);
        assert!((e - env.energy_cell).abs() < 1e-10);
        assert!((r.gamma2 - env.gamma2).abs() < 1e-9 * r.total.max(1.0), "J = {spin}");
    }
}

#[test]
fn finite_chain_converges_to_closed_form() {
    let p = ModelParams::uniform(3, 1.0, 1.0, 0.2).unwrap();
    let s = VariationalState::new(vec![1.0, 1.5, 2.0], vec![0.1, 0.0, -0.2]);
    let v = eom_exact(&p, &s).unwrap();
    let e = variational_energy(&p, &s).unwrap() / 3.0;
    let g = leakage_rate(&p, &s).unwrap().gamma2;
    let mut last = f64::INFINITY;
    for l in [6, 9] {
        let r = exact_report(&p, &s, l, &v).unwrap();
        let dev = (r.energy_density - e).abs() + (r.gamma2 - g).abs();
        assert!(dev < last, "L = {l}: {dev} not below {last}");
        last = dev;
    }
    assert!(last < 1e-2);
}
