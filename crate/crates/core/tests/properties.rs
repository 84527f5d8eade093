use proptest::prelude::*;

use pxp_tdvp::cli::output::{fmt_num, Document};
use pxp_tdvp::cli::{RawConfig, RunConfig};
use pxp_tdvp::gram::{gram_blocks, inverse_im_g_thetaphi};
use pxp_tdvp::{eom_exact, eom_series, leakage_rate, ModelParams, UnitCell, VariationalState};

/// Random cell with every `θ` kept away from the poles at multiples of π.
fn setup() -> impl Strategy<Value = (ModelParams, VariationalState)> {
    (1usize..=4, 1u32..=4).prop_flat_map(|(k, two_j)| {
        (
            prop::collection::vec(0.5f64..1.5, k),
            prop::collection::vec(-1.0f64..1.0, k),
            prop::collection::vec((0.1f64..3.0, prop::bool::ANY), k),
            prop::collection::vec(-3.0f64..3.0, k),
        )
            .prop_map(move |(omega, delta, th, phi)| {
                let theta = th.into_iter().map(|(t, neg)| if neg { -t } else { t }).collect();
                (ModelParams::new(two_j as f64 / 2.0, omega, delta).unwrap(), VariationalState::new(theta, phi))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gamma2_is_non_negative((p, s) in setup()) {
        let r = leakage_rate(&p, &s).unwrap();
        prop_assert!(r.gamma2 >= -1e-10 * r.total.max(1.0), "gamma2 = {}", r.gamma2);
    }

    #[test]
    fn gamma2_ignores_detuning((p, s) in setup(), shift in -2.0f64..2.0) {
        let q = ModelParams::new(p.spin, p.omega.clone(), p.delta.iter().map(|d| d + shift).collect()).unwrap();
        if let (Ok(a), Ok(b)) = (leakage_rate(&p, &s), leakage_rate(&q, &s)) {
            prop_assert!((a.gamma2 - b.gamma2).abs() <= 1e-9 * a.total.max(1.0));
        }
    }

    #[test]
    fn closed_inverse_inverts((p, s) in setup()) {
        let Ok(cell) = UnitCell::new(&p, &s) else { return Ok(()) };
        let Ok(inv) = inverse_im_g_thetaphi(&cell) else { return Ok(()) };
        let im = gram_blocks(&cell).g_tp.map(|v| v.im);
        let prod = &im * &inv;
        let scale = im.amax() * inv.amax();
        let err = (prod - nalgebra::DMatrix::<f64>::identity(p.k, p.k)).amax();
        prop_assert!(err < 1e-9 * scale.max(1.0), "err = {err}");
    }

    #[test]
    fn translation_covariance((p, s) in setup(), shift in 0usize..4) {
        let rot = |v: &[f64]| { let mut v = v.to_vec(); v.rotate_left(shift % p.k); v };
        let q = ModelParams::new(p.spin, rot(&p.omega), rot(&p.delta)).unwrap();
        if let (Ok(a), Ok(b)) = (eom_exact(&p, &s), eom_exact(&q, &s.rotated(shift))) {
            let scale = a.theta_dot.iter().chain(&a.phi_dot).fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!((0..p.k).all(|i| (rot(&a.theta_dot)[i] - b.theta_dot[i]).abs() < 1e-9 * scale));
            prop_assert!((0..p.k).all(|i| (rot(&a.phi_dot)[i] - b.phi_dot[i]).abs() < 1e-9 * scale));
        }
    }

    #[test]
    fn series_matches_exact((p, s) in setup()) {
        if let (Ok(a), Ok(b)) = (eom_exact(&p, &s), eom_series(&p, &s, 1e-14)) {
            let scale = a.theta_dot.iter().chain(&a.phi_dot).fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!(a.max_abs_diff(&b) < 1e-8 * scale);
        }
    }

    #[test]
    fn seventeen_digits_round_trip(v in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(fmt_num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn resolved_config_round_trips((p, s) in setup(), dt in 1e-4f64..0.1) {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let text = format!(
            "model.K = {}\nmodel.J = {}\nmodel.Omega = {}\nmodel.Delta = {}\nstate.theta = {}\nstate.phi = {}\nrun.dt = {dt:?}\n",
            p.k, p.spin, list(&p.omega), list(&p.delta), list(&s.theta), list(&s.phi)
        );
        let c = RunConfig::resolve(&RawConfig::parse(&text).unwrap()).unwrap();
        prop_assert_eq!(&c.params, &p);
        prop_assert_eq!(&c.state, &s);
        let again: String = c.resolved().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        prop_assert_eq!(RunConfig::resolve(&RawConfig::parse(&again).unwrap()).unwrap(), c);
    }
}

#[test]
fn empty_document_still_has_header() {
    let doc = Document { config: vec![], meta: vec![], table: pxp_tdvp::cli::Table { columns: vec!["t".into()], rows: vec![] } };
    assert_eq!(doc.to_csv(), "t\n");
    assert_eq!(Document::from_csv("t\n").unwrap(), doc);
}
