//! Randomized invariants over the parameter space.

use proptest::prelude::*;

use twisted_xxx::bethe::{eval_lambda, one_magnon_roots, BetheState};
use twisted_xxx::chain::{
    build_hamiltonian, transfer_commutator, transfer_matrix, verify_rtt, ChainSpec,
};
use twisted_xxx::config::{format_complex, parse_complex};
use twisted_xxx::report::{to_json, VerificationReport};
use twisted_xxx::rmatrix::{build_f12, verify_ybe};
use twisted_xxx::spectrum::{distance_to_spectrum, eigenvalues, match_spectra};
use twisted_xxx::symmetry::extract_t0;
use twisted_xxx::tensor::{c64, relative_difference};
use twisted_xxx::twist::{universal_twist, verify_cocycle, SpinRep, TwistParams};

fn annulus() -> impl Strategy<Value = c64> {
    (0.5f64..5.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| c64::from_polar(r, t))
}

fn pair() -> impl Strategy<Value = (c64, c64)> {
    (annulus(), annulus()).prop_filter("separated points", |(u, v)| (u - v).norm() > 0.1)
}

fn xi() -> impl Strategy<Value = c64> {
    (-1.0f64..1.0).prop_map(|x| c64::new(x, 0.0))
}

fn chain(n: usize, xi: c64) -> ChainSpec {
    ChainSpec::periodic(n, TwistParams::with_xi(xi)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn yang_baxter_holds(xi in xi(), (u, v) in pair()) {
        prop_assert!(verify_ybe(u, v, &TwistParams::with_xi(xi)).unwrap() < 1e-12);
    }

    #[test]
    fn yang_baxter_holds_for_complex_deformation(
        re in -1.0f64..1.0, im in -1.0f64..1.0, (u, v) in pair()
    ) {
        prop_assert!(verify_ybe(u, v, &TwistParams::with_xi(c64::new(re, im))).unwrap() < 1e-12);
    }

    #[test]
    fn rtt_holds(n in 1usize..=3, xi in xi(), (u, v) in pair()) {
        prop_assert!(verify_rtt(&chain(n, xi), u, v).unwrap() < 1e-11);
    }

    #[test]
    fn transfer_matrices_commute(n in 2usize..=4, xi in xi(), (u, v) in pair()) {
        prop_assert!(transfer_commutator(&chain(n, xi), u, v).unwrap() < 1e-11);
    }

    #[test]
    fn hamiltonian_spectrum_is_undeformed(n in 2usize..=5, x in -10.0f64..10.0) {
        let spec = chain(n, c64::new(x, 0.0));
        let deformed = eigenvalues(&build_hamiltonian(&spec).unwrap()).unwrap();
        let plain = eigenvalues(&build_hamiltonian(&spec.undeformed()).unwrap()).unwrap();
        prop_assert!(match_spectra(&deformed, &plain, 1e-8).unwrap().matched);
    }

    #[test]
    fn one_magnon_lambda_is_an_eigenvalue(n in 2usize..=5, xi in xi(), u in annulus()) {
        let spec = chain(n, xi);
        let spectrum = eigenvalues(&transfer_matrix(&spec, u).unwrap()).unwrap();
        for v in one_magnon_roots(n, spec.params.eta) {
            prop_assume!((u - v).norm() > 1e-3);
            let st = BetheState::from_roots(n, spec.params.eta, vec![v]).unwrap();
            prop_assert!(distance_to_spectrum(eval_lambda(u, &st).unwrap(), &spectrum) < 1e-8);
        }
    }

    #[test]
    fn e_commutes_with_transfer(n in 1usize..=4, xi in xi(), u in annulus()) {
        let spec = chain(n, xi);
        let e = extract_t0(&spec).unwrap().e;
        let t = transfer_matrix(&spec, u).unwrap();
        prop_assert!(relative_difference(&e.matmul(&t), &t.matmul(&e)) < 1e-11);
    }

    #[test]
    fn fundamental_twist_and_cocycle(xi in xi()) {
        let half = SpinRep::from_twice_spin(1);
        prop_assert_eq!(universal_twist(&half, &half, xi), build_f12(xi));
        prop_assert!(verify_cocycle(&half, &half, &half, xi) < 1e-12);
        prop_assert!(verify_cocycle(&half, &half, &SpinRep::from_twice_spin(2), xi) < 1e-12);
    }

    #[test]
    fn spectrum_matching_ignores_order(values in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..12)) {
        let a: Vec<c64> = values.iter().map(|&(r, i)| c64::new(r, i)).collect();
        let mut b = a.clone();
        b.reverse();
        b.rotate_left(a.len() / 2);
        let r = match_spectra(&a, &b, 0.0).unwrap();
        prop_assert!(r.matched);
        prop_assert_eq!(r.max_pair_distance, 0.0);
    }

    #[test]
    fn complex_literals_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = c64::new(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn json_residuals_round_trip(residuals in prop::collection::vec(0.0f64..1e3, 0..8), scale in -300i32..0) {
        let reports: Vec<VerificationReport> = residuals
            .iter()
            .map(|r| VerificationReport::holds("ybe", vec![], r * 10f64.powi(scale), 1e-12))
            .collect();
        let text = to_json(&reports, 1, &serde_json::json!({})).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let back: Vec<f64> = v["reports"].as_array().unwrap().iter().map(|r| r["residual"].as_f64().unwrap()).collect();
        let orig: Vec<f64> = reports.iter().map(|r| r.residual).collect();
        prop_assert_eq!(back, orig);
    }
}
