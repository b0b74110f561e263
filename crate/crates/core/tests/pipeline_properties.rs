mod common;

use common::any_state;
use linclone_core::{gaussian_fidelity, run_cloner, run_cloner_closed_form, ClonerConfig, Propagation};
use proptest::prelude::*;

fn any_config() -> impl Strategy<Value = ClonerConfig> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=2.5f64, 0.05..=1.0f64, any::<bool>()).prop_map(|(t1, t2, g, eta, paper)| {
        let p = if paper { Propagation::PaperLinearG } else { Propagation::Physical };
        ClonerConfig::new(t1, t2, g, eta, p).unwrap()
    })
}

proptest! {
    #[test]
    fn closed_form_matches_composition(s in any_state(2.0, 1.0, 2.0), cfg in any_config()) {
        let a = run_cloner(&s, &cfg).unwrap();
        let b = run_cloner_closed_form(&s, &cfg).unwrap();
        let scale = a.displaced.cov.to_mat2().max_abs().max(1.0);
        prop_assert!(a.max_abs_diff(&b) < 1e-11 * scale);
    }

    #[test]
    fn physical_clones_obey_uncertainty(s in any_state(2.0, 1.0, 2.0), cfg in any_config()) {
        let cfg = cfg.with_propagation(Propagation::Physical);
        let out = run_cloner(&s, &cfg).unwrap();
        prop_assert!(out.clone1.cov.det() >= 0.25 - 1e-9);
        prop_assert!(out.clone2.cov.det() >= 0.25 - 1e-9);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in any_state(3.0, 1.2, 2.0), b in any_state(3.0, 1.2, 2.0)) {
        let fab = gaussian_fidelity(&a, &b).unwrap().value();
        let fba = gaussian_fidelity(&b, &a).unwrap().value();
        prop_assert!((fab - fba).abs() < 1e-14);
        prop_assert!(fab > 0.0 && fab <= 1.0);
        prop_assert!((gaussian_fidelity(&a, &a).unwrap().value() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unity_gain_preserves_the_mean(s in any_state(1.0, 0.8, 2.0), t1 in 0.0..0.95f64, eta in 0.1..=1.0f64) {
        let cfg = ClonerConfig::unity_gain(t1, eta, Propagation::Physical).unwrap();
        let out = run_cloner(&s, &cfg).unwrap();
        prop_assert!(out.clone1.mean.max_abs_diff(s.mean) < 1e-12);
        prop_assert!(out.clone2.mean.max_abs_diff(s.mean) < 1e-12);
    }

    #[test]
    fn symmetric_clones_are_identical(s in any_state(2.0, 1.0, 2.0), eta in 0.1..=1.0f64) {
        let out = run_cloner(&s, &ClonerConfig::symmetric(eta)).unwrap();
        prop_assert!(out.clone1.max_abs_diff(&out.clone2) < 1e-12);
    }
}
