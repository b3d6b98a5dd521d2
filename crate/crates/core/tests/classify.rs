use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ledobata::classify::{classify_go, classify_natred, go_family, go_family_system, phi_roots, GoResult, NatRedVerdict};
use ledobata::coeff::{is_adapted, is_super_adapted};
use ledobata::metric::{eigendecompose, MetricT};
use ledobata::random;
use ledobata::Tolerances;

#[test]
fn family_example_values() {
    let sys = go_family_system(&[1.0, 2.0, 3.0], 1.0, 0.0).unwrap();
    // γ_i = t_i with ρ = 1, λ = 0
    let s13 = 13f64.sqrt();
    assert!((sys.gammas[0] - (11.0 - s13) / 6.0).abs() < 1e-12);
    assert!((sys.gammas[1] - (11.0 + s13) / 6.0).abs() < 1e-12);
    assert!((sys.gammas[0] - 1.23241).abs() < 1e-5);
    assert!((sys.gammas[1] - 2.43426).abs() < 1e-5);
    assert!(is_adapted(&sys, 1e-12));
    assert!(is_super_adapted(&sys, 1e-12).passed);
}

#[test]
fn root_finding_rejects_bad_z() {
    assert!(phi_roots(&[1.0, 1.0, 2.0]).is_err());
    assert!(phi_roots(&[2.0, 1.0]).is_err());
    assert!(phi_roots(&[1.0]).is_err());
    assert_eq!(phi_roots(&[1.0, 2.0]).unwrap().len(), 1);
}

#[test]
fn family_metrics_are_naturally_reductive() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for m in 3..=6 {
        for _ in 0..10 {
            let t = random::go_family_metric(&mut rng, m);
            assert!(classify_go(&t, &Tolerances::default()).is_yes());
            assert!(classify_natred(&t.to_form(), 1e-8).is_nr());
        }
    }
}

#[test]
fn dense_forms_are_neither() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for m in 4..=6 {
        for _ in 0..10 {
            let f = random::dense_form(&mut rng, m);
            assert_eq!(classify_natred(&f, 1e-8).verdict, NatRedVerdict::NotNR);
            assert!(matches!(classify_go(&f.to_t(), &Tolerances::default()), GoResult::No(_)));
        }
    }
}

#[test]
fn standard_metric_constants_vanish() {
    for m in 2..=6 {
        let r = classify_go(&MetricT::standard(m), &Tolerances::default());
        let cert = r.certificate().unwrap();
        assert!(cert.c.iter().all(|c| c.abs() < 1e-12));
        assert_eq!(cert.clusters.len(), 1);
    }
}

#[test]
fn ideal_metrics_are_case_b_or_a() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for m in 3..=6 {
        for _ in 0..10 {
            let t = random::ideal_metric(&mut rng, m);
            let r = classify_natred(&t.to_form(), 1e-8);
            assert!(matches!(r.verdict, NatRedVerdict::CaseA { .. } | NatRedVerdict::CaseB { .. }), "{:?}", r);
            assert!(r.normal);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn case_c_parameters_are_recovered(seed in any::<u64>(), m in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random::case_c_metric(&mut rng, m);
        let r = classify_natred(&f, 1e-8);
        match r.verdict {
            NatRedVerdict::CaseC { alpha, s } => {
                prop_assert!((alpha.iter().sum::<f64>() - s).abs() < 1e-8 * s.abs().max(1.0));
                let back = ledobata::classify::natred::case_c_form(&alpha, s);
                prop_assert!((back - f.a()).amax() < 1e-8 * f.a().amax());
                prop_assert_eq!(r.normal, alpha.iter().all(|a| *a > 0.0));
            }
            NatRedVerdict::CaseA { .. } | NatRedVerdict::CaseB { .. } => {}
            NatRedVerdict::NotNR => prop_assert!(false, "case (c) form rejected"),
        }
    }

    #[test]
    fn form_and_t_round_trip(seed in any::<u64>(), m in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random::dense_form(&mut rng, m);
        let back = f.to_t().to_form();
        prop_assert!((back.a() - f.a()).amax() < 1e-12 * f.a().amax());
        let eig = eigendecompose(&f.to_t(), 1e-8);
        prop_assert!(is_adapted(&eig.system, 1e-10));
        let t2 = MetricT::from_system(&eig.system).unwrap();
        prop_assert!((t2.t() - f.to_t().t()).amax() < 1e-10 * f.a().amax());
    }

    #[test]
    fn natred_and_go_agree(seed in any::<u64>(), m in 3usize..=5, kind in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = match kind {
            0 => random::go_family_metric(&mut rng, m),
            1 => random::dense_form(&mut rng, m).to_t(),
            2 => random::case_c_metric(&mut rng, m).to_t(),
            _ => random::ideal_metric(&mut rng, m),
        };
        let nr = classify_natred(&t.to_form(), 1e-8).is_nr();
        let go = classify_go(&t, &Tolerances::default());
        if !matches!(go, GoResult::IndeterminateSymbolic(_)) {
            prop_assert_eq!(nr, go.is_yes());
        }
    }
}

#[test]
fn go_family_parameter_errors() {
    assert!(go_family(&[1.0, 2.0, 3.0], 0.0, 0.0).is_err());
    assert!(go_family(&[1.0, 2.0, 3.0], 1.0, -10.0).is_err());
}
