use cqrate_core::qcore::random::rng_from_seed;
use cqrate_core::qcore::{binary_entropy, trace_distance};
use cqrate_core::source::{
    entropic_profile, extended_state, genericity_report, load_source_str, random_source, src_a, src_b, src_c,
    SourceDoc,
};
use cqrate_core::Error;
use proptest::prelude::*;

fn h(p: f64) -> f64 {
    binary_entropy(p).unwrap()
}

#[test]
fn reference_profiles() {
    let a = entropic_profile(&src_a());
    for (got, want) in [(a.s_b, 1.0), (a.s_b_given_x, 0.0), (a.s_xb, 1.0), (a.s_x_given_b, 0.0), (a.i_x_b, 1.0)] {
        assert!((got - want).abs() < 1e-9);
    }
    let b = entropic_profile(&src_b());
    let wants = [(b.s_b, h(0.25)), (b.s_b_given_x, 0.5), (b.s_xb, 1.5), (b.s_x_given_b, 1.5 - h(0.25)), (b.i_x_b, h(0.25) - 0.5)];
    for (got, want) in wants {
        assert!((got - want).abs() < 1e-9);
    }
}

#[test]
fn product_removable_source_profile() {
    let c = entropic_profile(&src_c());
    assert!((c.i_x_b - 1.0).abs() < 1e-9);
    assert!((c.s_b - 2.0).abs() < 1e-9);
    assert!((c.s_b_given_x - 1.0).abs() < 1e-9);
}

#[test]
fn extended_single_block_matches_direct() {
    for src in [src_a(), src_b(), src_c()] {
        let ext = extended_state(&src, 1).unwrap();
        let xb = ext.reduced(&["X_1", "B_1"]).unwrap();
        let direct = src.omega_xb();
        assert!((xb.matrix() - direct.matrix()).norm() < 1e-10);
    }
}

#[test]
fn extended_cap() {
    assert!(matches!(extended_state(&src_b(), 4), Err(Error::CapExceeded(_))));
}

#[test]
fn document_roundtrip() {
    let mut rng = rng_from_seed(5);
    let src = random_source(&mut rng, 3, 2, 2);
    let text = serde_json::to_string(&SourceDoc::from_source(&src)).unwrap();
    let back = load_source_str(&text).unwrap();
    assert!((back.omega_xb().matrix() - src.omega_xb().matrix()).norm() < 1e-12);
}

#[test]
fn unnormalized_probabilities_are_rejected() {
    let err = load_source_str(
        r#"{"probs":[0.6,0.6],"states":[
            {"amplitudes":[1,0],"dims":{"B":2,"R":1}},
            {"amplitudes":[0,1],"dims":{"B":2,"R":1}}]}"#,
    )
    .unwrap_err();
    assert!(err.to_string().contains("probs not normalized"));
}

#[test]
fn mixed_input_is_purified() {
    let src = load_source_str(
        r#"{"probs":[0.5,0.5],"states":[
            {"density":[[0.5,0],[0,0.5]],"dim":2},
            {"density":[[1,0],[0,0]],"dim":2}]}"#,
    )
    .unwrap();
    let p = entropic_profile(&src);
    assert!((p.s_b_given_x - 0.5).abs() < 1e-9);
    assert!((p.s_b - h(0.25)).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_identities(seed in any::<u64>(), nx in 1usize..4, b in 1usize..4, r in 1usize..4) {
        let src = random_source(&mut rng_from_seed(seed), nx, b, r);
        let p = entropic_profile(&src);
        prop_assert!((p.s_xb - p.s_x - p.s_b_given_x).abs() < 1e-9);
        prop_assert!((p.s_x_given_b - (p.s_xb - p.s_b)).abs() < 1e-9);
        prop_assert!((p.i_x_b - (p.s_b - p.s_b_given_x)).abs() < 1e-9);
        prop_assert!(p.i_x_b >= -1e-9 && p.i_x_b <= p.s_x + 1e-9);
    }

    #[test]
    fn depolarized_sources_are_generic(seed in any::<u64>(), nx in 2usize..4) {
        let src = random_source(&mut rng_from_seed(seed), nx, 2, 1).depolarize(1e-3).unwrap();
        prop_assert!(genericity_report(&src).is_generic);
    }

    #[test]
    fn perturbation_stays_close(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let src = src_b();
        let moved = src.perturb(0.01, &mut rng).unwrap();
        for x in 0..2 {
            prop_assert!(trace_distance(&src.rho_b(x), &moved.rho_b(x)).unwrap() < 0.1);
        }
    }
}
