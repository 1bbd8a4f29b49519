use cqrate_core::idelta::{
    apply_channel, collapse_bound, idelta_curve, optimize_idelta, ChannelParam, Evaluator, OptimizerOptions,
};
use cqrate_core::qcore::random::rng_from_seed;
use cqrate_core::qcore::{conditional_mutual_information, mutual_information};
use cqrate_core::source::{delta_prime, entropic_profile, random_source, src_a, src_b};
use proptest::prelude::*;

fn quick(seed: u64) -> OptimizerOptions {
    OptimizerOptions { seed, restarts: 8, steps_per_stage: 80, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // the fast evaluator against dense σ^{XCWR} built through qcore
    #[test]
    fn evaluator_matches_dense_route(seed in any::<u64>(), c in 1usize..4, w in 1usize..4) {
        prop_assume!(c * w >= 2);
        let mut rng = rng_from_seed(seed);
        let src = random_source(&mut rng, 2, 2, 2);
        let param = ChannelParam::random(&mut rng, 2, c, w).unwrap();
        let fast = Evaluator::new(&src).evaluate_param(&param);
        let out = apply_channel(&src, &param).unwrap();
        let dense = &out.sigma_xwr;
        let i_xw = mutual_information(dense, &["X"], &["W"]).unwrap();
        let i_rw = conditional_mutual_information(dense, &["R"], &["W"], &["X"]).unwrap();
        prop_assert!((fast.i_xw - i_xw).abs() < 1e-9);
        prop_assert!((fast.i_rw_given_x - i_rw).abs() < 1e-9);
        prop_assert!((fast.i_cw_minus_i_cx - out.values.i_cw_minus_i_cx).abs() < 1e-9);
    }

    #[test]
    fn values_respect_data_processing(seed in any::<u64>(), c in 1usize..5, w in 1usize..5) {
        prop_assume!(c * w >= 2);
        let mut rng = rng_from_seed(seed);
        let src = random_source(&mut rng, 3, 2, 2);
        let param = ChannelParam::random(&mut rng, 2, c, w).unwrap();
        let v = Evaluator::new(&src).evaluate_param(&param);
        prop_assert!(v.i_xw <= entropic_profile(&src).i_x_b + 1e-9);
        prop_assert!(v.i_rw_given_x >= -1e-9);
    }
}

#[test]
fn optimizer_results_are_feasible_and_bounded() {
    let mut rng = rng_from_seed(21);
    for k in 0..3 {
        let src = random_source(&mut rng, 2, 2, 2);
        let ixb = entropic_profile(&src).i_x_b;
        for delta in [0.0, 0.05, 0.5] {
            let r = optimize_idelta(&src, delta, &quick(k)).unwrap();
            assert!(r.feasible);
            assert!(r.constraint <= delta + 1e-4);
            assert!(r.value <= ixb + 1e-6);
        }
    }
}

#[test]
fn monotonized_curve_is_nondecreasing() {
    let curve = idelta_curve(&src_b(), &[0.0, 0.1, 0.3, 1.0], &quick(0)).unwrap();
    assert!(idelta_curve(&src_b(), &[0.3, 0.1], &quick(0)).is_err());
    for w in curve.points.windows(2) {
        assert!(w[1].lower_bound >= w[0].lower_bound);
    }
    for p in &curve.points {
        assert!(p.lower_bound >= p.raw);
    }
}

#[test]
fn visited_channels_obey_collapse_chain() {
    let src = src_b();
    let delta = 0.02;
    let opts = OptimizerOptions { record_trace: true, ..quick(3) };
    let r = optimize_idelta(&src, delta, &opts).unwrap();
    assert!(!r.trace.is_empty());
    for &(value, constraint) in &r.trace {
        let dp = delta_prime(&src, constraint.max(0.0)).unwrap();
        assert!(value <= collapse_bound(dp, 2) + 1e-9);
    }
}

#[test]
fn orthogonal_source_two_copy_additivity() {
    let one = optimize_idelta(&src_a(), 0.0, &quick(0)).unwrap().value;
    let opts = OptimizerOptions { c_dim: Some(4), w_dim: Some(4), ..quick(0) };
    let two = optimize_idelta(&src_a().power(2).unwrap(), 0.0, &opts).unwrap().value;
    assert!((two - 2.0 * one).abs() <= 0.05, "I0 two copies {two} vs single {one}");
}
