use cqrate_core::qcore::linalg::{c, ComplexMatrix, C64};
use cqrate_core::qcore::random::{haar_unitary, random_density, random_pure, rng_from_seed};
use cqrate_core::qcore::{
    conditional_mutual_information, entropy_of, fidelity, partial_trace, purify, trace_distance, uhlmann_isometry,
    von_neumann_entropy, DensityOperator, DimsSpec, PureState,
};
use proptest::prelude::*;

fn dims2(a: usize, b: usize) -> DimsSpec {
    DimsSpec::new([("A", a), ("B", b)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn purification_traces_back(seed in any::<u64>(), d in 1usize..5, rank in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, DimsSpec::single("A", d), rank);
        let psi = purify(&rho, "R").unwrap();
        let back = partial_trace(&psi.density(), &["A"]).unwrap();
        prop_assert!(trace_distance(&rho, &back).unwrap() < 1e-10);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in 1usize..6, rank in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, DimsSpec::single("A", d), rank);
        let u = haar_unitary(&mut rng, d);
        let rotated = DensityOperator::new(&u * rho.matrix() * u.adjoint(), DimsSpec::single("A", d)).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() < 1e-10);
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), rank in 1usize..9) {
        let mut rng = rng_from_seed(seed);
        let dims = DimsSpec::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let rho = random_density(&mut rng, dims, rank);
        prop_assert!(conditional_mutual_information(&rho, &["A"], &["C"], &["B"]).unwrap() >= -1e-8);
    }

    #[test]
    fn partial_trace_keeps_trace_and_order(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, DimsSpec::new([("A", 2), ("B", 3), ("C", 2)]).unwrap(), 4);
        let ac = partial_trace(&rho, &["C", "A"]).unwrap();
        prop_assert_eq!(ac.dims().labels().collect::<Vec<_>>(), vec!["A", "C"]);
        let t: C64 = (0..4).map(|i| ac.matrix()[(i, i)]).sum();
        prop_assert!((t.re - 1.0).abs() < 1e-12 && t.im.abs() < 1e-12);
        // tracing in two steps agrees with one step
        let a1 = partial_trace(&ac, &["A"]).unwrap();
        let a2 = partial_trace(&rho, &["A"]).unwrap();
        prop_assert!((a1.matrix() - a2.matrix()).norm() < 1e-12);
    }

    #[test]
    fn uhlmann_attains_fidelity(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let psi = random_pure(&mut rng, dims2(2, 3));
        let phi = random_pure(&mut rng, DimsSpec::new([("A", 2), ("C", 3)]).unwrap());
        let v = uhlmann_isometry(&psi, &phi, &["A"]).unwrap();
        let moved = psi.apply(&v).unwrap().permuted(&["A", "C"]).unwrap();
        let f = fidelity(&psi.reduced(&["A"]).unwrap(), &phi.reduced(&["A"]).unwrap()).unwrap();
        prop_assert!((moved.overlap(&phi).unwrap() - f).abs() < 1e-8);
    }
}

#[test]
fn bell_state_entropies() {
    let h = 1.0 / 2f64.sqrt();
    let amps = cqrate_core::ComplexVector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
    let bell = PureState::new(amps, dims2(2, 2)).unwrap().density();
    assert!((entropy_of(&bell, &["A"]).unwrap() - 1.0).abs() < 1e-12);
    assert!(entropy_of(&bell, &["A", "B"]).unwrap().abs() < 1e-12);
}

#[test]
fn fidelity_of_commuting_states_is_classical() {
    // F(diag p, diag q) = Σ √(p_i q_i)
    let p = [0.5, 0.3, 0.2];
    let q = [0.1, 0.6, 0.3];
    let rho = DensityOperator::diagonal("A", &p).unwrap();
    let sigma = DensityOperator::diagonal("A", &q).unwrap();
    let want: f64 = p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).sum();
    assert!((fidelity(&rho, &sigma).unwrap() - want).abs() < 1e-12);
    let td: f64 = 0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
    assert!((trace_distance(&rho, &sigma).unwrap() - td).abs() < 1e-12);
}

#[test]
fn rejects_non_hermitian_input() {
    let m = ComplexMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
    assert!(DensityOperator::new(m, DimsSpec::single("A", 2)).is_err());
}
