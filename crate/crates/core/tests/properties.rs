mod common;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use proctensor::qmat::names;
use proctensor::random::{haar_unitary, random_instrument_kraus, rng_from_seed, wishart_state};
use proctensor::{
    build_process_tensor, check_ocp, chi_decompose, classify, compose_choi, default_grid, extract_l_tr, invert,
    link_product, Channel, IcpVerdict, Label, Tolerances,
};

fn cases(n: u32) -> Config {
    Config {
        cases: n,
        failure_persistence: None,
        ..Config::default()
    }
}

fn random_channel(seed: u64, d_out: usize, d_in: usize) -> Channel {
    let mut rng = rng_from_seed(seed);
    // Stinespring: isometry d_in -> d_out ⊗ 2, cut into Kraus blocks
    let u = haar_unitary(&mut rng, (2 * d_out).max(d_in));
    let kraus: Vec<_> = (0..2)
        .map(|k| u.view((k * d_out, 0), (d_out, d_in)).into_owned())
        .collect();
    Channel::from_kraus(&kraus).unwrap()
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let a = random_channel(seed, 2, 3);
        let b = random_channel(seed ^ 1, 3, 2);
        let c = random_channel(seed ^ 2, 2, 2);
        let left = compose_choi(&compose_choi(&a, &b).unwrap(), &c).unwrap();
        let right = compose_choi(&a, &compose_choi(&b, &c).unwrap()).unwrap();
        prop_assert!(left.choi().distance(right.choi()).unwrap() < 1e-12);
        prop_assert!(left.is_cptp(&Tolerances::default()));
    }

    #[test]
    fn composition_matches_sequential_application(seed in any::<u64>()) {
        let a = random_channel(seed, 2, 2);
        let b = random_channel(seed ^ 7, 2, 2);
        let rho = wishart_state(&mut rng_from_seed(seed), 2);
        let direct = a.apply_matrix(&b.apply_matrix(&rho).unwrap()).unwrap();
        let composed = compose_choi(&a, &b).unwrap().apply_matrix(&rho).unwrap();
        prop_assert!(close(&direct, &composed, 1e-12));
    }

    #[test]
    fn superoperator_round_trip(seed in any::<u64>()) {
        let ch = random_channel(seed, 2, 3);
        let back = Channel::from_superoperator(&ch.superoperator(), 2, 3).unwrap();
        prop_assert!(back.choi().distance(ch.choi()).unwrap() < 1e-13);
    }

    #[test]
    fn inverse_composes_to_identity(seed in any::<u64>()) {
        let ch = random_channel(seed, 2, 2);
        let inv = invert(&ch, &Tolerances::default()).unwrap();
        let id = compose_choi(&inv, &ch).unwrap();
        prop_assert!(id.choi().distance(Channel::identity(2).choi()).unwrap() < 1e-8);
    }

    #[test]
    fn link_product_with_identity_is_neutral(seed in any::<u64>()) {
        let ch = random_channel(seed, 2, 2);
        let id = Channel::identity(2);
        let j = compose_choi(&id, &ch).unwrap();
        prop_assert!(j.choi().distance(ch.choi()).unwrap() < 1e-13);
        // link over a leg the operators do not share is a tensor product
        let a = ch.choi().relabel_all(&[(names::OUT, "a"), (names::IN, "b")]).unwrap();
        let b = id.choi().relabel_all(&[(names::OUT, "c"), (names::IN, "e")]).unwrap();
        let k = link_product(&a, &b).unwrap();
        prop_assert!(k.distance(&a.kron(&b).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn process_tensor_is_a_causal_comb(seed in any::<u64>()) {
        let scn = &random_scenarios(seed, 1)[0];
        let pt = build_process_tensor(scn, &Tolerances::default()).unwrap();
        prop_assert!((pt.op().trace().re - 4.0).abs() < 1e-12);
        prop_assert!(pt.op().is_psd(1e-9).unwrap().is_psd);
        prop_assert!(pt.causality_residual() < 1e-12);
        let l_tr = extract_l_tr(&pt).unwrap();
        prop_assert!(l_tr.is_cptp(&Tolerances::default()));
    }

    #[test]
    fn chi_has_vanishing_marginals(seed in any::<u64>()) {
        let scn = &random_scenarios(seed, 1)[0];
        let pt = build_process_tensor(scn, &Tolerances::default()).unwrap();
        let chi = chi_decompose(&pt).unwrap();
        prop_assert!(chi.marginal_residual().unwrap() < 1e-12);
    }

    #[test]
    fn contraction_of_chi_is_the_ocp_residual(seed in any::<u64>()) {
        let scn = &random_scenarios(seed, 1)[0];
        let tol = Tolerances::default();
        let pt = build_process_tensor(scn, &tol).unwrap();
        let norm = chi_decompose(&pt).unwrap().contraction_norm().unwrap();
        let ocp = check_ocp(&pt, &tol).unwrap();
        prop_assert!((norm - ocp.residual).abs() < 1e-12);
    }

    #[test]
    fn concatenation_forms_agree(seed in any::<u64>()) {
        let scn = &random_scenarios(seed, 1)[0];
        let pt = build_process_tensor(scn, &Tolerances::default()).unwrap();
        let composed = compose_choi(&proctensor::extract_l_ts(&pt).unwrap(), &proctensor::extract_l_sr(&pt).unwrap())
            .unwrap()
            .choi()
            .relabel_all(&[(names::OUT, names::T), (names::IN, names::R)])
            .unwrap();
        prop_assert!(concatenation_sandwich(&pt).unwrap().distance(&composed).unwrap() < 1e-12);
        prop_assert!(concatenation_from_tensor(&pt).unwrap().distance(&composed).unwrap() < 1e-12);
    }

    #[test]
    fn product_collisions_are_markovian(seed in any::<u64>()) {
        let scn = product_collision(seed);
        let tol = Tolerances::default();
        let report = classify(&scn, &default_grid(&scn, 3).unwrap(), &tol).unwrap();
        prop_assert_eq!(report.label, Label::Markovian);
        // generic Haar unitaries give an invertible family, so oCP forces iCP
        prop_assert_eq!(report.icp.global, IcpVerdict::Yes);
        prop_assert!(report.hierarchy_violations.is_empty());
    }
}

#[test]
fn born_rule_matches_oracle_for_random_instruments() {
    let mut runner = TestRunner::new(cases(16));
    runner
        .run(&any::<u64>(), |seed| {
            let s = proctensor::oracle::oracle_equivalence(seed, 1, 3, &Tolerances::default()).unwrap();
            prop_assert!(s.max_deviation < 1e-10, "{s:?}");
            prop_assert!(s.max_completeness_error < 1e-10, "{s:?}");
            Ok(())
        })
        .unwrap();
}

#[test]
fn random_kraus_instrument_sums_to_channel() {
    let mut rng = rng_from_seed(11);
    let kraus = random_instrument_kraus(&mut rng, 2, 3);
    let sets: Vec<Vec<_>> = kraus.into_iter().map(|k| vec![k]).collect();
    let inst = proctensor::Instrument::from_kraus_sets(&sets, &Tolerances::default()).unwrap();
    assert_eq!(inst.len(), 3);
}

fn loosened(v: f64) -> Tolerances {
    Tolerances::with_verdict(v)
}

#[test]
fn label_moves_inward_as_tolerance_loosens() {
    let mut scenarios = random_scenarios(5, 6);
    scenarios.extend(named_builtins());
    scenarios.push(product_collision(3));
    let steps = [1e-14, 1e-10, 1e-8, 1e-4, 1e-2, 1.0, 10.0];
    for scn in &scenarios {
        let grid = default_grid(scn, 6).unwrap();
        let labels: Vec<Label> = steps
            .iter()
            .map(|&v| classify(scn, &grid, &loosened(v)).unwrap().label)
            .collect();
        assert!(labels.windows(2).all(|w| w[1] <= w[0]), "{}: {labels:?}", scn.name());
    }
}

#[test]
fn classification_is_deterministic() {
    for scn in named_builtins() {
        let grid = default_grid(&scn, 8).unwrap();
        let a = classify(&scn, &grid, &Tolerances::default()).unwrap();
        let b = classify(&scn, &grid, &Tolerances::default()).unwrap();
        assert_eq!(a, b);
    }
}
