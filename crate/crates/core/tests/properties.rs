use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use qrepeater::fixed_point::{purification_regime, purification_threshold, BRACKET_LO};
use qrepeater::noise::memory_decohere;
use qrepeater::oracle::{dm_twirl, DenseState};
use qrepeater::protocols::{
    blind_overhead, optimize_strategy, run_innsbruck, run_standard, ProtocolKind, ProtocolSpec, TimeModel,
};
use qrepeater::purification::{dejmps_noisy, output_shift, pump, regular_round};
use qrepeater::swapping::{connect_noisy, connect_perfect};
use qrepeater::{BitPair, GraphDiagonalState, NoiseModel, WernerParams};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn bits() -> impl Strategy<Value = BitPair> {
    (any::<bool>(), any::<bool>()).prop_map(|(a, b)| BitPair(a, b))
}

fn state() -> impl Strategy<Value = GraphDiagonalState> {
    (prop::array::uniform4(0.001f64..1.0), bits()).prop_map(|(raw, shift)| {
        let sum: f64 = raw.iter().sum();
        GraphDiagonalState::new(raw.map(|x| x / sum), shift).unwrap()
    })
}

fn model() -> impl Strategy<Value = NoiseModel> {
    (0.8f64..=1.0, 0.8f64..=1.0, 0.0f64..5.0).prop_map(|(p, eta, kappa)| NoiseModel::new(p, eta, kappa).unwrap())
}

fn is_normalized(s: &GraphDiagonalState) -> bool {
    let c = s.coeffs();
    (c.iter().sum::<f64>() - 1.0).abs() < 1e-12 && c.iter().all(|x| (0.0..=1.0).contains(x))
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn memory_is_a_semigroup(s in state(), m in model(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let split = memory_decohere(&memory_decohere(&s, t1, &m).unwrap(), t2, &m).unwrap();
        let joint = memory_decohere(&s, t1 + t2, &m).unwrap();
        prop_assert!(split.max_abs_diff(&joint) < 1e-12);
    }

    #[test]
    fn purification_is_shift_covariant(a in state(), b in state(), m in model(), d in bits(), e in bits()) {
        let plain = dejmps_noisy(&a, &b, &m).unwrap();
        let (a2, b2) = (a.apply_shift(d), b.apply_shift(e));
        let moved = dejmps_noisy(&a2, &b2, &m).unwrap();
        prop_assert!(plain.state.max_abs_diff(&moved.state) < 1e-12);
        prop_assert!((plain.success_prob - moved.success_prob).abs() < 1e-12);
        prop_assert_eq!(moved.state.shift(), output_shift(&a2, &b2));
    }

    #[test]
    fn connection_is_shift_covariant(a in state(), b in state(), m in model(), d in bits(), e in bits(), o in bits()) {
        let plain = connect_noisy(&a, &b, o, &m);
        let moved = connect_noisy(&a.apply_shift(d), &b.apply_shift(e), o, &m);
        prop_assert!(plain.state.max_abs_diff(&moved.state) < 1e-12);
        prop_assert_eq!(moved.state.shift(), plain.state.shift() ^ d ^ e);
    }

    #[test]
    fn every_map_stays_normalized(a in state(), b in state(), m in model(), o in bits(), t in 0.0f64..1.0) {
        prop_assert!(is_normalized(&dejmps_noisy(&a, &b, &m).unwrap().state));
        prop_assert!(is_normalized(&connect_noisy(&a, &b, o, &m).state));
        prop_assert!(is_normalized(&memory_decohere(&a, t, &m).unwrap()));
        prop_assert!(is_normalized(&regular_round(&a, t, &m).unwrap().state));
        for r in pump(&a, &b, 3, t, &m).unwrap() {
            prop_assert!(is_normalized(&r.state));
        }
    }

    #[test]
    fn werner_parameters_multiply(x in -1.0f64 / 3.0..=1.0, y in -1.0f64 / 3.0..=1.0) {
        let a = WernerParams::from_x(x).unwrap().state();
        let b = WernerParams::from_x(y).unwrap().state();
        let got = connect_perfect(&a, &b, BitPair::ZERO).state;
        prop_assert!((got.werner_x() - x * y).abs() < 1e-12);
    }

    #[test]
    fn blind_overhead_is_monotone(steps in 1usize..5, branching in 2usize..4, levels in 1usize..4, p in 0.5f64..1.0) {
        let base = blind_overhead(steps, branching, levels, p).unwrap().overhead;
        prop_assert!(base >= 1.0);
        prop_assert!(blind_overhead(steps + 1, branching, levels, p).unwrap().overhead >= base);
        prop_assert!(blind_overhead(steps, branching + 1, levels, p).unwrap().overhead >= base);
        prop_assert!(blind_overhead(steps, branching, levels + 1, p).unwrap().overhead >= base);
        prop_assert!(blind_overhead(steps, branching, levels, (p + 1.0) / 2.0).unwrap().overhead <= base);
        prop_assert_eq!(blind_overhead(steps, branching, levels, 1.0).unwrap().overhead, 1.0);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn twirl_is_idempotent(raw in prop::array::uniform16(-1.0f64..1.0)) {
        // Hermitian positive G G† from a random real G
        let g = nalgebra::DMatrix::from_fn(4, 4, |i, j| num_complex::Complex64::new(raw[4 * i + j], 0.0));
        let m = &g * g.adjoint() + nalgebra::DMatrix::identity(4, 4) * num_complex::Complex64::new(1e-3, 0.0);
        let tr = m.trace();
        let rho = DenseState::new(m / tr).unwrap();
        let once = dm_twirl(&rho).unwrap();
        prop_assert!(once.max_abs_diff(&dm_twirl(&once).unwrap()) < 1e-12);
        prop_assert!(once.graph_off_diagonal().unwrap() < 1e-12);
    }

    #[test]
    fn optimal_strategies_never_add_steps(error in 0.001f64..0.03, coherence in 0.05f64..3.0) {
        let m = NoiseModel::symmetric(error, coherence).unwrap();
        let s = optimize_strategy(&TimeModel::default(), &m, WernerParams::from_fidelity(0.8).unwrap(), None).unwrap();
        prop_assert_eq!(s.steps.len(), s.max_level);
        prop_assert!(s.steps.windows(2).all(|w| w[0] >= w[1]), "{:?}", s.steps);
    }

    #[test]
    fn regimes_shrink_with_level(p in 0.985f64..=1.0, kappa in 0.0f64..3.0) {
        let m = NoiseModel::new(p, p, kappa).unwrap();
        let tm = TimeModel::default();
        let rows: Vec<_> = (1..=11).map(|l| purification_regime(l, &tm, &m, None).unwrap()).collect();
        for w in rows.windows(2) {
            match (w[0].max_fidelity, w[1].max_fidelity) {
                (Some(a), Some(b)) => prop_assert!(b <= a + 1e-12),
                (None, Some(_)) => prop_assert!(false, "regime reappeared at level {}", w[1].level),
                _ => {}
            }
            if let (Some(a), Some(b)) = (w[0].min_fidelity, w[1].min_fidelity) {
                // both ends come from bisection at 1e-4 resolution
                prop_assert!(b >= a - 2e-4);
            }
        }
    }

    #[test]
    fn no_memory_noise_means_equal_levels(p in 0.985f64..=1.0) {
        let m = NoiseModel::new(p, p, 0.0).unwrap();
        let tm = TimeModel::default();
        let first = purification_regime(1, &tm, &m, Some(0.8)).unwrap();
        for l in 2..=11 {
            let r = purification_regime(l, &tm, &m, Some(0.8)).unwrap();
            let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() < 1e-9,
                (None, None) => true,
                _ => false,
            };
            prop_assert!(close(r.min_fidelity, first.min_fidelity));
            prop_assert!(close(r.max_fidelity, first.max_fidelity));
            prop_assert!(close(r.max_fidelity_pumping, first.max_fidelity_pumping));
        }
    }

    #[test]
    fn threshold_ignores_bracket_details(level in 1usize..=8, lo in 0.0f64..0.01, hi in 0.0f64..0.02) {
        let m = NoiseModel::new(0.99, 0.99, 1.0).unwrap();
        let tm = TimeModel::default();
        let r = purification_regime(level, &tm, &m, None).unwrap();
        let (min, max) = (r.min_fidelity.unwrap(), r.max_fidelity.unwrap());
        let moved = purification_threshold(BRACKET_LO + lo, max - 0.01 - hi, r.wait, &m).unwrap();
        prop_assert!((moved - min).abs() < 2e-4, "{} vs {}", moved, min);
    }

    #[test]
    fn without_memory_noise_pumping_matches_regular(p in 0.97f64..=1.0, levels in 1usize..6, steps in 0usize..=1) {
        let m = NoiseModel::new(p, p, 0.0).unwrap();
        let tm = TimeModel::default();
        let std = run_standard(&ProtocolSpec::uniform(ProtocolKind::Standard, levels, steps, 0.8).unwrap(), &tm, &m).unwrap();
        let inn = run_innsbruck(&ProtocolSpec::uniform(ProtocolKind::Innsbruck, levels, steps, 0.8).unwrap(), &tm, &m).unwrap();
        for (a, b) in std.iter().zip(&inn) {
            prop_assert!((a.fidelity - b.fidelity).abs() < 1e-9);
        }
    }

    #[test]
    fn resources_follow_step_probabilities(levels in 1usize..8, steps in 0usize..5) {
        let m = NoiseModel::new(0.99, 0.99, 1.0).unwrap();
        let tm = TimeModel::default();
        let std = run_standard(&ProtocolSpec::uniform(ProtocolKind::Standard, levels, steps, 0.8).unwrap(), &tm, &m).unwrap();
        let mut r = 1.0;
        for rep in &std {
            r *= 2f64.powi(steps as i32) / rep.step_success_probs.iter().product::<f64>();
            prop_assert!((rep.resources / r - 1.0).abs() < 1e-9);
        }
        let inn = run_innsbruck(&ProtocolSpec::uniform(ProtocolKind::Innsbruck, levels, steps, 0.8).unwrap(), &tm, &m).unwrap();
        let mut r = 1.0;
        for rep in &inn {
            r *= 1.0 + rep.step_success_probs.iter().map(|p| 1.0 / p).sum::<f64>();
            prop_assert!((rep.resources / r - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn table_two_closed_form() {
    let m = NoiseModel::new(0.99, 0.99, 1.0).unwrap();
    let spec = ProtocolSpec::uniform(ProtocolKind::Standard, 11, 3, 0.8).unwrap();
    let reports = run_standard(&spec, &TimeModel::default(), &m).unwrap();
    let expected = reports
        .iter()
        .fold(1.0, |r, rep| r * 8.0 / rep.step_success_probs.iter().product::<f64>());
    assert!((reports[10].resources / expected - 1.0).abs() < 1e-9);
    assert!((reports[0].fidelity - 0.956246).abs() < 1e-6);
}
