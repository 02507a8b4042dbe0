//! Acceptance checks, one verdict line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrepeater::fixed_point::purification_regime;
use qrepeater::model::{BitPair, GraphDiagonalState, WernerParams};
use qrepeater::noise::{memory_decohere, NoiseModel};
use qrepeater::oracle::{dm_twirl, random_density_matrix, random_graph_diagonal, run_oracle_check, Reference};
use qrepeater::protocols::{blind_overhead, optimize_strategy, run_standard, ProtocolKind, ProtocolSpec, TimeModel};
use qrepeater::purification::{dejmps_noisy, output_shift, regular_round};
use qrepeater::swapping::{connect_chain, connect_noisy, connect_perfect};

const SEED: u64 = 20_060_811;

struct Criterion {
    id: usize,
    title: &'static str,
    lines: Vec<(bool, String)>,
    started: Instant,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            lines: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.lines.push((ok, detail));
    }

    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{what}: got {got:.6}, want {want} ± {tol:e}"));
    }

    fn within_time(&mut self, limit: Duration) {
        let took = self.started.elapsed();
        self.check(took < limit, format!("runtime {took:.2?} (limit {limit:?})"));
    }

    fn report(self) -> bool {
        let passed = self.lines.iter().all(|(ok, _)| *ok);
        let failed = self.lines.iter().filter(|(ok, _)| !*ok).count();
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {}: {} ({} checks, {failed} failed)",
            self.id,
            self.title,
            self.lines.len()
        );
        for (ok, line) in &self.lines {
            println!("    [{}] {line}", if *ok { "ok" } else { "FAIL" });
        }
        passed
    }
}

fn table_model() -> NoiseModel {
    NoiseModel::new(0.99, 0.99, 1.0).unwrap()
}

// (min, max, max pumping) per level
const TABLE_I: [(f64, f64, f64); 11] = [
    (0.5276, 0.985870, 0.882761),
    (0.5276, 0.985778, 0.882689),
    (0.5278, 0.985595, 0.882545),
    (0.5280, 0.985227, 0.882257),
    (0.5284, 0.984491, 0.881682),
    (0.5292, 0.983017, 0.875948),
    (0.5310, 0.980056, 0.878236),
    (0.5344, 0.974090, 0.873666),
    (0.5417, 0.961958, 0.864609),
    (0.5575, 0.936728, 0.846823),
    (0.5965, 0.880294, 0.812544),
];

fn regimes() -> Criterion {
    let mut c = Criterion::new(1, "purification regimes per level");
    let tm = TimeModel::default();
    let m = table_model();
    for (i, &(min, max, pump)) in TABLE_I.iter().enumerate() {
        let level = i + 1;
        let r = purification_regime(level, &tm, &m, Some(0.8)).unwrap();
        let got = |v: Option<f64>| v.unwrap_or(f64::NAN);
        c.near(&format!("level {level} min"), got(r.min_fidelity), min, 5e-4);
        c.near(&format!("level {level} max"), got(r.max_fidelity), max, 2e-3);
        c.near(&format!("level {level} pumping"), got(r.max_fidelity_pumping), pump, 3e-3);
    }
    let r12 = purification_regime(12, &tm, &m, Some(0.8)).unwrap();
    c.check(
        r12.is_empty() && r12.max_fidelity_pumping.is_none(),
        format!("level 12 empty: {:?}", r12),
    );
    c.within_time(Duration::from_secs(60));
    c
}

fn standard_table() -> Criterion {
    let mut c = Criterion::new(2, "standard protocol, three steps per level");
    let spec = ProtocolSpec::uniform(ProtocolKind::Standard, 11, 3, 0.8).unwrap();
    let r = run_standard(&spec, &TimeModel::default(), &table_model()).unwrap();
    let r1 = r[0].resources;
    c.check((13.0..=17.0).contains(&r1), format!("level 1 resources: got {r1:.4}, want in [13, 17]"));
    c.near("level 1 fidelity", r[0].fidelity, 0.956246, 3e-3);
    let r11 = r[10].resources;
    let ratio = r11 / 2.19e11;
    c.check(
        (1.0 / 1.5..=1.5).contains(&ratio),
        format!("level 11 resources: got {r11:.4e}, want 2.19e11 within a factor 1.5 (ratio {ratio:.3})"),
    );
    c.near("level 11 fidelity", r[10].fidelity, 0.873666, 3e-3);
    c.within_time(Duration::from_secs(10));
    c
}

fn blind_table() -> Criterion {
    let mut c = Criterion::new(3, "blind-mode overhead");
    let expected = [
        (1, 0.95, 1.17),
        (1, 0.9, 1.37),
        (2, 0.95, 2.52),
        (2, 0.9, 6.66),
        (3, 0.95, 254.6),
        (3, 0.9, 8.7e4),
        (4, 0.95, 2.7e14),
        (4, 0.9, 4.4e19),
    ];
    for (m, p, want) in expected {
        let got = blind_overhead(3, 2, m, p).unwrap().overhead;
        let rel = (got / want - 1.0).abs();
        c.check(
            rel <= 0.01,
            format!("M=3 L=2 m={m} p={p}: got {got:.4e}, want {want:e} within 1% (off by {:.2}%)", 100.0 * rel),
        );
    }
    let g = blind_overhead(2, 3, 3, 0.95).unwrap();
    let rel = (g.overhead / 40.0 - 1.0).abs();
    c.check(
        rel <= 0.05 && g.distance_gain == 27.0,
        format!(
            "M=2 L=3 m=3 p=0.95: got {:.2} (gain {}), want 40 within 5%",
            g.overhead, g.distance_gain
        ),
    );
    c.within_time(Duration::from_secs(1));
    c
}

fn max_level(error: f64, coherence: f64) -> usize {
    let m = NoiseModel::new(1.0 - error, 1.0 - error, 1.0 / coherence).unwrap();
    let w = WernerParams::from_fidelity(0.8).unwrap();
    optimize_strategy(&TimeModel::default(), &m, w, None).unwrap().max_level
}

fn pumping_levels() -> Criterion {
    let mut c = Criterion::new(4, "maximal pumping level");
    for (coherence, want) in [(1.0, 5usize), (0.1, 3)] {
        let got = max_level(0.01, coherence);
        c.check(
            got.abs_diff(want) <= 1,
            format!("1-p = 0.01, 1/kappa = {coherence} s: level {got}, want {want} ± 1"),
        );
    }
    let coherence = [0.05, 0.1, 0.3, 1.0, 3.0];
    let by_time: Vec<usize> = coherence.iter().map(|&t| max_level(0.01, t)).collect();
    c.check(
        by_time.windows(2).all(|w| w[0] <= w[1]),
        format!("non-decreasing in 1/kappa over {coherence:?}: {by_time:?}"),
    );
    let errors = [0.03, 0.02, 0.01, 0.005, 0.001];
    let by_error: Vec<usize> = errors.iter().map(|&e| max_level(e, 1.0)).collect();
    c.check(
        by_error.windows(2).all(|w| w[0] <= w[1]),
        format!("non-decreasing in p over 1-p = {errors:?}: {by_error:?}"),
    );
    c.within_time(Duration::from_secs(120));
    c
}

fn werner_algebra() -> Criterion {
    let mut c = Criterion::new(5, "Werner parameters under connection");
    let grid: Vec<f64> = (0..10).map(|i| -1.0 / 3.0 + (4.0 / 3.0) * i as f64 / 9.0).collect();
    let mut worst: f64 = 0.0;
    for &x in &grid {
        for &y in &grid {
            let a = WernerParams::from_x(x).unwrap().state();
            let b = WernerParams::from_x(y).unwrap().state();
            let want = WernerParams::from_x(x * y).unwrap().state();
            worst = worst.max(connect_perfect(&a, &b, BitPair::ZERO).state.max_abs_diff(&want));
        }
    }
    c.check(worst < 1e-12, format!("10x10 grid: max deviation {worst:.2e}"));
    let mut worst_chain: f64 = 0.0;
    for &x in &grid {
        let w = WernerParams::from_x(x).unwrap().state();
        let got = connect_chain(&[w; 5], &NoiseModel::perfect()).unwrap().state;
        let want = WernerParams::from_x(x.powi(5)).unwrap().state();
        worst_chain = worst_chain.max(got.max_abs_diff(&want));
    }
    c.check(worst_chain < 1e-12, format!("chains of 5: max deviation {worst_chain:.2e}"));
    c
}

fn oracle_equivalence() -> Criterion {
    let mut c = Criterion::new(6, "analytic maps against the dense simulation");
    let r = run_oracle_check(&Reference, 1026, SEED).unwrap();
    for (name, d) in r.deviations() {
        c.check(d < 1e-12, format!("{name}: max deviation {d:.2e} over {} inputs", r.cases));
    }
    c.within_time(Duration::from_secs(30));
    c
}

fn properties() -> Criterion {
    let mut c = Criterion::new(7, "randomized properties");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut semigroup, mut norm, mut twirl): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut covariance_ok = true;
    for _ in 0..500 {
        let p = rng.gen_range(0.8..=1.0);
        let eta = rng.gen_range(0.8..=1.0);
        let m = NoiseModel::new(p, eta, rng.gen_range(0.0..5.0)).unwrap();
        let a = random_graph_diagonal(&mut rng);
        let b = random_graph_diagonal(&mut rng);
        let (t1, t2) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));

        let split = memory_decohere(&memory_decohere(&a, t1, &m).unwrap(), t2, &m).unwrap();
        let joint = memory_decohere(&a, t1 + t2, &m).unwrap();
        semigroup = semigroup.max(split.max_abs_diff(&joint));

        let d = BitPair(rng.gen(), rng.gen());
        let e = BitPair(rng.gen(), rng.gen());
        let o = BitPair(rng.gen(), rng.gen());
        let plain = dejmps_noisy(&a, &b, &m).unwrap();
        let moved = dejmps_noisy(&a.apply_shift(d), &b.apply_shift(e), &m).unwrap();
        covariance_ok &= plain.state.max_abs_diff(&moved.state) < 1e-12
            && moved.state.shift() == output_shift(&a.apply_shift(d), &b.apply_shift(e));
        let plain = connect_noisy(&a, &b, o, &m);
        let moved = connect_noisy(&a.apply_shift(d), &b.apply_shift(e), o, &m);
        covariance_ok &= plain.state.max_abs_diff(&moved.state) < 1e-12
            && moved.state.shift() == plain.state.shift() ^ d ^ e;

        let outputs: [GraphDiagonalState; 4] = [
            dejmps_noisy(&a, &b, &m).unwrap().state,
            connect_noisy(&a, &b, o, &m).state,
            memory_decohere(&a, t1, &m).unwrap(),
            regular_round(&a, t1, &m).unwrap().state,
        ];
        for s in outputs {
            let sum: f64 = s.coeffs().iter().sum();
            norm = norm.max((sum - 1.0).abs());
            if s.coeffs().iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                norm = f64::INFINITY;
            }
        }

        let rho = random_density_matrix(&mut rng);
        let once = dm_twirl(&rho).unwrap();
        twirl = twirl.max(once.max_abs_diff(&dm_twirl(&once).unwrap()));
    }
    c.check(semigroup < 1e-12, format!("memory semigroup: max deviation {semigroup:.2e}"));
    c.check(covariance_ok, "shift covariance of purification and connection".into());
    c.check(norm < 1e-12, format!("normalization: max deviation {norm:.2e}"));
    c.check(twirl < 1e-12, format!("twirl idempotence: max deviation {twirl:.2e}"));
    c
}

fn main() -> ExitCode {
    let criteria = [
        regimes(),
        standard_table(),
        blind_table(),
        pumping_levels(),
        werner_algebra(),
        oracle_equivalence(),
        properties(),
    ];
    let mut all = true;
    for c in criteria {
        all &= c.report();
    }
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}
