//! Seeded random comparison of the analytic maps against the dense circuits.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dense::{dm_connect, dm_dejmps_step, dm_memory, dm_twirl, DenseState};
use crate::error::Result;
use crate::model::{BitPair, GraphDiagonalState};
use crate::noise::{memory_decohere, MemorySides, NoiseModel};
use crate::purification::{dejmps_branch, OutcomeClass, PurifyStepResult};
use crate::swapping::ConnectResult;

pub const ORACLE_TOL: f64 = 1e-12;
pub const GRID: [f64; 3] = [1.0, 0.99, 0.9];

/// The analytic maps under test. The library maps are [`Reference`];
/// tests plug in deliberately broken ones.
pub trait AnalyticMaps {
    fn purify(&self, a: &GraphDiagonalState, b: &GraphDiagonalState, m: &NoiseModel) -> Result<PurifyStepResult>;
    fn connect(
        &self,
        a: &GraphDiagonalState,
        b: &GraphDiagonalState,
        outcomes: BitPair,
        m: &NoiseModel,
    ) -> ConnectResult;
    fn decohere(&self, s: &GraphDiagonalState, t: f64, m: &NoiseModel) -> Result<GraphDiagonalState>;
}

pub struct Reference;

impl AnalyticMaps for Reference {
    fn purify(&self, a: &GraphDiagonalState, b: &GraphDiagonalState, m: &NoiseModel) -> Result<PurifyStepResult> {
        crate::purification::dejmps_noisy(a, b, m)
    }

    fn connect(
        &self,
        a: &GraphDiagonalState,
        b: &GraphDiagonalState,
        outcomes: BitPair,
        m: &NoiseModel,
    ) -> ConnectResult {
        crate::swapping::connect_noisy(a, b, outcomes, m)
    }

    fn decohere(&self, s: &GraphDiagonalState, t: f64, m: &NoiseModel) -> Result<GraphDiagonalState> {
        memory_decohere(s, t, m)
    }
}

/// Inputs of one comparison, enough to replay it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub index: usize,
    pub p: f64,
    pub eta: f64,
    pub a: GraphDiagonalState,
    pub b: GraphDiagonalState,
}

/// Maximum absolute deviation per compared quantity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub cases: usize,
    pub seed: u64,
    pub dejmps: f64,
    pub dejmps_prob: f64,
    pub dejmps_failure: f64,
    pub dejmps_class_sum: f64,
    pub connect: f64,
    pub connect_prob_sum: f64,
    pub twirl_idempotence: f64,
    pub twirl_diagonal: f64,
    pub memory: f64,
    /// Case with the largest map deviation.
    pub worst: Option<Case>,
}

impl OracleReport {
    pub fn deviations(&self) -> [(&'static str, f64); 9] {
        [
            ("dejmps", self.dejmps),
            ("dejmps_prob", self.dejmps_prob),
            ("dejmps_failure", self.dejmps_failure),
            ("dejmps_class_sum", self.dejmps_class_sum),
            ("connect", self.connect),
            ("connect_prob_sum", self.connect_prob_sum),
            ("twirl_idempotence", self.twirl_idempotence),
            ("twirl_diagonal", self.twirl_diagonal),
            ("memory", self.memory),
        ]
    }

    pub fn passed(&self) -> bool {
        self.deviations().iter().all(|(_, d)| *d < ORACLE_TOL)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} cases, seed {}", self.cases, self.seed)?;
        for (name, d) in self.deviations() {
            let verdict = if d < ORACLE_TOL { "ok" } else { "MISMATCH" };
            writeln!(f, "{name:<18} {d:.3e} {verdict}")?;
        }
        if let (false, Some(c)) = (self.passed(), &self.worst) {
            writeln!(
                f,
                "worst case #{}: p = {}, eta = {}, a = {}, b = {}",
                c.index, c.p, c.eta, c.a, c.b
            )?;
        }
        Ok(())
    }
}

/// Uniform sample from the probability simplex with a random shift.
pub fn random_graph_diagonal(rng: &mut impl Rng) -> GraphDiagonalState {
    let raw: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
    let sum: f64 = raw.iter().sum();
    let shift = BitPair(rng.gen(), rng.gen());
    GraphDiagonalState::new(raw.map(|x| x / sum), shift).expect("simplex sample")
}

/// Random full-rank density matrix `G G† / tr(G G†)` with Gaussian `G`.
pub fn random_density_matrix(rng: &mut impl Rng) -> DenseState {
    let g = nalgebra::DMatrix::from_fn(4, 4, |_, _| {
        num_complex::Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DenseState::new(m / tr).expect("Ginibre sample")
}

fn diff(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares `maps` with the dense circuits on `samples` random input pairs,
/// cycling through every `(p, eta)` combination of [`GRID`].
pub fn run_oracle_check(maps: &dyn AnalyticMaps, samples: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        cases: samples,
        seed,
        ..OracleReport::default()
    };
    let mut worst = 0.0;
    for index in 0..samples {
        let p = GRID[index % 3];
        let eta = GRID[(index / 3) % 3];
        let model = NoiseModel::new(p, eta, 1.0)?;
        let a = random_graph_diagonal(&mut rng);
        let b = random_graph_diagonal(&mut rng);
        let (da, db) = (DenseState::from_graph_diagonal(&a), DenseState::from_graph_diagonal(&b));
        let mut case_dev: f64 = 0.0;

        // purification: success class is ζ ⊕ ξ equal to the shift parity
        let parity = a.shift().parity() ^ b.shift().parity();
        let mut success = [0.0; 4];
        let mut failure = [0.0; 4];
        let (mut p_success, mut p_failure) = (0.0, 0.0);
        for o in BitPair::ALL {
            let (s, prob) = match dm_dejmps_step(&da, &db, &model, o) {
                Ok(r) => r,
                Err(crate::Error::Degenerate { .. }) => continue,
                Err(e) => return Err(e),
            };
            let diag = s.graph_diagonal()?;
            let (acc, total) = if o.parity() == parity {
                (&mut success, &mut p_success)
            } else {
                (&mut failure, &mut p_failure)
            };
            for (x, d) in acc.iter_mut().zip(diag) {
                *x += prob * d;
            }
            *total += prob;
        }
        report.dejmps_class_sum = report.dejmps_class_sum.max((p_success + p_failure - 1.0).abs());

        let analytic = maps.purify(&a, &b, &model)?;
        let got = success.map(|x| x / p_success);
        let dev = diff(&got, &analytic.state.coeffs_in_unshifted_basis());
        report.dejmps = report.dejmps.max(dev);
        case_dev = case_dev.max(dev);
        let prob_dev = (analytic.success_prob - p_success).abs();
        report.dejmps_prob = report.dejmps_prob.max(prob_dev);
        case_dev = case_dev.max(prob_dev);

        let fail_weights = dejmps_branch(&a, &b, &model, OutcomeClass::Failure);
        let fail_analytic = GraphDiagonalState::normalized(fail_weights, analytic.state.shift());
        let fail_dev = diff(
            &failure.map(|x| x / p_failure),
            &fail_analytic.coeffs_in_unshifted_basis(),
        );
        report.dejmps_failure = report.dejmps_failure.max(fail_dev);

        // connection: every outcome, each with its own shift
        let mut p_total = 0.0;
        for o in BitPair::ALL {
            let (s, prob) = dm_connect(&da, &db, &model, o)?;
            p_total += prob;
            let analytic = maps.connect(&a, &b, o, &model);
            let dev = diff(&s.graph_diagonal()?, &analytic.state.coeffs_in_unshifted_basis());
            report.connect = report.connect.max(dev);
            case_dev = case_dev.max(dev);
        }
        report.connect_prob_sum = report.connect_prob_sum.max((p_total - 1.0).abs());

        // memory: Kraus form against the coefficient map, both noise sides
        let t = rng.gen_range(0.0..2.0);
        for sides in [MemorySides::Both, MemorySides::One] {
            let mm = model.with_memory(sides);
            let dense = dm_memory(&da, t, &mm)?.graph_diagonal()?;
            let analytic = maps.decohere(&a, t, &mm)?;
            let dev = diff(&dense, &analytic.coeffs_in_unshifted_basis());
            report.memory = report.memory.max(dev);
            case_dev = case_dev.max(dev);
        }

        // twirl on an arbitrary state
        let rho = random_density_matrix(&mut rng);
        let once = dm_twirl(&rho)?;
        let twice = dm_twirl(&once)?;
        report.twirl_idempotence = report.twirl_idempotence.max(once.max_abs_diff(&twice));
        let diag_dev = diff(&rho.graph_diagonal()?, &once.graph_diagonal()?).max(once.graph_off_diagonal()?);
        report.twirl_diagonal = report.twirl_diagonal.max(diag_dev);

        if case_dev > worst || report.worst.is_none() {
            worst = case_dev;
            report.worst = Some(Case { index, p, eta, a, b });
        }
    }
    Ok(report)
}
