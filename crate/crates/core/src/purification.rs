//! DEJMPS recurrence purification on graph-diagonal pairs.
//!
//! For input weights `λ` (shift `m`) and `μ` (shift `n`) the unnormalized
//! output weight at index `(i1, i2)` is
//!
//! ```text
//! (1 − p²)/8 + p² Σ_a w(a) Σ_k1 λ[k1, k1⊕i2] μ[k1⊕i1, k1⊕i1⊕i2⊕a]
//! ```
//!
//! with `w(0) = η² + (1 − η)²`, `w(1) = 2η(1 − η)` for the successful outcome
//! class (the weights swap for the failing class). The output lives in the
//! basis shifted by `(m1 ⊕ n1, m1 ⊕ m2)`. The success probability is the sum
//! of the four weights and does not depend on the shifts.

use crate::error::{Error, Result};
use crate::model::{BitPair, GraphDiagonalState};
use crate::noise::{memory_decohere, NoiseModel};

/// Below this the post-selected branch is treated as impossible.
pub const MIN_SUCCESS_PROB: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurifyStepResult {
    /// Post-selected state on success.
    pub state: GraphDiagonalState,
    pub success_prob: f64,
}

impl PurifyStepResult {
    pub fn new_shift(&self) -> BitPair {
        self.state.shift()
    }
}

/// Which measurement outcomes are kept: `ζ2 ⊕ ξ2` equal to the shift parity
/// `m1 ⊕ m2 ⊕ n1 ⊕ n2` (success) or not (failure).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeClass {
    Success,
    Failure,
}

/// Shift of the output pair.
pub fn output_shift(a: &GraphDiagonalState, b: &GraphDiagonalState) -> BitPair {
    let (m, n) = (a.shift(), b.shift());
    BitPair(m.0 ^ n.0, m.0 ^ m.1)
}

/// Unnormalized output weights for one outcome class; they sum to that
/// class's probability.
pub fn dejmps_branch(
    a: &GraphDiagonalState,
    b: &GraphDiagonalState,
    model: &NoiseModel,
    class: OutcomeClass,
) -> [f64; 4] {
    let (p, eta) = (model.p, model.eta);
    let agree = eta * eta + (1.0 - eta) * (1.0 - eta);
    let flip = 2.0 * eta * (1.0 - eta);
    let weights = match class {
        OutcomeClass::Success => [agree, flip],
        OutcomeClass::Failure => [flip, agree],
    };
    let lam = a.coeffs();
    let mu = b.coeffs();
    let idx = |k1: usize, k2: usize| 2 * k1 + k2;
    let white = (1.0 - p * p) / 8.0;

    let mut out = [0.0; 4];
    for i1 in 0..2 {
        for i2 in 0..2 {
            let mut acc = 0.0;
            for (flag, w) in weights.iter().enumerate() {
                for k1 in 0..2 {
                    acc += w * lam[idx(k1, k1 ^ i2)] * mu[idx(k1 ^ i1, k1 ^ i1 ^ i2 ^ flag)];
                }
            }
            out[idx(i1, i2)] = white + p * p * acc;
        }
    }
    out
}

fn post_select(weights: [f64; 4], shift: BitPair) -> Result<PurifyStepResult> {
    let norm: f64 = weights.iter().sum();
    if !(norm >= MIN_SUCCESS_PROB) {
        return Err(Error::Degenerate { norm });
    }
    Ok(PurifyStepResult {
        state: GraphDiagonalState::normalized(weights, shift),
        success_prob: norm,
    })
}

/// One DEJMPS step with perfect gates and measurements.
pub fn dejmps_perfect(a: &GraphDiagonalState, b: &GraphDiagonalState) -> Result<PurifyStepResult> {
    let lam = a.coeffs();
    let mu = b.coeffs();
    let weights = [
        lam[0] * mu[0] + lam[3] * mu[3],
        lam[1] * mu[1] + lam[2] * mu[2],
        lam[0] * mu[3] + lam[3] * mu[0],
        lam[1] * mu[2] + lam[2] * mu[1],
    ];
    post_select(weights, output_shift(a, b))
}

/// One DEJMPS step with noisy two-qubit gates (`p`) and measurements (`eta`).
pub fn dejmps_noisy(
    a: &GraphDiagonalState,
    b: &GraphDiagonalState,
    model: &NoiseModel,
) -> Result<PurifyStepResult> {
    post_select(dejmps_branch(a, b, model, OutcomeClass::Success), output_shift(a, b))
}

/// Regular purification round: both inputs are copies of `state`. The
/// surviving pair then waits `wait` seconds for the outcome signal.
pub fn regular_round(state: &GraphDiagonalState, wait: f64, model: &NoiseModel) -> Result<PurifyStepResult> {
    let step = dejmps_noisy(state, state, model)?;
    Ok(PurifyStepResult {
        state: memory_decohere(&step.state, wait, model)?,
        success_prob: step.success_prob,
    })
}

/// Which pairs pick up memory noise while a pumping step waits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PumpDecoherence {
    /// The fresh pair is consumed on arrival; only the stored pair waits.
    #[default]
    StoredOnly,
    /// The fresh pair also sits in memory for the full wait.
    Both,
}

/// Entanglement pumping: purify `stored` with a fresh copy of `elementary` in
/// every step. After each step the stored pair waits `wait_per_step`.
pub fn pump(
    stored: &GraphDiagonalState,
    elementary: &GraphDiagonalState,
    steps: usize,
    wait_per_step: f64,
    model: &NoiseModel,
) -> Result<Vec<PurifyStepResult>> {
    pump_with(stored, elementary, steps, wait_per_step, model, PumpDecoherence::StoredOnly)
}

pub fn pump_with(
    stored: &GraphDiagonalState,
    elementary: &GraphDiagonalState,
    steps: usize,
    wait_per_step: f64,
    model: &NoiseModel,
    mode: PumpDecoherence,
) -> Result<Vec<PurifyStepResult>> {
    if steps == 0 {
        return Err(Error::domain("pumping needs at least one step"));
    }
    let fresh = match mode {
        PumpDecoherence::StoredOnly => *elementary,
        PumpDecoherence::Both => memory_decohere(elementary, wait_per_step, model)?,
    };
    let mut current = *stored;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let step = dejmps_noisy(&current, &fresh, model)?;
        current = memory_decohere(&step.state, wait_per_step, model)?;
        out.push(PurifyStepResult {
            state: current,
            success_prob: step.success_prob,
        });
    }
    Ok(out)
}
