//! Entanglement swapping (connection) of graph-diagonal pairs.

use crate::error::{Error, Result};
use crate::model::{BitPair, GraphDiagonalState};
use crate::noise::NoiseModel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectResult {
    pub state: GraphDiagonalState,
}

impl ConnectResult {
    pub fn new_shift(&self) -> BitPair {
        self.state.shift()
    }
}

fn connected_shift(a: &GraphDiagonalState, b: &GraphDiagonalState, outcomes: BitPair) -> BitPair {
    a.shift() ^ b.shift() ^ outcomes
}

/// `Σ_{k} λ[k ⊕ i ⊕ flip] μ[k]` for every output index `i`.
fn convolve(lam: &[f64; 4], mu: &[f64; 4], flip: usize) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (0..4).map(|k| lam[k ^ i ^ flip] * mu[k]).sum();
    }
    out
}

/// Bell measurement on the inner qubits with perfect operations.
pub fn connect_perfect(a: &GraphDiagonalState, b: &GraphDiagonalState, outcomes: BitPair) -> ConnectResult {
    let coeffs = convolve(&a.coeffs(), &b.coeffs(), 0);
    ConnectResult {
        state: GraphDiagonalState::normalized(coeffs, connected_shift(a, b, outcomes)),
    }
}

/// Bell measurement with one noisy two-qubit gate (`p`) and two noisy
/// single-qubit measurements (`eta`). A flipped outcome on the first (second)
/// measured qubit flips the first (second) output index.
pub fn connect_noisy(
    a: &GraphDiagonalState,
    b: &GraphDiagonalState,
    outcomes: BitPair,
    model: &NoiseModel,
) -> ConnectResult {
    let (p, eta) = (model.p, model.eta);
    let lam = a.coeffs();
    let mu = b.coeffs();
    let mut coeffs = [(1.0 - p) / 4.0; 4];
    for flip in BitPair::ALL {
        let weight = match (flip.0, flip.1) {
            (false, false) => eta * eta,
            (true, true) => (1.0 - eta) * (1.0 - eta),
            _ => eta * (1.0 - eta),
        };
        if weight == 0.0 {
            continue;
        }
        let term = convolve(&lam, &mu, flip.index());
        for (c, t) in coeffs.iter_mut().zip(term) {
            *c += p * weight * t;
        }
    }
    ConnectResult {
        state: GraphDiagonalState::normalized(coeffs, connected_shift(a, b, outcomes)),
    }
}

/// Left fold of [`connect_noisy`] over a chain of pairs, all outcomes `(0, 0)`.
pub fn connect_chain(pairs: &[GraphDiagonalState], model: &NoiseModel) -> Result<ConnectResult> {
    let (first, rest) = match pairs {
        [first, rest @ ..] if !rest.is_empty() => (first, rest),
        _ => {
            return Err(Error::domain(format!(
                "a chain needs at least 2 pairs, got {}",
                pairs.len()
            )))
        }
    };
    let state = rest
        .iter()
        .fold(*first, |acc, next| connect_noisy(&acc, next, BitPair::ZERO, model).state);
    Ok(ConnectResult { state })
}
