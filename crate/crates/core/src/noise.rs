//! Transmission channel and memory decoherence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BitPair, GraphDiagonalState, NORM_TOL};

/// Gate reliability `p`, measurement reliability `eta` and inverse coherence
/// time `kappa` (1/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
    pub eta: f64,
    pub kappa: f64,
    /// How many halves of a pair sit in memory while it waits.
    #[serde(default)]
    pub memory: MemorySides,
}

/// Whether memory noise hits both qubits of a stored pair (factor `q²`) or
/// only one (factor `q`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemorySides {
    #[default]
    Both,
    One,
}

impl NoiseModel {
    pub fn new(p: f64, eta: f64, kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("gate reliability p = {p} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain(format!(
                "measurement reliability eta = {eta} outside [0, 1]"
            )));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::domain(format!("kappa = {kappa} must be finite and >= 0")));
        }
        Ok(NoiseModel {
            p,
            eta,
            kappa,
            memory: MemorySides::Both,
        })
    }

    /// Perfect gates, perfect measurements, perfect memory.
    pub fn perfect() -> Self {
        NoiseModel {
            p: 1.0,
            eta: 1.0,
            kappa: 0.0,
            memory: MemorySides::Both,
        }
    }

    /// `p = eta = 1 - error_rate` with coherence time `1/kappa`.
    pub fn symmetric(error_rate: f64, coherence_time: f64) -> Result<Self> {
        let kappa = if coherence_time.is_infinite() { 0.0 } else { 1.0 / coherence_time };
        Self::new(1.0 - error_rate, 1.0 - error_rate, kappa)
    }

    pub fn with_memory(mut self, memory: MemorySides) -> Self {
        self.memory = memory;
        self
    }

    /// Factor multiplying every coefficient after waiting `t` seconds:
    /// `q²` (both halves) or `q` (one half), with `q = exp(-κ t)`.
    pub fn memory_factor(&self, t: f64) -> f64 {
        let q = (-self.kappa * t).exp();
        match self.memory {
            MemorySides::Both => q * q,
            MemorySides::One => q,
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            p: 0.99,
            eta: 0.99,
            kappa: 1.0,
            memory: MemorySides::Both,
        }
    }
}

/// Pauli-diagonal single-qubit channel `ρ ↦ Σ_i p_i σ_i ρ σ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    probs: [f64; 4],
}

impl PauliChannel {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|&x| !(0.0..=1.0 + NORM_TOL).contains(&x)) {
            return Err(Error::domain(format!("invalid Pauli probabilities {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("Pauli probabilities sum to {sum}")));
        }
        Ok(PauliChannel { probs: probs.map(|x| x / sum) })
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    /// State obtained by sending one half of `|00⟩_G` through the channel:
    /// `σ0 → |00⟩, σx → |10⟩, σy → |11⟩, σz → |01⟩`.
    pub fn transmit_half(&self) -> GraphDiagonalState {
        let [p0, p1, p2, p3] = self.probs;
        GraphDiagonalState::normalized([p0, p3, p1, p2], BitPair::ZERO)
    }
}

/// Depolarizing memory: every coefficient `λ ↦ fλ + (1 − f)/4` with `f` the
/// memory factor of `model` for a wait of `t` seconds.
pub fn memory_decohere(s: &GraphDiagonalState, t: f64, model: &NoiseModel) -> Result<GraphDiagonalState> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("waiting time {t} must be >= 0")));
    }
    Ok(decohere_with_factor(s, model.memory_factor(t)))
}

pub(crate) fn decohere_with_factor(s: &GraphDiagonalState, factor: f64) -> GraphDiagonalState {
    if factor == 1.0 {
        return *s;
    }
    let white = (1.0 - factor) / 4.0;
    GraphDiagonalState::normalized(s.coeffs().map(|c| factor * c + white), s.shift())
}
