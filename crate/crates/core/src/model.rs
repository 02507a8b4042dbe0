//! Graph-diagonal pair states.
//!
//! A two-qubit state diagonal in the graph Bell basis is stored as four weights
//! `(λ00, λ01, λ10, λ11)` together with a basis shift `(m1, m2)`: the weight
//! `coeffs[k]` belongs to the basis vector `|k1 ⊕ m1, k2 ⊕ m2⟩_G`. Shifts are
//! bookkeeping for the local `σz` corrections that the protocols never apply.
//!
//! Coefficient index convention throughout the crate: `index = 2·k1 + k2`.

use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on normalization and on the `[0, 1]` range of every weight.
pub const NORM_TOL: f64 = 1e-12;

/// An ordered pair of bits. Used for basis shifts and measurement outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitPair(pub bool, pub bool);

impl BitPair {
    pub const ZERO: BitPair = BitPair(false, false);

    /// All four bit pairs in index order `00, 01, 10, 11`.
    pub const ALL: [BitPair; 4] = [
        BitPair(false, false),
        BitPair(false, true),
        BitPair(true, false),
        BitPair(true, true),
    ];

    pub fn new(b1: bool, b2: bool) -> Self {
        BitPair(b1, b2)
    }

    /// Builds a pair from two integers that must each be 0 or 1.
    pub fn from_bits(b1: u8, b2: u8) -> Result<Self> {
        match (b1, b2) {
            (0 | 1, 0 | 1) => Ok(BitPair(b1 == 1, b2 == 1)),
            _ => Err(Error::domain(format!("bits must be 0 or 1, got ({b1}, {b2})"))),
        }
    }

    pub fn from_index(index: usize) -> Self {
        BitPair(index & 2 != 0, index & 1 != 0)
    }

    pub fn index(self) -> usize {
        2 * usize::from(self.0) + usize::from(self.1)
    }

    /// Parity `b1 ⊕ b2`.
    pub fn parity(self) -> bool {
        self.0 ^ self.1
    }
}

impl BitXor for BitPair {
    type Output = BitPair;

    fn bitxor(self, rhs: BitPair) -> BitPair {
        BitPair(self.0 ^ rhs.0, self.1 ^ rhs.1)
    }
}

impl fmt::Display for BitPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", u8::from(self.0), u8::from(self.1))
    }
}

/// Werner parameterization: `ρ = x |00⟩⟨00|_G + (1 − x)/4 · 1`, fidelity `F = (3x + 1)/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    x: f64,
}

impl WernerParams {
    pub fn from_x(x: f64) -> Result<Self> {
        if !(-1.0 / 3.0 - NORM_TOL..=1.0 + NORM_TOL).contains(&x) {
            return Err(Error::domain(format!("Werner parameter x = {x} outside [-1/3, 1]")));
        }
        Ok(WernerParams { x: x.clamp(-1.0 / 3.0, 1.0) })
    }

    pub fn from_fidelity(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::domain(format!("fidelity {fidelity} outside [0, 1]")));
        }
        Self::from_x((4.0 * fidelity - 1.0) / 3.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn fidelity(&self) -> f64 {
        (3.0 * self.x + 1.0) / 4.0
    }

    pub fn state(&self) -> GraphDiagonalState {
        let off = (1.0 - self.x) / 4.0;
        GraphDiagonalState::normalized([self.x + off, off, off, off], BitPair::ZERO)
    }
}

/// A two-qubit state diagonal in the (shifted) graph Bell basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDiagonalState {
    coeffs: [f64; 4],
    shift: BitPair,
}

impl GraphDiagonalState {
    /// Validates the weights. Deviations from normalization up to [`NORM_TOL`]
    /// are renormalized away; anything larger is rejected.
    pub fn new(coeffs: [f64; 4], shift: BitPair) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain(format!("non-finite coefficient in {coeffs:?}")));
        }
        if coeffs.iter().any(|&c| !(-NORM_TOL..=1.0 + NORM_TOL).contains(&c)) {
            return Err(Error::domain(format!("coefficient outside [0, 1] in {coeffs:?}")));
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("coefficients sum to {sum}, not 1")));
        }
        Ok(Self::normalized(coeffs, shift))
    }

    /// Clamps tiny negative round-off and divides by the sum. Only for weights
    /// produced by maps that preserve normalization analytically.
    pub(crate) fn normalized(coeffs: [f64; 4], shift: BitPair) -> Self {
        let clamped = coeffs.map(|c| c.max(0.0));
        let sum: f64 = clamped.iter().sum();
        let coeffs = if (sum - 1.0).abs() <= 4.0 * f64::EPSILON {
            clamped
        } else {
            clamped.map(|c| c / sum)
        };
        GraphDiagonalState { coeffs, shift }
    }

    /// Werner state of fidelity `F ∈ (1/4, 1]`.
    pub fn werner(fidelity: f64) -> Result<Self> {
        if !(fidelity > 0.25 && fidelity <= 1.0) {
            return Err(Error::domain(format!(
                "Werner fidelity {fidelity} outside (1/4, 1]"
            )));
        }
        Ok(WernerParams::from_fidelity(fidelity)?.state())
    }

    pub fn perfect() -> Self {
        GraphDiagonalState {
            coeffs: [1.0, 0.0, 0.0, 0.0],
            shift: BitPair::ZERO,
        }
    }

    pub fn maximally_mixed() -> Self {
        GraphDiagonalState {
            coeffs: [0.25; 4],
            shift: BitPair::ZERO,
        }
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.coeffs
    }

    pub fn coeff(&self, k: BitPair) -> f64 {
        self.coeffs[k.index()]
    }

    pub fn shift(&self) -> BitPair {
        self.shift
    }

    /// λ00 relative to the tracked shift.
    pub fn fidelity(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn apply_shift(&self, d: BitPair) -> Self {
        GraphDiagonalState {
            coeffs: self.coeffs,
            shift: self.shift ^ d,
        }
    }

    /// Same state, relabelled so the shift is zero.
    pub fn with_shift_resolved(&self) -> Self {
        GraphDiagonalState {
            coeffs: self.coeffs_in_unshifted_basis(),
            shift: BitPair::ZERO,
        }
    }

    /// Weight of each unshifted basis vector `|k1, k2⟩_G`, in index order.
    pub fn coeffs_in_unshifted_basis(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for k in BitPair::ALL {
            out[(k ^ self.shift).index()] = self.coeffs[k.index()];
        }
        out
    }

    /// Largest absolute coefficient difference, ignoring shifts.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Werner parameter `x` implied by the fidelity.
    pub fn werner_x(&self) -> f64 {
        (4.0 * self.fidelity() - 1.0) / 3.0
    }
}

impl fmt::Display for GraphDiagonalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.coeffs;
        write!(f, "[{a:.6}, {b:.6}, {c:.6}, {d:.6}] shift {}", self.shift)
    }
}
