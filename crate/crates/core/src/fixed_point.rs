//! Purification regimes: where repeated purification under memory noise
//! increases fidelity, and where it saturates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GraphDiagonalState;
use crate::noise::{memory_decohere, NoiseModel};
use crate::protocols::TimeModel;
use crate::purification::dejmps_noisy;

pub const CONVERGENCE_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 100_000;

/// Lower end of the threshold search.
pub const BRACKET_LO: f64 = 0.26;
/// Werner start used for the upper fixed point.
pub const BRACKET_HI: f64 = 0.99;
pub const BISECTION_RESOLUTION: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub level: usize,
    /// Lowest purifiable Werner fidelity; `None` for an empty regime.
    pub min_fidelity: Option<f64>,
    /// Upper fixed point of regular purification; `None` for an empty regime.
    pub max_fidelity: Option<f64>,
    /// Upper fixed point of pumping; `None` when not requested or when
    /// pumping cannot beat the elementary fidelity.
    pub max_fidelity_pumping: Option<f64>,
    /// Memory time per purification step.
    pub wait: f64,
}

impl RegimeReport {
    pub fn is_empty(&self) -> bool {
        self.min_fidelity.is_none()
    }
}

/// Repeats `{dejmps_noisy; decohere(wait)}` until the coefficients move by
/// less than [`CONVERGENCE_TOL`]. Without `elementary` the state is purified
/// with a copy of itself, otherwise it is pumped with `elementary`.
pub fn iterate_to_fixed_point(
    initial: &GraphDiagonalState,
    elementary: Option<&GraphDiagonalState>,
    wait: f64,
    model: &NoiseModel,
) -> Result<GraphDiagonalState> {
    let mut current = *initial;
    for _ in 0..MAX_ITERATIONS {
        let partner = elementary.copied().unwrap_or(current);
        let step = dejmps_noisy(&current, &partner, model)?;
        let next = memory_decohere(&step.state, wait, model)?;
        let delta = next.max_abs_diff(&current);
        current = next;
        if delta < CONVERGENCE_TOL {
            return Ok(current);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        last: current,
    })
}

/// Whether regular purification starting from Werner `fidelity` ends above it.
pub fn is_purifiable(fidelity: f64, wait: f64, model: &NoiseModel) -> Result<bool> {
    let start = GraphDiagonalState::werner(fidelity)?;
    let limit = match iterate_to_fixed_point(&start, None, wait, model) {
        Ok(s) => s,
        Err(Error::NonConvergence { last, .. }) => last,
        Err(e) => return Err(e),
    };
    Ok(limit.fidelity() > fidelity)
}

/// Smallest purifiable fidelity in `[lo, hi]`, assuming `hi` is purifiable
/// and `lo` is not. Returns the upper end of the final bracket.
pub fn purification_threshold(lo: f64, hi: f64, wait: f64, model: &NoiseModel) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > BISECTION_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if is_purifiable(mid, wait, model)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Regime of level `level`: the memory time per step is the level's signal
/// time plus the gate time. `pump_fidelity` adds the pumping fixed point for
/// Werner elementary pairs of that fidelity.
pub fn purification_regime(
    level: usize,
    tm: &TimeModel,
    model: &NoiseModel,
    pump_fidelity: Option<f64>,
) -> Result<RegimeReport> {
    if level == 0 {
        return Err(Error::domain("levels start at 1"));
    }
    let wait = tm.signal_time(level) + tm.gate_time;
    let upper = iterate_to_fixed_point(&GraphDiagonalState::werner(BRACKET_HI)?, None, wait, model)?;

    // The attractor sits inside the regime whenever the regime exists, so a
    // start just below it is purifiable unless the regime is empty.
    let probe = upper.fidelity() - 10.0 * BISECTION_RESOLUTION;
    let nonempty = probe > BRACKET_LO && is_purifiable(probe, wait, model)?;
    let (min_fidelity, max_fidelity) = if nonempty {
        let min = purification_threshold(BRACKET_LO, probe, wait, model)?;
        (Some(min), Some(upper.fidelity()))
    } else {
        (None, None)
    };

    let max_fidelity_pumping = match pump_fidelity {
        Some(f) => {
            let elem = GraphDiagonalState::werner(f)?;
            let limit = iterate_to_fixed_point(&elem, Some(&elem), wait, model)?;
            (limit.fidelity() > f).then_some(limit.fidelity())
        }
        None => None,
    };

    Ok(RegimeReport {
        level,
        min_fidelity,
        max_fidelity,
        max_fidelity_pumping,
        wait,
    })
}
