//! Nested repeater schemes built from purification and connection.

mod blind;
mod innsbruck;
mod optimize;
mod standard;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GraphDiagonalState, WernerParams};
use crate::noise::NoiseModel;
use crate::swapping::connect_chain;

pub use blind::{blind_overhead, run_blind_topped, BlindOverhead, BlindRun};
pub use innsbruck::run_innsbruck;
pub use optimize::{optimize_strategy, optimize_strategy_with, OptimizerOptions, Strategy};
pub use standard::run_standard;

/// Classical signalling times. Level `l` spans `L^(l−1)` elementary segments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    /// Signal time over one elementary segment (s).
    pub t0: f64,
    pub segment_km: f64,
    /// Added to every memory wait (s).
    pub gate_time: f64,
}

impl TimeModel {
    pub fn new(t0: f64, segment_km: f64, gate_time: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::domain(format!("t0 = {t0} must be > 0")));
        }
        if !(gate_time >= 0.0 && gate_time.is_finite()) {
            return Err(Error::domain(format!("gate time {gate_time} must be >= 0")));
        }
        if !(segment_km > 0.0) {
            return Err(Error::domain(format!("segment length {segment_km} must be > 0")));
        }
        Ok(TimeModel { t0, segment_km, gate_time })
    }

    /// `2^(level−1) · t0`.
    pub fn signal_time(&self, level: usize) -> f64 {
        self.signal_time_branching(level, 2)
    }

    /// `L^(level−1) · t0`.
    pub fn signal_time_branching(&self, level: usize, branching: usize) -> f64 {
        (branching as f64).powi(level as i32 - 1) * self.t0
    }

    pub fn distance_km(&self, level: usize, branching: usize) -> f64 {
        (branching as f64).powi(level as i32 - 1) * self.segment_km
    }
}

impl Default for TimeModel {
    fn default() -> Self {
        TimeModel {
            t0: 0.333e-4,
            segment_km: 10.0,
            gate_time: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    #[default]
    Standard,
    Innsbruck,
    BlindTopped,
}

/// Runner used below the blind levels of a blind-topped scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseProtocol {
    #[default]
    Standard,
    Innsbruck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub levels: usize,
    /// `M_l` for `l = 1..=levels`.
    pub steps_per_level: Vec<usize>,
    pub initial: WernerParams,
    /// Topmost levels run without waiting for signals (blind-topped only).
    pub blind_levels: usize,
    pub blind_base: BaseProtocol,
    /// Pairs connected per level.
    pub branching: usize,
    /// Replaces the computed blind-level success probability.
    pub blind_p_suc: Option<f64>,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, steps_per_level: Vec<usize>, initial_fidelity: f64) -> Result<Self> {
        let spec = ProtocolSpec {
            kind,
            levels: steps_per_level.len(),
            steps_per_level,
            initial: WernerParams::from_fidelity(initial_fidelity)?,
            blind_levels: 0,
            blind_base: BaseProtocol::Standard,
            branching: 2,
            blind_p_suc: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `levels` levels with `steps` purification steps each.
    pub fn uniform(kind: ProtocolKind, levels: usize, steps: usize, initial_fidelity: f64) -> Result<Self> {
        Self::new(kind, vec![steps; levels], initial_fidelity)
    }

    pub fn with_blind(mut self, blind_levels: usize, base: BaseProtocol) -> Result<Self> {
        self.kind = ProtocolKind::BlindTopped;
        self.blind_levels = blind_levels;
        self.blind_base = base;
        self.validate()?;
        Ok(self)
    }

    pub fn with_branching(mut self, branching: usize) -> Result<Self> {
        self.branching = branching;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::domain("a protocol needs at least one level"));
        }
        if self.steps_per_level.len() != self.levels {
            return Err(Error::domain(format!(
                "{} step counts given for {} levels",
                self.steps_per_level.len(),
                self.levels
            )));
        }
        if self.branching < 2 {
            return Err(Error::domain(format!("branching {} must be >= 2", self.branching)));
        }
        if self.blind_levels > self.levels {
            return Err(Error::domain(format!(
                "{} blind levels exceed the {} levels",
                self.blind_levels, self.levels
            )));
        }
        if let Some(p) = self.blind_p_suc {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::domain(format!("blind success probability {p} outside (0, 1]")));
            }
        }
        Ok(())
    }

    fn expect_kind(&self, kind: ProtocolKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::domain(format!("expected a {kind:?} spec, got {:?}", self.kind)));
        }
        Ok(())
    }
}

/// Outcome of one repeater level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub fidelity: f64,
    pub state: GraphDiagonalState,
    /// Average number of elementary pairs consumed per elementary segment
    /// to deliver one pair of this level.
    pub resources: f64,
    /// Time until a pair of this level is available (s).
    pub elapsed: f64,
    pub step_success_probs: Vec<f64>,
    /// Fidelity of the pair entering purification at this level.
    pub input_fidelity: f64,
}

impl LevelReport {
    pub fn coeffs(&self) -> [f64; 4] {
        self.state.coeffs()
    }

    /// False when purification did not help or the pair carries no
    /// entanglement.
    pub fn within_regime(&self) -> bool {
        let helped = self.step_success_probs.is_empty() || self.fidelity > self.input_fidelity;
        helped && self.fidelity > 0.25
    }
}

/// Pair delivered to the next level: `branching` copies connected in a row.
pub(crate) fn connect_copies(
    s: &GraphDiagonalState,
    branching: usize,
    model: &NoiseModel,
) -> Result<GraphDiagonalState> {
    Ok(connect_chain(&vec![*s; branching], model)?.state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_times() {
        let tm = TimeModel::default();
        assert_eq!(tm.signal_time(1), tm.t0);
        assert_eq!(tm.signal_time(4), 8.0 * tm.t0);
        assert_eq!(tm.signal_time_branching(3, 3), 9.0 * tm.t0);
        assert_eq!(tm.distance_km(3, 2), 40.0);
        assert!(TimeModel::new(0.0, 10.0, 0.0).is_err());
        assert!(TimeModel::new(1e-4, 10.0, -1.0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ProtocolSpec::new(ProtocolKind::Standard, vec![], 0.8).is_err());
        assert!(ProtocolSpec::new(ProtocolKind::Standard, vec![3], 1.2).is_err());
        let s = ProtocolSpec::uniform(ProtocolKind::Standard, 3, 2, 0.8).unwrap();
        assert!(s.clone().with_branching(1).is_err());
        assert!(s.clone().with_blind(4, BaseProtocol::Standard).is_err());
        let b = s.with_blind(2, BaseProtocol::Innsbruck).unwrap();
        assert_eq!(b.kind, ProtocolKind::BlindTopped);
    }
}
