use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;

use super::innsbruck::run_pumping_levels;
use super::standard::RegularLevels;
use super::{BaseProtocol, LevelReport, ProtocolKind, ProtocolSpec, TimeModel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindOverhead {
    /// `p_suc^(L^(m−1) · M^m)`.
    pub p_tot: f64,
    /// `1 / p_tot`.
    pub overhead: f64,
    /// `L^m`.
    pub distance_gain: f64,
}

/// Resource overhead of running the top `m` levels blind with `M` steps per
/// level, branching `L` and per-step success probability `p_suc`.
pub fn blind_overhead(steps: usize, branching: usize, levels: usize, p_suc: f64) -> Result<BlindOverhead> {
    if steps == 0 || branching < 2 || levels == 0 {
        return Err(Error::domain(format!(
            "blind overhead needs M >= 1, L >= 2, m >= 1 (got {steps}, {branching}, {levels})"
        )));
    }
    let l = branching as f64;
    let exponent = l.powi(levels as i32 - 1) * (steps as f64).powi(levels as i32);
    overhead_from_exponent(exponent, p_suc, l.powi(levels as i32))
}

fn overhead_from_exponent(exponent: f64, p_suc: f64, distance_gain: f64) -> Result<BlindOverhead> {
    if !(p_suc > 0.0 && p_suc <= 1.0) {
        return Err(Error::domain(format!("success probability {p_suc} outside (0, 1]")));
    }
    let p_tot = p_suc.powf(exponent);
    Ok(BlindOverhead {
        p_tot,
        overhead: p_suc.powf(-exponent),
        distance_gain,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindRun {
    pub reports: Vec<LevelReport>,
    /// Per-step success probability used for the overhead: the forced value,
    /// or the geometric mean over all blind purification steps.
    pub p_suc: f64,
    pub overhead: BlindOverhead,
}

/// Lower levels run with the base protocol. The top `blind_levels` levels
/// purify regularly without waiting for signals (memory time is the gate time
/// only), and the post-selection cost is collected in the overhead factor
/// `p_suc^(−L^(m−1) · Π M_k)` rather than in the resources.
pub fn run_blind_topped(spec: &ProtocolSpec, tm: &TimeModel, model: &NoiseModel) -> Result<BlindRun> {
    spec.expect_kind(ProtocolKind::BlindTopped)?;
    let split = spec.levels - spec.blind_levels;
    let (lower, upper) = spec.steps_per_level.split_at(split);
    let base = match spec.blind_base {
        BaseProtocol::Standard => {
            let levels = RegularLevels {
                branching: spec.branching,
                model,
                post_selected: true,
            };
            let wait = |l: usize| tm.signal_time_branching(l, spec.branching) + tm.gate_time;
            levels.run(None, spec.initial.state(), lower, wait)?
        }
        BaseProtocol::Innsbruck => run_pumping_levels(lower, spec.initial.state(), spec.branching, tm, model)?,
    };

    let blind_levels = RegularLevels {
        branching: spec.branching,
        model,
        post_selected: false,
    };
    let top = blind_levels.run(base.last(), spec.initial.state(), upper, |_| tm.gate_time)?;

    let probs: Vec<f64> = top.iter().flat_map(|r| r.step_success_probs.iter().copied()).collect();
    let p_suc = match spec.blind_p_suc {
        Some(p) => p,
        None if probs.is_empty() => 1.0,
        None => (probs.iter().map(|p| p.ln()).sum::<f64>() / probs.len() as f64).exp(),
    };
    let l = spec.branching as f64;
    let m = spec.blind_levels as i32;
    let exponent = if m == 0 {
        0.0
    } else {
        l.powi(m - 1) * upper.iter().map(|&s| s as f64).product::<f64>()
    };
    let overhead = overhead_from_exponent(exponent, p_suc, l.powi(m))?;

    let mut reports = base;
    reports.extend(top);
    Ok(BlindRun {
        reports,
        p_suc,
        overhead,
    })
}
