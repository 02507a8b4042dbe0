use crate::error::Result;
use crate::model::GraphDiagonalState;
use crate::noise::{memory_decohere, NoiseModel};
use crate::purification::dejmps_noisy;

use super::{connect_copies, LevelReport, ProtocolKind, ProtocolSpec, TimeModel};

/// Entanglement pumping with `M_l` steps per level.
///
/// Waiting model: a fresh level-`l` pair takes `T(l)` to build, with
/// `T(1) = t0`. The stored pair waits `T(l)` before each pumping step and the
/// level signal time `s_l` after it. Each step is expected to be attempted
/// `1/p_i` times, so a purified level-`l` pair is ready after
///
/// ```text
/// E(l) = T(l) + Σ_i (T(l) + s_l) / p_i
/// ```
///
/// and the connected pair one level up after `T(l+1) = E(l) + s_l`.
pub fn run_innsbruck(spec: &ProtocolSpec, tm: &TimeModel, model: &NoiseModel) -> Result<Vec<LevelReport>> {
    spec.expect_kind(ProtocolKind::Innsbruck)?;
    run_pumping_levels(&spec.steps_per_level, spec.initial.state(), spec.branching, tm, model)
}

pub(crate) fn run_pumping_levels(
    steps: &[usize],
    initial: GraphDiagonalState,
    branching: usize,
    tm: &TimeModel,
    model: &NoiseModel,
) -> Result<Vec<LevelReport>> {
    let mut elementary = initial;
    let mut fresh_time = tm.t0;
    let mut fresh_resources = 1.0;
    let mut reports = Vec::with_capacity(steps.len());
    for (i, &m) in steps.iter().enumerate() {
        let level = i + 1;
        let signal = tm.signal_time_branching(level, branching) + tm.gate_time;
        let mut stored = elementary;
        let mut probs = Vec::with_capacity(m);
        for _ in 0..m {
            let aged = memory_decohere(&stored, fresh_time, model)?;
            let step = dejmps_noisy(&aged, &elementary, model)?;
            probs.push(step.success_prob);
            stored = memory_decohere(&step.state, signal, model)?;
        }
        let attempts: f64 = probs.iter().map(|p| 1.0 / p).sum();
        let elapsed = fresh_time + (fresh_time + signal) * attempts;
        let resources = fresh_resources * (1.0 + attempts);
        reports.push(LevelReport {
            level,
            fidelity: stored.fidelity(),
            state: stored,
            resources,
            elapsed,
            step_success_probs: probs,
            input_fidelity: elementary.fidelity(),
        });
        if level < steps.len() {
            elementary = connect_copies(&stored, branching, model)?;
            fresh_time = elapsed + signal;
            fresh_resources = resources;
        }
    }
    Ok(reports)
}
