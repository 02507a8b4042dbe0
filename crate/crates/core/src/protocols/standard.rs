use crate::error::Result;
use crate::model::GraphDiagonalState;
use crate::noise::NoiseModel;
use crate::purification::regular_round;

use super::{connect_copies, LevelReport, ProtocolKind, ProtocolSpec, TimeModel};

/// Regular purification with `M_l` rounds per level. Every round waits for
/// the level's signal time. Each round doubles the resources and divides them
/// by its success probability.
pub fn run_standard(spec: &ProtocolSpec, tm: &TimeModel, model: &NoiseModel) -> Result<Vec<LevelReport>> {
    spec.expect_kind(ProtocolKind::Standard)?;
    let levels = RegularLevels {
        branching: spec.branching,
        model,
        post_selected: true,
    };
    let wait = |l: usize| tm.signal_time_branching(l, spec.branching) + tm.gate_time;
    levels.run(None, spec.initial.state(), &spec.steps_per_level, wait)
}

pub(crate) struct RegularLevels<'a> {
    pub branching: usize,
    pub model: &'a NoiseModel,
    /// Divide resources by the success probabilities. Blind levels leave
    /// this to the overhead factor.
    pub post_selected: bool,
}

impl RegularLevels<'_> {
    /// Continues after `below`, or starts at level 1 from `initial`.
    pub fn run(
        &self,
        below: Option<&LevelReport>,
        initial: GraphDiagonalState,
        steps: &[usize],
        wait: impl Fn(usize) -> f64,
    ) -> Result<Vec<LevelReport>> {
        let mut reports: Vec<LevelReport> = Vec::with_capacity(steps.len());
        let first_level = below.map_or(1, |r| r.level + 1);
        for (offset, &m) in steps.iter().enumerate() {
            let level = first_level + offset;
            let (input, base_resources, base_elapsed) = match reports.last().or(below) {
                Some(r) => (
                    connect_copies(&r.state, self.branching, self.model)?,
                    r.resources,
                    r.elapsed,
                ),
                None => (initial, 1.0, 0.0),
            };

            let w = wait(level);
            let mut state = input;
            let mut probs = Vec::with_capacity(m);
            for _ in 0..m {
                let r = regular_round(&state, w, self.model)?;
                probs.push(r.success_prob);
                state = r.state;
            }
            let mut resources = base_resources * 2f64.powi(m as i32);
            if self.post_selected {
                resources /= probs.iter().product::<f64>();
            }
            reports.push(LevelReport {
                level,
                fidelity: state.fidelity(),
                state,
                resources,
                elapsed: base_elapsed + m as f64 * w,
                step_success_probs: probs,
                input_fidelity: input.fidelity(),
            });
        }
        Ok(reports)
    }
}
