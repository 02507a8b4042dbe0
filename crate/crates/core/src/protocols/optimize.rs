use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::WernerParams;
use crate::noise::NoiseModel;

use super::innsbruck::run_pumping_levels;
use super::{LevelReport, TimeModel};

const TIE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub level_cap: usize,
    /// Largest `M_l` tried.
    pub max_steps: usize,
    pub branching: usize,
    /// Every level of an accepted strategy must reach this fidelity.
    pub min_fidelity: Option<f64>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            level_cap: 12,
            max_steps: 6,
            branching: 2,
            min_fidelity: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    /// 0 when no pumping strategy improves the elementary pairs.
    pub max_level: usize,
    pub steps: Vec<usize>,
    pub fidelity: f64,
    pub reports: Vec<LevelReport>,
}

/// [`optimize_strategy_with`] using default options and the given fidelity floor.
pub fn optimize_strategy(
    tm: &TimeModel,
    model: &NoiseModel,
    initial: WernerParams,
    min_fidelity: Option<f64>,
) -> Result<Strategy> {
    let opts = OptimizerOptions {
        min_fidelity,
        ..OptimizerOptions::default()
    };
    optimize_strategy_with(tm, model, initial, &opts)
}

/// Greedy level-by-level search over non-increasing pumping strategies.
///
/// With the best strategy `X` up to level `l`, the scheme moves to level
/// `l + 1` only if some `Y` with `M_{l+1} ≥ 1` beats `X` followed by a bare
/// connection. Fidelity ties go to fewer total steps.
pub fn optimize_strategy_with(
    tm: &TimeModel,
    model: &NoiseModel,
    initial: WernerParams,
    opts: &OptimizerOptions,
) -> Result<Strategy> {
    let evaluate = |steps: &[usize]| run_pumping_levels(steps, initial.state(), opts.branching, tm, model);
    let admissible = |reports: &[LevelReport]| match opts.min_fidelity {
        Some(f) => reports.iter().all(|r| r.fidelity >= f),
        None => true,
    };
    let best_of = |length: usize| -> Option<(Vec<usize>, Vec<LevelReport>)> {
        let candidates: Vec<Vec<usize>> = non_increasing(length, opts.max_steps)
            .into_iter()
            .filter(|s| s[length - 1] >= 1)
            .collect();
        let scored: Vec<Option<Vec<LevelReport>>> = candidates
            .par_iter()
            .map(|s| evaluate(s).ok().filter(|r| admissible(r)))
            .collect();
        let mut best: Option<(Vec<usize>, Vec<LevelReport>)> = None;
        for (s, r) in candidates.into_iter().zip(scored) {
            let Some(r) = r else { continue };
            let f = r[length - 1].fidelity;
            let better = match &best {
                None => true,
                Some((bs, br)) => {
                    let bf = br[length - 1].fidelity;
                    f > bf + TIE || ((f - bf).abs() <= TIE && total(&s) < total(bs))
                }
            };
            if better {
                best = Some((s, r));
            }
        }
        best
    };

    let empty = Strategy {
        max_level: 0,
        steps: Vec::new(),
        fidelity: initial.fidelity(),
        reports: Vec::new(),
    };
    if opts.level_cap == 0 {
        return Ok(empty);
    }
    let Some((mut steps, mut reports)) = best_of(1) else {
        return Ok(empty);
    };
    if reports[0].fidelity <= initial.fidelity() {
        return Ok(empty);
    }

    while steps.len() < opts.level_cap {
        let mut bare = steps.clone();
        bare.push(0);
        let baseline = evaluate(&bare).map(|r| r[r.len() - 1].fidelity).unwrap_or(0.0);
        match best_of(steps.len() + 1) {
            Some((s, r)) if r[r.len() - 1].fidelity > baseline => {
                steps = s;
                reports = r;
            }
            _ => break,
        }
    }
    Ok(Strategy {
        max_level: steps.len(),
        fidelity: reports[reports.len() - 1].fidelity,
        steps,
        reports,
    })
}

fn total(s: &[usize]) -> usize {
    s.iter().sum()
}

/// All non-increasing sequences of `length` values in `0..=max`.
fn non_increasing(length: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(length);
    fn rec(prefix: &mut Vec<usize>, length: usize, hi: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == length {
            out.push(prefix.clone());
            return;
        }
        for v in (0..=hi).rev() {
            prefix.push(v);
            rec(prefix, length, v, out);
            prefix.pop();
        }
    }
    rec(&mut prefix, length, max, &mut out);
    out
}
