//! Dynamic failures: node states evolve between probes and inference runs
//! on a sliding window of recent observations.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Decision, GroundTruth, Strategy, StrategyError, StrategyState};
use crate::nodeset::NodeSet;
use crate::topology::{Instance, LogicalView, Observation, Outcome, PathId, PathTable};

#[derive(Clone, Copy, Debug, PartialEq, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicConfig {
    /// Per-step probability that a working node breaks.
    pub p_wf: f64,
    /// Per-step probability that a broken node is repaired.
    pub p_fw: f64,
    /// Number of most recent observations kept.
    pub window: usize,
    /// Number of time steps.
    pub horizon: usize,
}

impl DynamicConfig {
    /// Checks ranges and ordering. Returns warnings that do not prevent a
    /// run, such as a window too short to cover the network.
    pub fn validate(&self, paths: &PathTable) -> Result<Vec<String>, StrategyError> {
        for (name, p) in [("p_wf", self.p_wf), ("p_fw", self.p_fw)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(StrategyError::InvalidDynamic(format!("{name} = {p} is not a probability")));
            }
        }
        if self.p_wf > self.p_fw {
            return Err(StrategyError::InvalidDynamic(format!(
                "p_wf = {} must not exceed p_fw = {}",
                self.p_wf, self.p_fw
            )));
        }
        if self.window == 0 {
            return Err(StrategyError::InvalidDynamic("window must be at least 1".into()));
        }
        let mut warnings = Vec::new();
        let cover = greedy_cover_size(paths);
        if self.window < cover {
            warnings.push(format!(
                "window {} is shorter than the {cover} probes needed to cover every monitored node",
                self.window
            ));
        }
        Ok(warnings)
    }
}

fn greedy_cover_size(paths: &PathTable) -> usize {
    let mut covered = NodeSet::empty(paths.universe());
    let mut used = 0;
    loop {
        let gain = paths.iter().map(|p| p.set.difference_len(&covered)).max().unwrap_or(0);
        if gain == 0 {
            return used;
        }
        let best = paths.iter().find(|p| p.set.difference_len(&covered) == gain).expect("max exists");
        covered.union_with(&best.set);
        used += 1;
    }
}

/// One time step of a dynamic run.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicStep {
    pub time: usize,
    pub path: PathId,
    pub outcome: Outcome,
    /// The strategy had nothing useful and a stale path was re-probed.
    pub refresh: bool,
    pub contradiction: bool,
    /// Observations discarded by the contradiction rollback.
    pub dropped: usize,
    pub window_len: usize,
    /// Nodes classified working after the step.
    pub working: NodeSet,
    /// Nodes classified broken after the step.
    pub broken: NodeSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicTrace {
    pub strategy: &'static str,
    pub steps: Vec<DynamicStep>,
    /// Broken nodes at each step, after that step's evolution.
    pub truth: Vec<NodeSet>,
}

/// Drops the most recent observation that makes the window inconsistent,
/// together with everything older. Scans from the newest entry backwards and
/// returns the number of entries removed.
pub fn rollback(window: &mut VecDeque<Observation>, paths: &Arc<PathTable>) -> usize {
    let mut suffix = LogicalView::new(paths.clone());
    for i in (0..window.len()).rev() {
        suffix = suffix.apply(window[i].path, window[i].outcome);
        if suffix.is_contradictory() {
            window.drain(..=i);
            return i + 1;
        }
    }
    0
}

/// Samples the truth timeline from `initial` and runs the window loop.
pub fn run_dynamic(
    strategy: &dyn Strategy,
    instance: &Instance,
    config: &DynamicConfig,
    initial: &GroundTruth,
    seed: u64,
) -> Result<DynamicTrace, StrategyError> {
    config.validate(&instance.paths)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = instance.graph.node_count();
    let mut state = initial.failed.clone();
    let mut timeline = Vec::with_capacity(config.horizon);
    for _ in 0..config.horizon {
        for v in 0..n {
            let u: f64 = rng.gen();
            if state.contains(v) {
                if u < config.p_fw {
                    state.remove(v);
                }
            } else if u < config.p_wf {
                state.insert(v);
            }
        }
        timeline.push(state.clone());
    }
    run_dynamic_with_truth(strategy, instance, config.window, &timeline)
}

/// Runs the window loop against a given truth timeline: at each step the
/// oldest observation expires if the window is full, the strategy picks a
/// probe from the window's view (or the stalest path is refreshed when it
/// stops), the outcome is appended, and a contradiction triggers
/// [`rollback`].
pub fn run_dynamic_with_truth(
    strategy: &dyn Strategy,
    instance: &Instance,
    window_len: usize,
    timeline: &[NodeSet],
) -> Result<DynamicTrace, StrategyError> {
    let paths = &instance.paths;
    let mut window: VecDeque<Observation> = VecDeque::with_capacity(window_len + 1);
    let mut last_probe: Vec<Option<usize>> = vec![None; paths.len()];
    let mut steps = Vec::with_capacity(timeline.len());
    for (time, failed) in timeline.iter().enumerate() {
        while window.len() >= window_len.max(1) {
            window.pop_front();
        }
        let entries: Vec<Observation> = window.iter().copied().collect();
        let view = LogicalView::from_observations(paths.clone(), &entries);
        let (path, refresh) = match strategy.decide(&StrategyState::from_view(view))? {
            Decision::Probe { path, .. } => (path, false),
            Decision::Stop => {
                let outside = paths
                    .ids()
                    .filter(|&id| !window.iter().any(|o| o.path == id))
                    .min_by_key(|&id| (last_probe[id].map_or(0, |t| t + 1), id));
                match outside {
                    Some(id) => (id, true),
                    None => (window.front().expect("window holds every path").path, true),
                }
            }
        };
        let outcome = GroundTruth::new(failed.clone()).outcome(paths, path);
        window.push_back(Observation::new(path, outcome));
        last_probe[path] = Some(time);
        let entries: Vec<Observation> = window.iter().copied().collect();
        let contradiction = LogicalView::from_observations(paths.clone(), &entries).is_contradictory();
        let dropped = if contradiction { rollback(&mut window, paths) } else { 0 };
        let entries: Vec<Observation> = window.iter().copied().collect();
        let after = LogicalView::from_observations(paths.clone(), &entries);
        debug_assert!(!after.is_contradictory());
        steps.push(DynamicStep {
            time,
            path,
            outcome,
            refresh,
            contradiction,
            dropped,
            window_len: window.len(),
            working: after.working().clone(),
            broken: after.known_broken().clone(),
        });
    }
    Ok(DynamicTrace { strategy: strategy.name(), steps, truth: timeline.to_vec() })
}
