//! Probing strategies behind one interface, the static run loop, the exact
//! expectimax oracle and the sliding-window dynamic runner.

mod baselines;
mod dp;
mod dynamic;
mod greedy;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::bayes::{Bayes, BayesError};
use crate::centrality::CentralityParams;
use crate::nodeset::NodeSet;
use crate::topology::{Instance, LogicalView, ObservationSet, Outcome, PathId, PathTable};

pub use baselines::{apc_pick, Apc, CoverageGreedy};
pub use dp::{evaluate_policy, exact_dp_policy, DpResult, DpStrategy, PolicyValue, DP_MAX_PATHS};
pub use dynamic::{rollback, run_dynamic, run_dynamic_with_truth, DynamicConfig, DynamicStep, DynamicTrace};
pub use greedy::{FaceGreedy, PopGreedy};

/// Utilities below this are treated as zero.
pub const ZERO_UTILITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error("exact DP supports at most {max} paths, instance has {got}")]
    TooManyPaths { got: usize, max: usize },
    #[error("invalid dynamic configuration: {0}")]
    InvalidDynamic(String),
}

/// The true set of broken nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub failed: NodeSet,
}

impl GroundTruth {
    pub fn new(failed: NodeSet) -> Self {
        GroundTruth { failed }
    }

    pub fn none(universe: usize) -> Self {
        GroundTruth { failed: NodeSet::empty(universe) }
    }

    /// A path fails iff it traverses a broken node.
    pub fn outcome(&self, paths: &PathTable, path: PathId) -> Outcome {
        if paths[path].set.intersects(&self.failed) {
            Outcome::Failed
        } else {
            Outcome::Working
        }
    }
}

/// What a strategy sees when choosing the next probe.
#[derive(Clone, Debug)]
pub struct StrategyState {
    pub view: LogicalView,
    pub observations: ObservationSet,
    pub step: usize,
    pub budget: Option<usize>,
}

impl StrategyState {
    pub fn new(paths: Arc<PathTable>, budget: Option<usize>) -> Self {
        StrategyState { view: LogicalView::new(paths), observations: ObservationSet::new(), step: 0, budget }
    }

    /// Wraps an existing view, e.g. one rebuilt from a dynamic window.
    pub fn from_view(view: LogicalView) -> Self {
        StrategyState { view, observations: ObservationSet::new(), step: 0, budget: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decision {
    Probe { path: PathId, score: f64 },
    Stop,
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Next path to probe, or stop.
    fn decide(&self, state: &StrategyState) -> Result<Decision, StrategyError>;

    /// Failure score of every node under `view`, used for classification
    /// and ranking.
    fn node_scores(&self, view: &LogicalView) -> Result<Vec<f64>, StrategyError>;
}

/// Stable strategy identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Pop,
    Face,
    Gc,
    Apc,
    Dp,
    Dpop,
    Dface,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Pop => "pop",
            StrategyKind::Face => "face",
            StrategyKind::Gc => "gc",
            StrategyKind::Apc => "apc",
            StrategyKind::Dp => "dp",
            StrategyKind::Dpop => "dpop",
            StrategyKind::Dface => "dface",
        }
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, StrategyKind::Dpop | StrategyKind::Dface)
    }

    /// Builds the static strategy. Dynamic kinds map to their static step
    /// logic.
    pub fn build(self, model: &Model) -> Box<dyn Strategy> {
        match self {
            StrategyKind::Pop | StrategyKind::Dpop => Box::new(PopGreedy::new(model.bayes)),
            StrategyKind::Face | StrategyKind::Dface => Box::new(FaceGreedy::new(model.centrality)),
            StrategyKind::Gc => Box::new(CoverageGreedy::new(model.bayes)),
            StrategyKind::Apc => Box::new(Apc::new(model.bayes)),
            StrategyKind::Dp => Box::new(DpStrategy::new(model.bayes)),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "pop" => StrategyKind::Pop,
            "face" => StrategyKind::Face,
            "gc" => StrategyKind::Gc,
            "apc" => StrategyKind::Apc,
            "dp" => StrategyKind::Dp,
            "dpop" => StrategyKind::Dpop,
            "dface" => StrategyKind::Dface,
            other => return Err(format!("unknown strategy `{other}`")),
        })
    }
}

/// Inference settings shared by all strategies.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Model {
    pub bayes: Bayes,
    pub centrality: CentralityParams,
}

/// Highest score, ties to the lowest id. Scores within a relative `1e-12`
/// count as ties. Input must come in increasing id order.
pub fn argmax(scored: impl IntoIterator<Item = (PathId, f64)>) -> Option<(PathId, f64)> {
    let mut best: Option<(PathId, f64)> = None;
    for (id, v) in scored {
        match best {
            None => best = Some((id, v)),
            Some((_, b)) if v > b + 1e-12 * b.abs().max(1.0) => best = Some((id, v)),
            _ => {}
        }
    }
    best
}

/// Why a static run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    AllKnown,
    NoUsefulPaths,
    BudgetExhausted,
    PathsExhausted,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::AllKnown => "allKnown",
            Termination::NoUsefulPaths => "noUsefulPaths",
            Termination::BudgetExhausted => "budgetExhausted",
            Termination::PathsExhausted => "pathsExhausted",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One probe of a static run.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub path: PathId,
    pub outcome: Outcome,
    /// The strategy's score for the chosen path when it was picked.
    pub score: f64,
    /// Node failure scores after the probe.
    pub node_scores: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyTrace {
    pub strategy: &'static str,
    pub steps: Vec<StepRecord>,
    pub termination: Termination,
    pub final_view: LogicalView,
}

impl StrategyTrace {
    pub fn probe_order(&self) -> Vec<PathId> {
        self.steps.iter().map(|s| s.path).collect()
    }

    pub fn probes(&self) -> usize {
        self.steps.len()
    }
}

/// Probes until every covered node is known, every path is tested, the
/// budget runs out, or the strategy stops, checked in that order.
pub fn run_strategy(
    strategy: &dyn Strategy,
    instance: &Instance,
    truth: &GroundTruth,
    budget: Option<usize>,
) -> Result<StrategyTrace, StrategyError> {
    let covered = instance.paths.covered();
    let mut state = StrategyState::new(instance.paths.clone(), budget);
    let mut steps = Vec::new();
    let termination = loop {
        if state.view.all_known(&covered) {
            break Termination::AllKnown;
        }
        if state.observations.len() == instance.paths.len() {
            break Termination::PathsExhausted;
        }
        if budget.is_some_and(|k| state.step >= k) {
            break Termination::BudgetExhausted;
        }
        let Decision::Probe { path, score } = strategy.decide(&state)? else {
            break Termination::NoUsefulPaths;
        };
        let outcome = truth.outcome(&instance.paths, path);
        state.view = state.view.apply(path, outcome);
        state
            .observations
            .push(crate::topology::Observation::new(path, outcome))
            .expect("strategies only pick untested paths");
        state.step += 1;
        steps.push(StepRecord { path, outcome, score, node_scores: strategy.node_scores(&state.view)? });
    };
    Ok(StrategyTrace { strategy: strategy.name(), steps, termination, final_view: state.view })
}

/// The view reached by probing every path.
pub fn all_paths_view(instance: &Instance, truth: &GroundTruth) -> LogicalView {
    instance.paths.ids().fold(instance.view(), |v, id| v.apply(id, truth.outcome(&instance.paths, id)))
}
