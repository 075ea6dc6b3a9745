//! PoPGreedy (exact expected utility) and FaCeGreedy (centrality utility).

use rayon::prelude::*;

use super::{argmax, Decision, Strategy, StrategyError, StrategyState, ZERO_UTILITY};
use crate::bayes::Bayes;
use crate::centrality::{Centralities, CentralityParams};
use crate::topology::{LogicalView, PathId};
use crate::utility::{expected_utility_centrality, expected_utility_exact};

fn pick(scored: Vec<(PathId, f64)>) -> Decision {
    match argmax(scored) {
        Some((path, score)) if score >= ZERO_UTILITY => Decision::Probe { path, score },
        _ => Decision::Stop,
    }
}

/// Greedy on exact expected utility.
#[derive(Clone, Copy, Debug, Default)]
pub struct PopGreedy {
    pub bayes: Bayes,
}

impl PopGreedy {
    pub fn new(bayes: Bayes) -> Self {
        PopGreedy { bayes }
    }

    /// Expected utility of every active action, in id order.
    pub fn utilities(&self, view: &LogicalView) -> Result<Vec<(PathId, f64)>, StrategyError> {
        let ctx = self.bayes.context(view)?;
        view.active_actions().par_iter().map(|&id| Ok((id, expected_utility_exact(id, view, &ctx)?))).collect()
    }
}

impl Strategy for PopGreedy {
    fn name(&self) -> &'static str {
        "pop"
    }

    fn decide(&self, state: &StrategyState) -> Result<Decision, StrategyError> {
        Ok(pick(self.utilities(&state.view)?))
    }

    fn node_scores(&self, view: &LogicalView) -> Result<Vec<f64>, StrategyError> {
        let ctx = self.bayes.context(view)?;
        (0..view.universe()).map(|v| Ok(ctx.node_failure(v)?)).collect()
    }
}

/// Greedy on centrality-based expected utility.
#[derive(Clone, Copy, Debug, Default)]
pub struct FaceGreedy {
    pub params: CentralityParams,
}

impl FaceGreedy {
    pub fn new(params: CentralityParams) -> Self {
        FaceGreedy { params }
    }

    pub fn utilities(&self, view: &LogicalView) -> Vec<(PathId, f64)> {
        let cent = Centralities::compute(view, &self.params);
        view.active_actions()
            .iter()
            .map(|&id| (id, expected_utility_centrality(id, view, &cent, self.params.f1_rule)))
            .collect()
    }
}

impl Strategy for FaceGreedy {
    fn name(&self) -> &'static str {
        "face"
    }

    fn decide(&self, state: &StrategyState) -> Result<Decision, StrategyError> {
        Ok(pick(self.utilities(&state.view)))
    }

    fn node_scores(&self, view: &LogicalView) -> Result<Vec<f64>, StrategyError> {
        Ok(Centralities::compute(view, &self.params).values)
    }
}
