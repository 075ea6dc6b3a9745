//! Exact expectimax over probe outcomes, and expectimax evaluation of a
//! given policy.

use std::collections::HashMap;

use super::{argmax, Decision, Strategy, StrategyError, StrategyState, ZERO_UTILITY};
use crate::bayes::Bayes;
use crate::topology::{LogicalView, Outcome, PathId};
use crate::utility::{empirical_alpha_step, f1_set, realized_utility, utility_vector};

/// Largest path count the expectimax accepts.
pub const DP_MAX_PATHS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpResult {
    /// Optimal expected cumulative utility within the horizon.
    pub value: f64,
    /// Optimal first probe, `None` if stopping is optimal.
    pub first_action: Option<PathId>,
    /// Largest number of probes along any positive-probability branch of
    /// the optimal policy.
    pub depth: usize,
}

type Key = (u32, u32, usize);

struct Solver<'a> {
    bayes: &'a Bayes,
    memo: HashMap<Key, DpResult>,
}

fn masks(view: &LogicalView, outcomes: u32) -> (u32, u32) {
    let tested = view.paths().ids().filter(|&id| view.is_tested(id)).fold(0u32, |m, id| m | 1 << id);
    (tested, outcomes & tested)
}

impl Solver<'_> {
    fn solve(&mut self, view: &LogicalView, outcomes: u32, n: usize) -> Result<DpResult, StrategyError> {
        let stop = DpResult { value: 0.0, first_action: None, depth: 0 };
        if n == 0 || view.active_actions().is_empty() {
            return Ok(stop);
        }
        let (tested, outcomes) = masks(view, outcomes);
        if let Some(hit) = self.memo.get(&(tested, outcomes, n)) {
            return Ok(*hit);
        }
        let ctx = self.bayes.context(view)?;
        let mut scored = Vec::new();
        let mut depths = HashMap::new();
        for &a in view.active_actions() {
            let pw = ctx.path_working(a)?;
            let size = view.residual(a).len();
            let f1 = f1_set(a, view).len();
            let mut value = 0.0;
            let mut depth = 1;
            if pw > 0.0 {
                let next = self.solve(&view.apply(a, Outcome::Working), outcomes | 1 << a, n - 1)?;
                value += pw * (realized_utility(size, f1, Outcome::Working) + next.value);
                depth = depth.max(1 + next.depth);
            }
            if pw < 1.0 {
                let next = self.solve(&view.apply(a, Outcome::Failed), outcomes, n - 1)?;
                value += (1.0 - pw) * (realized_utility(size, f1, Outcome::Failed) + next.value);
                depth = depth.max(1 + next.depth);
            }
            scored.push((a, value));
            depths.insert(a, depth);
        }
        let result = match argmax(scored) {
            Some((a, value)) if value >= ZERO_UTILITY => DpResult { value, first_action: Some(a), depth: depths[&a] },
            _ => stop,
        };
        self.memo.insert((tested, outcomes, n), result);
        Ok(result)
    }
}

/// Optimal expected cumulative utility from `view` with at most `horizon`
/// further probes.
pub fn exact_dp_policy(view: &LogicalView, bayes: &Bayes, horizon: usize) -> Result<DpResult, StrategyError> {
    let m = view.paths().len();
    if m > DP_MAX_PATHS {
        return Err(StrategyError::TooManyPaths { got: m, max: DP_MAX_PATHS });
    }
    let outcomes = view
        .paths()
        .ids()
        .filter(|&id| view.is_tested(id) && !view.failed().iter().any(|f| f.path == id))
        .fold(0u32, |acc, id| acc | 1 << id);
    Solver { bayes, memo: HashMap::new() }.solve(view, outcomes, horizon)
}

/// Plays the optimal policy one step at a time.
#[derive(Clone, Copy, Debug, Default)]
pub struct DpStrategy {
    pub bayes: Bayes,
}

impl DpStrategy {
    pub fn new(bayes: Bayes) -> Self {
        DpStrategy { bayes }
    }
}

impl Strategy for DpStrategy {
    fn name(&self) -> &'static str {
        "dp"
    }

    fn decide(&self, state: &StrategyState) -> Result<Decision, StrategyError> {
        let horizon = state.budget.map_or(state.view.paths().len(), |k| k.saturating_sub(state.step));
        let r = exact_dp_policy(&state.view, &self.bayes, horizon)?;
        Ok(match r.first_action {
            Some(path) => Decision::Probe { path, score: r.value },
            None => Decision::Stop,
        })
    }

    fn node_scores(&self, view: &LogicalView) -> Result<Vec<f64>, StrategyError> {
        let ctx = self.bayes.context(view)?;
        (0..view.universe()).map(|v| Ok(ctx.node_failure(v)?)).collect()
    }
}

/// Expected cumulative utility of a policy, with the smallest utility ratio
/// between nested states seen anywhere in its decision tree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyValue {
    pub value: f64,
    pub alpha: f64,
}

/// Expectimax value of `strategy` from `view` over at most `horizon` probes.
pub fn evaluate_policy(
    strategy: &dyn Strategy,
    bayes: &Bayes,
    view: &LogicalView,
    horizon: usize,
) -> Result<PolicyValue, StrategyError> {
    struct Walk<'a> {
        strategy: &'a dyn Strategy,
        bayes: &'a Bayes,
        ancestors: Vec<(Vec<f64>, Vec<bool>)>,
        alpha: f64,
    }

    impl Walk<'_> {
        fn go(&mut self, view: &LogicalView, n: usize) -> Result<f64, StrategyError> {
            let ctx = self.bayes.context(view)?;
            let here =
                (utility_vector(view, &ctx)?, view.paths().ids().map(|id| view.is_tested(id)).collect::<Vec<_>>());
            self.alpha = self.alpha.min(empirical_alpha_step(&self.ancestors, &here));
            if n == 0 {
                return Ok(0.0);
            }
            let Decision::Probe { path: a, .. } = self.strategy.decide(&StrategyState::from_view(view.clone()))? else {
                return Ok(0.0);
            };
            let pw = ctx.path_working(a)?;
            let size = view.residual(a).len();
            let f1 = f1_set(a, view).len();
            self.ancestors.push(here);
            let mut value = 0.0;
            if pw > 0.0 {
                value += pw
                    * (realized_utility(size, f1, Outcome::Working)
                        + self.go(&view.apply(a, Outcome::Working), n - 1)?);
            }
            if pw < 1.0 {
                value += (1.0 - pw)
                    * (realized_utility(size, f1, Outcome::Failed)
                        + self.go(&view.apply(a, Outcome::Failed), n - 1)?);
            }
            self.ancestors.pop();
            Ok(value)
        }
    }

    let mut walk = Walk { strategy, bayes, ancestors: Vec::new(), alpha: 1.0 };
    let value = walk.go(view, horizon)?;
    Ok(PolicyValue { value, alpha: walk.alpha })
}
