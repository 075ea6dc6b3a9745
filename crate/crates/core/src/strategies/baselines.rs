//! Coverage greedy (GC) and the coverage-then-halving baseline (APC).

use super::{argmax, Decision, Strategy, StrategyError, StrategyState};
use crate::bayes::Bayes;
use crate::topology::{LogicalView, PathId};

fn posterior_scores(bayes: &Bayes, view: &LogicalView) -> Result<Vec<f64>, StrategyError> {
    let ctx = bayes.context(view)?;
    (0..view.universe()).map(|v| Ok(ctx.node_failure(v)?)).collect()
}

/// Untested path adding the most nodes not yet touched by any probe.
fn coverage_pick(view: &LogicalView) -> Option<(PathId, f64)> {
    let paths = view.paths();
    let best = argmax(
        paths
            .ids()
            .filter(|&id| !view.is_tested(id))
            .map(|id| (id, paths[id].set.difference_len(view.touched()) as f64)),
    )?;
    (best.1 > 0.0).then_some(best)
}

/// Probes the path that adds the most uncovered nodes; stops once no path
/// adds coverage.
#[derive(Clone, Copy, Debug, Default)]
pub struct CoverageGreedy {
    pub bayes: Bayes,
}

impl CoverageGreedy {
    pub fn new(bayes: Bayes) -> Self {
        CoverageGreedy { bayes }
    }
}

impl Strategy for CoverageGreedy {
    fn name(&self) -> &'static str {
        "gc"
    }

    fn decide(&self, state: &StrategyState) -> Result<Decision, StrategyError> {
        Ok(match coverage_pick(&state.view) {
            Some((path, score)) => Decision::Probe { path, score },
            None => Decision::Stop,
        })
    }

    fn node_scores(&self, view: &LogicalView) -> Result<Vec<f64>, StrategyError> {
        posterior_scores(&self.bayes, view)
    }
}

/// Among `(id, residual size)` candidates, the one whose size is closest to
/// half of `unclassified`; ties go to the smaller size, then the lower id.
pub fn apc_pick(unclassified: usize, candidates: &[(PathId, usize)]) -> Option<PathId> {
    candidates.iter().min_by_key(|&&(id, size)| ((2 * size).abs_diff(unclassified), size, id)).map(|&(id, _)| id)
}

/// Coverage greedy until coverage stalls, then binary-search style probes
/// over the still-eligible paths.
///
/// Eligible paths are the active actions of the view: untested, with a
/// non-empty residual, containing no failed residual (hence no known-broken
/// node) and not duplicating another candidate.
#[derive(Clone, Copy, Debug, Default)]
pub struct Apc {
    pub bayes: Bayes,
}

impl Apc {
    pub fn new(bayes: Bayes) -> Self {
        Apc { bayes }
    }
}

impl Strategy for Apc {
    fn name(&self) -> &'static str {
        "apc"
    }

    fn decide(&self, state: &StrategyState) -> Result<Decision, StrategyError> {
        let view = &state.view;
        if let Some((path, score)) = coverage_pick(view) {
            return Ok(Decision::Probe { path, score });
        }
        let known = view.working().union(view.known_broken());
        let unclassified = view.paths().covered().difference_len(&known);
        if unclassified == 0 {
            return Ok(Decision::Stop);
        }
        let candidates: Vec<(PathId, usize)> =
            view.active_actions().iter().map(|&id| (id, view.residual(id).len())).collect();
        Ok(match apc_pick(unclassified, &candidates) {
            Some(path) => Decision::Probe { path, score: view.residual(path).len() as f64 },
            None => Decision::Stop,
        })
    }

    fn node_scores(&self, view: &LogicalView) -> Result<Vec<f64>, StrategyError> {
        posterior_scores(&self.bayes, view)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodeset::NodeSet;
    use crate::strategies::{run_strategy, GroundTruth, StrategyState};
    use crate::topology::{Instance, Outcome, PathTable};
    use std::sync::Arc;

    #[test]
    fn apc_pick_examples() {
        assert_eq!(apc_pick(8, &[(0, 3), (1, 4), (2, 6)]), Some(1));
        assert_eq!(apc_pick(7, &[(0, 4), (1, 3)]), Some(1));
        assert_eq!(apc_pick(7, &[(5, 3), (1, 3)]), Some(1));
        assert_eq!(apc_pick(7, &[]), None);
    }

    #[test]
    fn gc_picks_larger_then_stops() {
        let t = Arc::new(PathTable::from_sequences(5, vec![vec![0, 1], vec![2, 3, 4]]).unwrap());
        let gc = CoverageGreedy::default();
        let s = StrategyState::new(t.clone(), None);
        assert!(matches!(gc.decide(&s).unwrap(), Decision::Probe { path: 1, .. }));
        let mut s2 = StrategyState::new(t, None);
        s2.view = s2.view.apply(0, Outcome::Working).apply(1, Outcome::Working);
        assert_eq!(gc.decide(&s2).unwrap(), Decision::Stop);
    }

    #[test]
    fn apc_halves_after_coverage() {
        // one long path covers everything; the short ones split it
        let seqs = vec![vec![0, 1, 2, 3], vec![0, 1], vec![2, 3], vec![0]];
        let graph = crate::topology::parse_edgelist("0 1\n1 2\n2 3").unwrap();
        let inst = Instance::new(graph, PathTable::from_sequences(4, seqs).unwrap());
        let truth = GroundTruth::new(NodeSet::from_indices(4, [0]));
        let trace = run_strategy(&Apc::default(), &inst, &truth, None).unwrap();
        assert_eq!(trace.probe_order(), vec![0, 1, 2, 3]);
        assert!(trace.final_view.known_broken().contains(0));
    }
}
