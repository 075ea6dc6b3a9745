//! Probe utilities: realized and expected information gain, the
//! identification-by-exclusion bonus, cumulative utility, and the constants
//! of the greedy approximation bound.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bayes::{BayesError, Posterior};
use crate::centrality::{Centralities, F1Rule};
use crate::topology::{LogicalView, NodeId, Outcome, PathId};

/// Failed tested paths that would pin a new broken node if `candidate`
/// worked: their residual minus the candidate's nodes has exactly one node.
///
/// Paths pinning the same node count once (lowest id kept), and nodes that
/// are already known broken are skipped, so the set size is exactly the
/// number of newly identified nodes.
pub fn f1_set(candidate: PathId, view: &LogicalView) -> Vec<PathId> {
    let cand = &view.paths()[candidate].set;
    let mut by_node: BTreeMap<NodeId, PathId> = BTreeMap::new();
    for f in view.failed() {
        if f.residual.difference_len(cand) != 1 {
            continue;
        }
        let node = f.residual.difference(cand).first().expect("one node");
        if !view.known_broken().contains(node) {
            let slot = by_node.entry(node).or_insert(f.path);
            *slot = (*slot).min(f.path);
        }
    }
    let mut ids: Vec<PathId> = by_node.into_values().collect();
    ids.sort_unstable();
    ids
}

/// Failed tested paths whose current residual is a single node.
pub fn f1_current(view: &LogicalView) -> Vec<PathId> {
    view.failed().iter().filter(|f| f.residual.len() == 1).map(|f| f.path).collect()
}

/// `λ(a | Z)`: node states learned from one probe outcome.
pub fn realized_utility(residual_size: usize, f1_count: usize, outcome: Outcome) -> f64 {
    match outcome {
        Outcome::Working => (residual_size + f1_count) as f64,
        Outcome::Failed if residual_size == 1 => 1.0,
        Outcome::Failed => 0.0,
    }
}

/// `U(a | O_T)` under exact posteriors. Paths with an implied outcome score 0.
pub fn expected_utility_exact(
    candidate: PathId,
    view: &LogicalView,
    posterior: &Posterior<'_>,
) -> Result<f64, BayesError> {
    if view.is_implied(candidate) {
        return Ok(0.0);
    }
    let size = view.residual(candidate).len();
    let f1 = f1_set(candidate, view).len();
    let pw = posterior.path_working(candidate)?;
    Ok(realized_utility(size, f1, Outcome::Working) * pw + realized_utility(size, f1, Outcome::Failed) * (1.0 - pw))
}

/// `U_c(a | O_T)` with centrality-based working scores. Paths with an
/// implied outcome score 0.
pub fn expected_utility_centrality(candidate: PathId, view: &LogicalView, cent: &Centralities, rule: F1Rule) -> f64 {
    if view.is_implied(candidate) {
        return 0.0;
    }
    let size = view.residual(candidate).len();
    let f1 = match rule {
        F1Rule::Current => f1_current(view).len(),
        F1Rule::Hypothetical => f1_set(candidate, view).len(),
    };
    let pw = cent.path_working(candidate, view);
    realized_utility(size, f1, Outcome::Working) * pw + realized_utility(size, f1, Outcome::Failed) * (1.0 - pw)
}

/// Distinct node states the observations have settled: known-working nodes
/// plus known-broken nodes. Nodes pinned by exclusion are among the latter.
pub fn cumulative_utility(view: &LogicalView) -> f64 {
    (view.working().len() + view.known_broken().len()) as f64
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("bound needs 0 < p < 1, got {0}")]
    DegenerateProbability(f64),
}

/// Inputs of the approximation-ratio bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    pub p: f64,
    pub path_len_max: u32,
    pub deg_max: u32,
    pub candidate_len: u32,
    pub f1_count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaBound {
    pub delta_min: f64,
    pub delta_max: f64,
    pub alpha: f64,
}

/// Smallest positive-probability utility, largest utility with empty F1,
/// and their ratio clamped to `(0, 1]`.
pub fn alpha_bound(inputs: BoundInputs) -> Result<AlphaBound, BoundError> {
    let p = inputs.p;
    if !(p > 0.0 && p < 1.0) {
        return Err(BoundError::DegenerateProbability(p));
    }
    let q = 1.0 - p;
    let factor = 1.0 - p / (1.0 + q * (p.powi(inputs.deg_max as i32) - 1.0));
    let delta_min = (inputs.candidate_len + inputs.f1_count) as f64 * factor.powi(inputs.path_len_max as i32);
    let n_star = (-1.0 / q.ln() + 0.5).floor().max(1.0);
    let delta_max = n_star * q.powf(n_star);
    let alpha = (delta_min / delta_max).min(1.0);
    Ok(AlphaBound { delta_min, delta_max, alpha })
}

/// Utility of a path of `path_len` nodes, each crossed by `deg` failed
/// two-node paths whose other node is shared with another failed path.
pub fn delta3(p: f64, deg: u32, path_len: u32) -> f64 {
    let q = 1.0 - p;
    let denom = 1.0 + q * ((2.0 * p - p * p).powi(deg as i32) - 1.0);
    path_len as f64 * (1.0 - p / denom).powi(path_len as i32)
}

/// `Δ_min / Δ_3` for a path of `path_len` nodes, `deg` failed neighbours per
/// node and `|F| = path_len · deg`.
pub fn delta_ratio(p: f64, deg: u32, path_len: u32) -> f64 {
    let f = path_len * deg;
    let q = 1.0 - p;
    let a = 1.0 - p / (1.0 + q * (p.powi(deg as i32) - 1.0));
    let dmin = (path_len + f) as f64 * a.powi(path_len as i32);
    dmin / delta3(p, deg, path_len)
}

/// Expected utility of every path under `view` (0 for tested paths).
pub fn utility_vector(view: &LogicalView, posterior: &Posterior<'_>) -> Result<Vec<f64>, BayesError> {
    view.paths()
        .ids()
        .map(|id| if view.is_tested(id) { Ok(0.0) } else { expected_utility_exact(id, view, posterior) })
        .collect()
}

/// Smallest `U(a|T) / U(a|T')` of one later state `T'` against each earlier
/// state `T`, over actions untested in `T'` with positive utility in both.
/// States are `(utility vector, tested flags)` pairs as produced by
/// [`utility_vector`]. Returns 1 when no pair qualifies.
pub fn empirical_alpha_step(earlier: &[(Vec<f64>, Vec<bool>)], later: &(Vec<f64>, Vec<bool>)) -> f64 {
    let (u_late, tested) = later;
    let mut alpha: f64 = 1.0;
    for (u_early, _) in earlier {
        for a in 0..u_late.len() {
            if !tested[a] && u_early[a] > 1e-12 && u_late[a] > 1e-12 {
                alpha = alpha.min(u_early[a] / u_late[a]);
            }
        }
    }
    alpha
}

/// [`empirical_alpha_step`] folded over every ordered pair of a probe
/// sequence of states.
pub fn empirical_alpha(states: &[(Vec<f64>, Vec<bool>)]) -> f64 {
    (1..states.len()).map(|j| empirical_alpha_step(&states[..j], &states[j])).fold(1.0, f64::min)
}
