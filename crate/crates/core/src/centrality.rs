//! Failure centrality: a polynomial-time surrogate for node failure
//! posteriors, and the path working score built from it.
//!
//! For a node `v` outside W and touched by some tested path, let `M_v` be the
//! failed residuals that contain `v` and `U_v` their union. Then
//!
//! * `T1 = 1` if some residual in `M_v` is `{v}`, else `0`;
//! * `P_v = |M_v| / |U_v|`;
//! * `T2 = P_v` when `P_v < 1`, and `1 - ε / P_v` otherwise;
//! * `c(v) = max(T1, T2)`.
//!
//! Nodes in W score 0 and untouched nodes score the prior `c0`.

use crate::nodeset::NodeSet;
use crate::topology::{LogicalView, NodeId, PathId};

/// Which failed paths count towards the identification-by-exclusion bonus
/// in the centrality utility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum F1Rule {
    /// Failed paths whose current residual has exactly one node.
    #[default]
    Current,
    /// Failed paths whose residual would shrink to one node if the
    /// candidate worked (the rule used by the exact utility).
    Hypothetical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralityParams {
    /// Centrality of nodes no tested path has touched.
    pub c0: f64,
    /// Saturation gap of `T2`.
    pub epsilon: f64,
    pub f1_rule: F1Rule,
}

impl Default for CentralityParams {
    fn default() -> Self {
        CentralityParams { c0: 0.1, epsilon: 0.05, f1_rule: F1Rule::Current }
    }
}

/// `ε` if `ε < 1 - q*` with `q* = (d - 1) / d`, otherwise `(1 - q*) / 2`.
/// A zero `d` leaves `ε` unchanged.
pub fn epsilon_for_union(epsilon: f64, d: usize) -> f64 {
    if d == 0 {
        return epsilon;
    }
    let gap = 1.0 / d as f64;
    if epsilon < gap {
        epsilon
    } else {
        gap / 2.0
    }
}

/// Per-node counts behind `T1` and `T2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct NodeStats {
    residuals: usize,
    union: usize,
    singleton: bool,
}

fn node_stats(view: &LogicalView, v: NodeId) -> NodeStats {
    let mut union = NodeSet::empty(view.universe());
    let mut stats = NodeStats::default();
    for f in view.failed().iter().filter(|f| f.residual.contains(v)) {
        stats.residuals += 1;
        stats.singleton |= f.residual.len() == 1;
        union.union_with(&f.residual);
    }
    stats.union = union.len();
    stats
}

/// Largest `|U_v|` over all nodes of the view.
pub fn max_union_size(view: &LogicalView) -> usize {
    view.touched().iter().filter(|&v| !view.working().contains(v)).map(|v| node_stats(view, v).union).max().unwrap_or(0)
}

/// The `ε` actually used for `view`.
pub fn validate_epsilon(params: &CentralityParams, view: &LogicalView) -> f64 {
    epsilon_for_union(params.epsilon, max_union_size(view))
}

/// `T2` as a function of the counts. `P_v ≥ 1` is decided on the integers.
pub fn t2(residuals: usize, union: usize, epsilon: f64) -> f64 {
    if union == 0 {
        return 0.0;
    }
    let pv = residuals as f64 / union as f64;
    if residuals < union {
        pv
    } else {
        1.0 - epsilon / pv
    }
}

fn score(view: &LogicalView, v: NodeId, c0: f64, epsilon: f64) -> f64 {
    if view.working().contains(v) {
        return 0.0;
    }
    if !view.touched().contains(v) {
        return c0;
    }
    let s = node_stats(view, v);
    if s.residuals == 0 {
        return c0;
    }
    let t1 = if s.singleton { 1.0 } else { 0.0 };
    f64::max(t1, t2(s.residuals, s.union, epsilon))
}

/// `c(node | O_T)`.
pub fn failure_centrality(node: NodeId, view: &LogicalView, params: &CentralityParams) -> f64 {
    score(view, node, params.c0, validate_epsilon(params, view))
}

/// Centrality of every node of a view, computed once.
#[derive(Clone, Debug, PartialEq)]
pub struct Centralities {
    pub epsilon: f64,
    pub values: Vec<f64>,
}

impl Centralities {
    pub fn compute(view: &LogicalView, params: &CentralityParams) -> Self {
        let epsilon = validate_epsilon(params, view);
        let values = (0..view.universe()).map(|v| score(view, v, params.c0, epsilon)).collect();
        Centralities { epsilon, values }
    }

    /// `∏ (1 - c(v))` over the residual of `path`.
    pub fn path_working(&self, path: PathId, view: &LogicalView) -> f64 {
        view.residual(path).iter().map(|v| 1.0 - self.values[v]).product()
    }
}

/// Centrality-based working score of `path`.
pub fn centrality_path_working(path: PathId, view: &LogicalView, params: &CentralityParams) -> f64 {
    Centralities::compute(view, params).path_working(path, view)
}
