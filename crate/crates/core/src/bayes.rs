//! Exact posteriors under independent node failures.
//!
//! Working observations only prune nodes, so the evidence reduces to "every
//! failed residual holds at least one broken node" plus "every node in W
//! works". The first event is evaluated by inclusion-exclusion over the
//! failed residuals:
//!
//! `P(all hit) = Σ_{S ⊆ F} (-1)^|S| · q^|∪S|`,  with `q = 1 - p`.
//!
//! Residuals that contain another residual are redundant and dropped first,
//! and residuals that share no nodes split into independent factors. The
//! exponential cost is paid per factor and capped.

use thiserror::Error;

use crate::nodeset::NodeSet;
use crate::topology::{LogicalView, NodeId, Outcome, PathId};

pub use crate::topology::is_contradictory;

/// Largest number of interacting failed residuals evaluated exactly.
pub const DEFAULT_CAPACITY: usize = 25;

const SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BayesError {
    #[error("exact inference over {residuals} interacting failed paths exceeds the cap of {cap} (cost grows as 2^n)")]
    Capacity { residuals: usize, cap: usize },
    #[error("observations are contradictory (zero joint probability)")]
    Contradictory,
    #[error("prior must lie in [0, 1], got {0}")]
    InvalidPrior(f64),
}

/// Uniform, independent node failure prior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prior {
    p: f64,
}

impl Prior {
    pub fn new(p: f64) -> Result<Self, BayesError> {
        if (0.0..=1.0).contains(&p) {
            Ok(Prior { p })
        } else {
            Err(BayesError::InvalidPrior(p))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

impl Default for Prior {
    fn default() -> Self {
        Prior { p: 0.1 }
    }
}

/// Prior probability that a path with `size` unpruned nodes works.
pub fn prior_path_working(size: usize, prior: Prior) -> f64 {
    prior.q().powi(size as i32)
}

fn check_prob(x: f64) -> f64 {
    assert!((-SLACK..=1.0 + SLACK).contains(&x), "probability {x} outside [0, 1] beyond float slack");
    x.clamp(0.0, 1.0)
}

/// Keeps only inclusion-minimal sets, one copy each. Returns `None` if some
/// set is empty.
fn minimal_sets(mut sets: Vec<NodeSet>) -> Option<Vec<NodeSet>> {
    sets.sort_by_key(|s| s.len());
    let mut kept: Vec<NodeSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if s.is_empty() {
            return None;
        }
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    Some(kept)
}

/// Groups sets into connected components of the "shares a node" relation.
fn components(sets: Vec<NodeSet>) -> Vec<Vec<NodeSet>> {
    let mut groups: Vec<(NodeSet, Vec<NodeSet>)> = Vec::new();
    for s in sets {
        let mut merged = (s.clone(), vec![s]);
        let mut i = 0;
        while i < groups.len() {
            if groups[i].0.intersects(&merged.0) {
                let (u, members) = groups.swap_remove(i);
                merged.0.union_with(&u);
                merged.1.extend(members);
            } else {
                i += 1;
            }
        }
        groups.push(merged);
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

/// Inclusion–exclusion over one connected component.
fn component_prob(sets: &[NodeSet], qpow: &[f64]) -> f64 {
    // compact the component onto local indices so unions are short word loops
    let mut universe = NodeSet::empty(sets[0].universe());
    for s in sets {
        universe.union_with(s);
    }
    let local: Vec<usize> = {
        let mut map = vec![usize::MAX; universe.universe()];
        for (i, v) in universe.iter().enumerate() {
            map[v] = i;
        }
        map
    };
    let width = universe.len();
    let words = width.div_ceil(64);
    let compact: Vec<Vec<u64>> = sets
        .iter()
        .map(|s| {
            let mut w = vec![0u64; words];
            for v in s.iter() {
                let i = local[v];
                w[i / 64] |= 1 << (i % 64);
            }
            w
        })
        .collect();

    fn dfs(i: usize, sets: &[Vec<u64>], acc: &mut [Vec<u64>], depth: usize, odd: bool, qpow: &[f64]) -> f64 {
        if i == sets.len() {
            let size: usize = acc[depth].iter().map(|w| w.count_ones() as usize).sum();
            return if odd { -qpow[size] } else { qpow[size] };
        }
        let skip = dfs(i + 1, sets, acc, depth, odd, qpow);
        let (lo, hi) = acc.split_at_mut(depth + 1);
        for (dst, (a, b)) in hi[0].iter_mut().zip(lo[depth].iter().zip(&sets[i])) {
            *dst = a | b;
        }
        skip + dfs(i + 1, sets, acc, depth + 1, !odd, qpow)
    }

    let mut acc = vec![vec![0u64; words]; sets.len() + 1];
    dfs(0, &compact, &mut acc, 0, false, qpow)
}

/// Probability that each set holds at least one failed node.
fn prob_all_hit(sets: Vec<NodeSet>, qpow: &[f64], cap: usize) -> Result<f64, BayesError> {
    let Some(minimal) = minimal_sets(sets) else {
        return Ok(0.0);
    };
    let mut total = 1.0;
    for comp in components(minimal) {
        if comp.len() > cap {
            return Err(BayesError::Capacity { residuals: comp.len(), cap });
        }
        total *= component_prob(&comp, qpow);
    }
    Ok(total)
}

/// Exact inference engine: a prior plus a capacity cap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bayes {
    pub prior: Prior,
    pub capacity: usize,
}

impl Default for Bayes {
    fn default() -> Self {
        Bayes::new(Prior::default())
    }
}

impl Bayes {
    pub fn new(prior: Prior) -> Self {
        Bayes { prior, capacity: DEFAULT_CAPACITY }
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    fn qpow(&self, n: usize) -> Vec<f64> {
        let q = self.prior.q();
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = 1.0;
        for _ in 0..=n {
            out.push(acc);
            acc *= q;
        }
        out
    }

    /// `P(O_T ∧ conditions)`: every failed residual holds a broken node, W
    /// works, and each listed node is in the given state.
    pub fn joint_observation_prob(
        &self,
        view: &LogicalView,
        conditions: &[(NodeId, Outcome)],
    ) -> Result<f64, BayesError> {
        let (p, q) = (self.prior.p(), self.prior.q());
        let qpow = self.qpow(view.universe());
        let mut factor = qpow[view.working().len()];
        let mut sets: Vec<NodeSet> = view.failed().iter().map(|f| f.residual.clone()).collect();
        let mut fixed_working = NodeSet::empty(view.universe());
        let mut fixed_failed = NodeSet::empty(view.universe());
        for &(v, state) in conditions {
            let in_w = view.working().contains(v);
            match state {
                Outcome::Working => {
                    if fixed_failed.contains(v) {
                        return Ok(0.0);
                    }
                    if !in_w && fixed_working.insert(v) {
                        factor *= q;
                    }
                }
                Outcome::Failed => {
                    if in_w || fixed_working.contains(v) {
                        return Ok(0.0);
                    }
                    if fixed_failed.insert(v) {
                        factor *= p;
                    }
                }
            }
        }
        sets.retain(|s| !s.intersects(&fixed_failed));
        for s in &mut sets {
            s.difference_with(&fixed_working);
        }
        Ok(check_prob(factor * prob_all_hit(sets, &qpow, self.capacity)?))
    }

    /// Precomputes the evidence once so many posteriors can share it.
    pub fn context<'v>(&self, view: &'v LogicalView) -> Result<Posterior<'v>, BayesError> {
        if view.is_contradictory() {
            return Err(BayesError::Contradictory);
        }
        let qpow = self.qpow(view.universe());
        let sets: Vec<NodeSet> = view.failed().iter().map(|f| f.residual.clone()).collect();
        let minimal = minimal_sets(sets).ok_or(BayesError::Contradictory)?;
        let mut comps = Vec::new();
        for members in components(minimal) {
            if members.len() > self.capacity {
                return Err(BayesError::Capacity { residuals: members.len(), cap: self.capacity });
            }
            let mut union = NodeSet::empty(view.universe());
            for m in &members {
                union.union_with(m);
            }
            let prob = component_prob(&members, &qpow);
            if prob <= 0.0 {
                return Err(BayesError::Contradictory);
            }
            comps.push(Component { union, members, prob });
        }
        Ok(Posterior { view, engine: *self, qpow, comps })
    }

    /// `P(Z_path | O_T)`.
    pub fn path_posterior_working(&self, path: PathId, view: &LogicalView) -> Result<f64, BayesError> {
        self.context(view)?.path_working(path)
    }

    /// `P(S̄_node | O_T)`.
    pub fn node_posterior_failure(&self, node: NodeId, view: &LogicalView) -> Result<f64, BayesError> {
        self.context(view)?.node_failure(node)
    }

    /// Posteriors for every path and node.
    pub fn report(&self, view: &LogicalView) -> Result<PosteriorReport, BayesError> {
        let ctx = self.context(view)?;
        Ok(PosteriorReport {
            path_working: view.paths().ids().map(|id| ctx.path_working(id)).collect::<Result<_, _>>()?,
            node_failure: (0..view.universe()).map(|v| ctx.node_failure(v)).collect::<Result<_, _>>()?,
            joint_prob: self.joint_observation_prob(view, &[])?,
        })
    }
}

#[derive(Clone, Debug)]
struct Component {
    union: NodeSet,
    members: Vec<NodeSet>,
    prob: f64,
}

/// Evidence of one view, factored into independent components.
#[derive(Clone, Debug)]
pub struct Posterior<'v> {
    view: &'v LogicalView,
    engine: Bayes,
    qpow: Vec<f64>,
    comps: Vec<Component>,
}

impl Posterior<'_> {
    /// `P(all nodes of residual(path) work | O_T)`.
    pub fn path_working(&self, path: PathId) -> Result<f64, BayesError> {
        let r = self.view.residual(path);
        let mut ratio = self.qpow[r.len()];
        for c in self.comps.iter().filter(|c| c.union.intersects(&r)) {
            let reduced: Vec<NodeSet> = c.members.iter().map(|m| m.difference(&r)).collect();
            ratio *= prob_all_hit(reduced, &self.qpow, self.engine.capacity)? / c.prob;
            if ratio == 0.0 {
                break;
            }
        }
        Ok(check_prob(ratio))
    }

    /// `P(node broken | O_T)`.
    pub fn node_failure(&self, node: NodeId) -> Result<f64, BayesError> {
        if self.view.working().contains(node) {
            return Ok(0.0);
        }
        if self.view.known_broken().contains(node) {
            return Ok(1.0);
        }
        let p = self.engine.prior.p();
        let Some(c) = self.comps.iter().find(|c| c.union.contains(node)) else {
            return Ok(p);
        };
        let rest: Vec<NodeSet> = c.members.iter().filter(|m| !m.contains(node)).cloned().collect();
        Ok(check_prob(p * prob_all_hit(rest, &self.qpow, self.engine.capacity)? / c.prob))
    }
}

/// Posteriors of one view.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorReport {
    /// `P(Z_i | O_T)` indexed by path id.
    pub path_working: Vec<f64>,
    /// `P(S̄_v | O_T)` indexed by node id.
    pub node_failure: Vec<f64>,
    /// `P(O_T)`.
    pub joint_prob: f64,
}
