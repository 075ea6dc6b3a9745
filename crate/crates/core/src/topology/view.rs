//! Observations and the pruned logical view derived from them.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::paths::PathTable;
use super::{NodeId, PathId, TopologyError};
use crate::nodeset::NodeSet;

/// Result of probing one path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Working,
    Failed,
}

impl Outcome {
    pub fn is_working(self) -> bool {
        self == Outcome::Working
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Working => "working",
            Outcome::Failed => "failed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observation {
    pub path: PathId,
    pub outcome: Outcome,
}

impl Observation {
    pub fn new(path: PathId, outcome: Outcome) -> Self {
        Observation { path, outcome }
    }
}

/// Ordered probe record of a static run. Each path appears at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationSet {
    entries: Vec<Observation>,
}

impl ObservationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, obs: Observation) -> Result<(), TopologyError> {
        if self.contains(obs.path) {
            return Err(TopologyError::AlreadyTested(obs.path));
        }
        self.entries.push(obs);
        Ok(())
    }

    pub fn contains(&self, path: PathId) -> bool {
        self.entries.iter().any(|o| o.path == path)
    }

    pub fn entries(&self) -> &[Observation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Tested path ids in probe order.
    pub fn tested(&self) -> impl Iterator<Item = PathId> + '_ {
        self.entries.iter().map(|o| o.path)
    }

    /// Failed tested path ids in probe order.
    pub fn failed(&self) -> impl Iterator<Item = PathId> + '_ {
        self.entries.iter().filter(|o| !o.outcome.is_working()).map(|o| o.path)
    }

    /// Untested path ids of `table`, increasing.
    pub fn remaining<'a>(&'a self, table: &'a PathTable) -> impl Iterator<Item = PathId> + 'a {
        table.ids().filter(|&id| !self.contains(id))
    }
}

/// A failed observation with its pruned node set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailedResidual {
    pub path: PathId,
    pub residual: NodeSet,
}

/// Pruned state after a set of observations.
///
/// Working outcomes prune their nodes from every failed path; a failed path
/// pruned down to one node pins that node as broken. The view is a value:
/// [`LogicalView::apply`] returns a new view and leaves `self` untouched.
///
/// A path may be applied more than once. Static runs never do this, while
/// dynamic windows re-probe paths and rely on the resulting clash being
/// reported through [`LogicalView::is_contradictory`].
#[derive(Clone, PartialEq, Eq)]
pub struct LogicalView {
    paths: Arc<PathTable>,
    tested: Vec<bool>,
    touched: NodeSet,
    working: NodeSet,
    failed: Vec<FailedResidual>,
    known_broken: NodeSet,
    active: Vec<PathId>,
    contradictory: bool,
}

impl LogicalView {
    pub fn new(paths: Arc<PathTable>) -> Self {
        let n = paths.universe();
        let mut view = LogicalView {
            tested: vec![false; paths.len()],
            touched: NodeSet::empty(n),
            working: NodeSet::empty(n),
            failed: Vec::new(),
            known_broken: NodeSet::empty(n),
            active: Vec::new(),
            contradictory: false,
            paths,
        };
        view.refresh();
        view
    }

    /// Folds `observations` into a fresh view.
    pub fn from_observations(paths: Arc<PathTable>, observations: &[Observation]) -> Self {
        let mut view = LogicalView::new(paths);
        for o in observations {
            view.absorb(*o);
        }
        view.refresh();
        view
    }

    /// The view after additionally observing `outcome` on `path`.
    pub fn apply(&self, path: PathId, outcome: Outcome) -> LogicalView {
        let mut next = self.clone();
        next.absorb(Observation::new(path, outcome));
        next.refresh();
        next
    }

    fn absorb(&mut self, obs: Observation) {
        let set = &self.paths[obs.path].set;
        self.tested[obs.path] = true;
        self.touched.union_with(set);
        match obs.outcome {
            Outcome::Working => {
                self.working.union_with(set);
                for f in &mut self.failed {
                    f.residual.difference_with(set);
                }
            }
            Outcome::Failed => {
                self.failed.push(FailedResidual { path: obs.path, residual: set.difference(&self.working) })
            }
        }
    }

    fn refresh(&mut self) {
        self.contradictory = self.failed.iter().any(|f| f.residual.is_empty());
        self.known_broken = NodeSet::empty(self.paths.universe());
        for f in &self.failed {
            if f.residual.len() == 1 {
                self.known_broken.union_with(&f.residual);
            }
        }
        let mut seen: HashSet<NodeSet> = HashSet::new();
        self.active = self
            .paths
            .ids()
            .filter(|&id| !self.tested[id])
            .filter(|&id| {
                let r = self.residual(id);
                !r.is_empty() && !self.implied_failed(&r) && seen.insert(r)
            })
            .collect();
    }

    fn implied_failed(&self, residual: &NodeSet) -> bool {
        self.failed.iter().any(|f| f.residual.is_subset(residual))
    }

    pub fn paths(&self) -> &Arc<PathTable> {
        &self.paths
    }

    /// Node set of `path` minus the known-working nodes.
    pub fn residual(&self, path: PathId) -> NodeSet {
        self.paths[path].set.difference(&self.working)
    }

    /// True when the outcome of `path` already follows from the view: its
    /// residual is empty (it must work) or contains a failed residual (it
    /// must fail).
    pub fn is_implied(&self, path: PathId) -> bool {
        let r = self.residual(path);
        r.is_empty() || self.implied_failed(&r)
    }

    pub fn working(&self) -> &NodeSet {
        &self.working
    }

    pub fn known_broken(&self) -> &NodeSet {
        &self.known_broken
    }

    /// Nodes traversed by at least one tested path.
    pub fn touched(&self) -> &NodeSet {
        &self.touched
    }

    /// Failed observations with their current residuals, in probe order.
    pub fn failed(&self) -> &[FailedResidual] {
        &self.failed
    }

    /// Untested, non-implied paths with distinct residuals (lowest id kept).
    pub fn active_actions(&self) -> &[PathId] {
        &self.active
    }

    pub fn is_tested(&self, path: PathId) -> bool {
        self.tested[path]
    }

    pub fn is_contradictory(&self) -> bool {
        self.contradictory
    }

    pub fn universe(&self) -> usize {
        self.paths.universe()
    }

    /// Whether every node in `nodes` is either known working or known broken.
    pub fn all_known(&self, nodes: &NodeSet) -> bool {
        nodes.difference_len(&self.working.union(&self.known_broken)) == 0
    }

    /// Certain state of `v`, if any.
    pub fn certain_state(&self, v: NodeId) -> Option<Outcome> {
        if self.working.contains(v) {
            Some(Outcome::Working)
        } else if self.known_broken.contains(v) {
            Some(Outcome::Failed)
        } else {
            None
        }
    }
}

impl fmt::Debug for LogicalView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogicalView")
            .field("working", &self.working)
            .field("failed", &self.failed)
            .field("known_broken", &self.known_broken)
            .field("active", &self.active)
            .field("contradictory", &self.contradictory)
            .finish()
    }
}

/// Whether replaying `entries` over `paths` yields a contradiction: a failed
/// path whose nodes all turned out working.
pub fn is_contradictory(entries: &[Observation], paths: &Arc<PathTable>) -> bool {
    LogicalView::from_observations(paths.clone(), entries).is_contradictory()
}
