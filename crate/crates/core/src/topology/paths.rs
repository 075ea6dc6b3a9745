//! Monitoring paths: generation from routing and explicit path fixtures.

use std::collections::HashSet;
use std::ops::Index;

use super::graph::Graph;
use super::routing::k_shortest_paths;
use super::{NodeId, PathId, TopologyError};
use crate::nodeset::NodeSet;

/// An immutable route between two monitors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitoringPath {
    pub id: PathId,
    pub src: NodeId,
    pub dst: NodeId,
    pub nodes: Vec<NodeId>,
    /// The traversed node set.
    pub set: NodeSet,
}

impl MonitoringPath {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The fixed set of probe-able paths of one instance, indexed by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathTable {
    universe: usize,
    paths: Vec<MonitoringPath>,
}

impl PathTable {
    /// Builds a table from node sequences over `0..universe`. Ids follow the
    /// input order. Repeated nodes inside a sequence are rejected.
    pub fn from_sequences(universe: usize, seqs: Vec<Vec<NodeId>>) -> Result<Self, TopologyError> {
        let mut paths = Vec::with_capacity(seqs.len());
        for (id, nodes) in seqs.into_iter().enumerate() {
            if nodes.is_empty() {
                return Err(TopologyError::InvalidPath { id, reason: "empty path".into() });
            }
            if let Some(&bad) = nodes.iter().find(|&&v| v >= universe) {
                return Err(TopologyError::NodeOutOfRange(bad));
            }
            let set = NodeSet::from_indices(universe, nodes.iter().copied());
            if set.len() != nodes.len() {
                return Err(TopologyError::InvalidPath { id, reason: "repeated node".into() });
            }
            paths.push(MonitoringPath { id, src: nodes[0], dst: *nodes.last().expect("non-empty"), nodes, set });
        }
        Ok(PathTable { universe, paths })
    }

    /// Number of nodes in the underlying graph.
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MonitoringPath> {
        self.paths.iter()
    }

    pub fn ids(&self) -> std::ops::Range<PathId> {
        0..self.paths.len()
    }

    /// Union of all path node sets.
    pub fn covered(&self) -> NodeSet {
        let mut out = NodeSet::empty(self.universe);
        for p in &self.paths {
            out.union_with(&p.set);
        }
        out
    }
}

impl Index<PathId> for PathTable {
    type Output = MonitoringPath;

    fn index(&self, id: PathId) -> &MonitoringPath {
        &self.paths[id]
    }
}

/// Result of [`generate_paths`]: the table plus monitor pairs with no route.
#[derive(Clone, Debug)]
pub struct PathGeneration {
    pub table: PathTable,
    pub skipped: Vec<(NodeId, NodeId)>,
}

/// Builds monitoring paths for every ordered pair of distinct monitors.
///
/// Each pair contributes its lexicographically smallest shortest path plus
/// up to `per_pair - 1` loop-free alternates in k-shortest order. Repeated
/// node sequences are dropped; ids follow generation order (pairs in
/// increasing `(src, dst)` order).
pub fn generate_paths(graph: &Graph, monitors: &[NodeId], per_pair: usize) -> Result<PathGeneration, TopologyError> {
    let mut ms: Vec<NodeId> = monitors.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.len() < 2 {
        return Err(TopologyError::TooFewMonitors(ms.len()));
    }
    if let Some(&bad) = ms.iter().find(|&&m| m >= graph.node_count()) {
        return Err(TopologyError::NodeOutOfRange(bad));
    }
    let mut seen: HashSet<Vec<NodeId>> = HashSet::new();
    let mut seqs = Vec::new();
    let mut skipped = Vec::new();
    for &s in &ms {
        for &d in &ms {
            if s == d {
                continue;
            }
            let routes = k_shortest_paths(graph, s, d, per_pair.max(1));
            if routes.is_empty() {
                skipped.push((s, d));
            }
            for r in routes {
                if seen.insert(r.clone()) {
                    seqs.push(r);
                }
            }
        }
    }
    Ok(PathGeneration { table: PathTable::from_sequences(graph.node_count(), seqs)?, skipped })
}

/// Reads an explicit path list: one path per line, comma-separated node
/// labels of `graph`. Blank lines and `#` comments are skipped. A single
/// label is a one-node probe.
pub fn parse_path_fixture(text: &str, graph: &Graph) -> Result<PathTable, TopologyError> {
    let mut seqs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut seq = Vec::new();
        for tok in line.split(',').map(str::trim) {
            let v = graph
                .node_by_label(tok)
                .ok_or_else(|| TopologyError::UnknownLabel { line: lineno + 1, label: tok.to_string() })?;
            seq.push(v);
        }
        for w in seq.windows(2) {
            if !graph.neighbors(w[0]).contains(&w[1]) {
                return Err(TopologyError::Parse {
                    line: lineno + 1,
                    message: format!("no edge {} - {}", graph.label(w[0]), graph.label(w[1])),
                });
            }
        }
        seqs.push(seq);
    }
    PathTable::from_sequences(graph.node_count(), seqs)
}
