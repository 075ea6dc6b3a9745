//! Networks, monitors, routed monitoring paths and the pruned logical view.

mod graph;
mod paths;
mod routing;
mod view;

use thiserror::Error;

pub use graph::{parse_edgelist, parse_gml, parse_topology, Graph, TopologyFormat};
pub use paths::{generate_paths, parse_path_fixture, MonitoringPath, PathGeneration, PathTable};
pub use routing::{k_shortest_paths, shortest_path};
pub use view::{is_contradictory, FailedResidual, LogicalView, Observation, ObservationSet, Outcome};

/// Dense node index in `0..n`.
pub type NodeId = usize;
/// Index into a [`PathTable`].
pub type PathId = usize;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: edge endpoint {id} is not a declared node")]
    DanglingEndpoint { line: usize, id: i64 },
    #[error("line {line}: unknown node label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("graph has no nodes")]
    Empty,
    #[error("duplicate node label `{0}`")]
    DuplicateLabel(String),
    #[error("node {0} is out of range")]
    NodeOutOfRange(NodeId),
    #[error("need at least two monitors, got {0}")]
    TooFewMonitors(usize),
    #[error("path {id}: {reason}")]
    InvalidPath { id: PathId, reason: String },
    #[error("path {0} has already been tested")]
    AlreadyTested(PathId),
}

/// Network plus its fixed probe-able paths.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub paths: std::sync::Arc<PathTable>,
}

impl Instance {
    pub fn new(graph: Graph, paths: PathTable) -> Self {
        Instance { graph, paths: std::sync::Arc::new(paths) }
    }

    /// Reads a GML or edge-list topology and an explicit path fixture.
    pub fn from_fixture(topology: &str, format: TopologyFormat, paths: &str) -> Result<Self, TopologyError> {
        let mut graph = parse_topology(topology, format)?;
        let table = parse_path_fixture(paths, &graph)?;
        let mut ends: Vec<NodeId> = table.iter().flat_map(|p| [p.src, p.dst]).collect();
        ends.sort_unstable();
        ends.dedup();
        graph.set_monitors(ends)?;
        Ok(Instance::new(graph, table))
    }

    pub fn view(&self) -> LogicalView {
        LogicalView::new(self.paths.clone())
    }

    /// Node id for `label`. Panics if absent; meant for fixtures and tests.
    pub fn node(&self, label: &str) -> NodeId {
        self.graph.node_by_label(label).unwrap_or_else(|| panic!("no node labelled `{label}`"))
    }
}
