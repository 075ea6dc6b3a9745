//! Shared fixtures and random instance generators for integration tests.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use probetomo::nodeset::NodeSet;
use probetomo::topology::{Instance, LogicalView, Observation, Outcome, PathTable, TopologyFormat};
use rand::seq::index::sample;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> Instance {
    let dir = fixture_dir();
    let gml = std::fs::read_to_string(dir.join(format!("{name}.gml"))).unwrap();
    let paths = std::fs::read_to_string(dir.join(format!("{name}.paths"))).unwrap();
    Instance::from_fixture(&gml, TopologyFormat::Gml, &paths).unwrap()
}

/// Random path table: `n` nodes, `m` paths of 1 to `max_len` distinct nodes.
pub fn random_table<R: Rng>(rng: &mut R, n: usize, m: usize, max_len: usize) -> PathTable {
    let seqs = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.min(n));
            sample(rng, n, len).into_vec()
        })
        .collect();
    PathTable::from_sequences(n, seqs).unwrap()
}

/// Each node broken independently with probability `p`.
pub fn random_truth<R: Rng>(rng: &mut R, n: usize, p: f64) -> NodeSet {
    NodeSet::from_indices(n, (0..n).filter(|_| rng.gen::<f64>() < p))
}

pub fn outcome(table: &PathTable, failed: &NodeSet, path: usize) -> Outcome {
    if table[path].set.intersects(failed) {
        Outcome::Failed
    } else {
        Outcome::Working
    }
}

/// Observations of a random subset of paths, consistent with `failed`.
pub fn random_observations<R: Rng>(rng: &mut R, table: &PathTable, failed: &NodeSet, share: f64) -> Vec<Observation> {
    table
        .ids()
        .filter(|_| rng.gen::<f64>() < share)
        .map(|id| Observation::new(id, outcome(table, failed, id)))
        .collect()
}

pub fn view_of(table: &Arc<PathTable>, obs: &[Observation]) -> LogicalView {
    LogicalView::from_observations(table.clone(), obs)
}
