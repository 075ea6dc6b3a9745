//! Brute-force reference inference by enumerating every node-state
//! assignment. Independent of the inclusion-exclusion engine and meant for
//! small instances only.

use crate::topology::{Observation, Outcome, PathTable};

/// Largest node count the oracle enumerates.
pub const ORACLE_MAX_NODES: usize = 20;

/// Enumerates all `2^n` assignments of a path table.
pub struct Oracle {
    masks: Vec<u32>,
    n: usize,
    p: f64,
}

/// Posteriors computed by enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub joint: f64,
    pub path_working: Vec<f64>,
    pub node_failure: Vec<f64>,
}

impl Oracle {
    /// Panics if the table has more than [`ORACLE_MAX_NODES`] nodes.
    pub fn new(paths: &PathTable, p: f64) -> Self {
        let n = paths.universe();
        assert!(n <= ORACLE_MAX_NODES, "oracle limited to {ORACLE_MAX_NODES} nodes");
        let masks = paths.iter().map(|m| m.nodes.iter().fold(0u32, |acc, &v| acc | 1 << v)).collect();
        Oracle { masks, n, p }
    }

    fn weight(&self, failed: u32) -> f64 {
        let k = failed.count_ones() as i32;
        self.p.powi(k) * (1.0 - self.p).powi(self.n as i32 - k)
    }

    fn outcome(&self, failed: u32, path: usize) -> Outcome {
        if self.masks[path] & failed != 0 {
            Outcome::Failed
        } else {
            Outcome::Working
        }
    }

    fn consistent(&self, failed: u32, obs: &[Observation]) -> bool {
        obs.iter().all(|o| self.outcome(failed, o.path) == o.outcome)
    }

    /// Assignments consistent with `obs`, with their prior weight.
    fn worlds<'s>(&'s self, obs: &'s [Observation]) -> impl Iterator<Item = (u32, f64)> + 's {
        (0..1u32 << self.n).filter(|&f| self.consistent(f, obs)).map(|f| (f, self.weight(f)))
    }

    /// `P(O)` by summation.
    pub fn joint(&self, obs: &[Observation]) -> f64 {
        self.worlds(obs).map(|(_, w)| w).sum()
    }

    /// All posteriors, or `None` when the observations have zero probability.
    pub fn report(&self, obs: &[Observation]) -> Option<OracleReport> {
        let mut joint = 0.0;
        let mut path_working = vec![0.0; self.masks.len()];
        let mut node_failure = vec![0.0; self.n];
        for (f, w) in self.worlds(obs) {
            joint += w;
            for (i, pw) in path_working.iter_mut().enumerate() {
                if self.outcome(f, i).is_working() {
                    *pw += w;
                }
            }
            for (v, nf) in node_failure.iter_mut().enumerate() {
                if f & 1 << v != 0 {
                    *nf += w;
                }
            }
        }
        if joint <= 0.0 {
            return None;
        }
        path_working.iter_mut().chain(node_failure.iter_mut()).for_each(|x| *x /= joint);
        Some(OracleReport { joint, path_working, node_failure })
    }

    /// Node states settled by `obs`: nodes on working paths, plus nodes left
    /// alone on a failed path once those are removed.
    pub fn settled(&self, obs: &[Observation]) -> usize {
        let working = obs.iter().filter(|o| o.outcome.is_working()).fold(0u32, |acc, o| acc | self.masks[o.path]);
        let broken = obs
            .iter()
            .filter(|o| !o.outcome.is_working())
            .map(|o| self.masks[o.path] & !working)
            .filter(|r| r.count_ones() == 1)
            .fold(0u32, |acc, r| acc | r);
        (working.count_ones() + broken.count_ones()) as usize
    }

    /// `E[settled(O ∪ {m}) - settled(O) | O]`, averaging over the consistent
    /// assignments.
    pub fn expected_gain(&self, obs: &[Observation], candidate: usize) -> Option<f64> {
        let base = self.settled(obs);
        let mut joint = 0.0;
        let mut acc = 0.0;
        let mut ext = obs.to_vec();
        ext.push(Observation::new(candidate, Outcome::Working));
        for (f, w) in self.worlds(obs) {
            joint += w;
            ext.last_mut().expect("pushed").outcome = self.outcome(f, candidate);
            acc += w * (self.settled(&ext) - base) as f64;
        }
        (joint > 0.0).then(|| acc / joint)
    }
}
