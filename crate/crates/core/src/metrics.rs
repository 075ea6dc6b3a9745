//! Classification extraction and evaluation metrics.

use crate::nodeset::NodeSet;
use crate::topology::NodeId;

/// Certain classification plus a failure ranking of the scored nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    /// Nodes with failure score 0.
    pub working: NodeSet,
    /// Nodes with failure score 1.
    pub broken: NodeSet,
    /// Scored nodes by descending score, ties by ascending id.
    pub ranking: Vec<NodeId>,
}

/// Classifies the nodes of `nodes` by their entry in `scores`.
pub fn classify(scores: &[f64], nodes: &NodeSet) -> Classification {
    let mut working = NodeSet::empty(nodes.universe());
    let mut broken = NodeSet::empty(nodes.universe());
    let mut ranking: Vec<NodeId> = nodes.iter().collect();
    for v in nodes.iter() {
        if scores[v] == 0.0 {
            working.insert(v);
        } else if scores[v] == 1.0 {
            broken.insert(v);
        }
    }
    ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    Classification { working, broken, ranking }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// `(a_W, a_B)`: the share of the all-paths working and broken sets that
/// `class` also asserts.
pub fn accuracy(class: &Classification, baseline: &Classification) -> (f64, f64) {
    (
        ratio(class.working.intersection(&baseline.working).len(), baseline.working.len()),
        ratio(class.broken.intersection(&baseline.broken).len(), baseline.broken.len()),
    )
}

/// `(R1, R2)` of a ranking against the truly broken nodes that appear in
/// it. `R1` is the share of broken nodes in the top `k`; `R2` is `k` over
/// the 1-based position of the lowest-ranked broken node. `None` when no
/// ranked node is broken.
pub fn rank_metrics(ranking: &[NodeId], failed: &NodeSet) -> Option<(f64, f64)> {
    let positions: Vec<usize> =
        ranking.iter().enumerate().filter(|(_, &v)| failed.contains(v)).map(|(i, _)| i + 1).collect();
    let k = positions.len();
    if k == 0 {
        return None;
    }
    let top = positions.iter().filter(|&&i| i <= k).count();
    let last = *positions.last().expect("k > 0");
    Some((top as f64 / k as f64, k as f64 / last as f64))
}

/// The literal alternative `k / (n - i + 1)` for the same ranking, kept for
/// comparison in debug output.
pub fn r2_literal(ranking: &[NodeId], failed: &NodeSet) -> Option<f64> {
    let k = ranking.iter().filter(|&&v| failed.contains(v)).count();
    let last = ranking.iter().rposition(|&v| failed.contains(v))? + 1;
    Some(k as f64 / (ranking.len() - last + 1) as f64)
}

/// `(precision, recall)` over the nodes of `universe`. True positives are
/// correct assertions, false positives wrong ones, and false negatives every
/// node whose true state was not correctly asserted.
pub fn precision_recall(class: &Classification, failed: &NodeSet, universe: &NodeSet) -> (f64, f64) {
    let truly_working = universe.difference(failed);
    let truly_broken = universe.intersection(failed);
    let tp = class.working.intersection(&truly_working).len() + class.broken.intersection(&truly_broken).len();
    let fp = class.working.intersection(&truly_broken).len() + class.broken.intersection(&truly_working).len();
    let fneg = universe.len() - tp;
    (ratio(tp, tp + fp), ratio(tp, tp + fneg))
}

/// Detection statistics for one direction of state change.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DirectionStats {
    pub changes: usize,
    pub detected: usize,
    /// Steps from each detected change to its first detection.
    pub delays: Vec<usize>,
}

impl DirectionStats {
    /// Detected share in percent, `None` without changes.
    pub fn percent(&self) -> Option<f64> {
        (self.changes > 0).then(|| 100.0 * self.detected as f64 / self.changes as f64)
    }

    pub fn mean_delay(&self) -> Option<f64> {
        (!self.delays.is_empty()).then(|| self.delays.iter().sum::<usize>() as f64 / self.delays.len() as f64)
    }

    /// Sample standard deviation of the delays, `None` below two samples.
    pub fn sd_delay(&self) -> Option<f64> {
        let n = self.delays.len();
        let mean = self.mean_delay()?;
        (n >= 2).then(|| {
            let ss: f64 = self.delays.iter().map(|&d| (d as f64 - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChangeDetection {
    /// Repairs (broken to working).
    pub repaired: DirectionStats,
    /// Breakdowns (working to broken).
    pub broken: DirectionStats,
}

/// Matches truth changes to later classifications.
///
/// `truth[s]` is the broken set at step `s`; `classified[s]` the
/// `(working, broken)` classification after step `s`. A change of node `v`
/// at step `s` is detected at the first `s' > s` before `v` changes again
/// whose classification asserts the new state.
pub fn change_detection(truth: &[NodeSet], classified: &[(NodeSet, NodeSet)], nodes: &NodeSet) -> ChangeDetection {
    let mut out = ChangeDetection::default();
    let horizon = truth.len().min(classified.len());
    for v in nodes.iter() {
        let changes: Vec<usize> = (1..horizon).filter(|&s| truth[s].contains(v) != truth[s - 1].contains(v)).collect();
        for (i, &s) in changes.iter().enumerate() {
            let now_broken = truth[s].contains(v);
            let until = changes.get(i + 1).copied().unwrap_or(horizon);
            let hit = (s + 1..until).find(|&t| {
                let (w, b) = &classified[t];
                if now_broken {
                    b.contains(v)
                } else {
                    w.contains(v)
                }
            });
            let stats = if now_broken { &mut out.broken } else { &mut out.repaired };
            stats.changes += 1;
            if let Some(t) = hit {
                stats.detected += 1;
                stats.delays.push(t - s);
            }
        }
    }
    out
}
