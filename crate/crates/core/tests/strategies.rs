//! Strategy runs on the small fixtures.

mod common;

use probetomo::centrality::{CentralityParams, F1Rule};
use probetomo::nodeset::NodeSet;
use probetomo::strategies::{run_strategy, FaceGreedy, GroundTruth, Model, StrategyKind};

fn v9_truth(inst: &probetomo::topology::Instance) -> GroundTruth {
    GroundTruth::new(NodeSet::from_indices(inst.graph.node_count(), [inst.node("v9")]))
}

#[test]
fn hypothetical_f1_changes_face_order() {
    let inst = common::fixture("mesh10");
    let face = FaceGreedy::new(CentralityParams { f1_rule: F1Rule::Hypothetical, ..Default::default() });
    let order = run_strategy(&face, &inst, &v9_truth(&inst), None).unwrap().probe_order();
    assert_eq!(&order[..3], &[2, 3, 4]);
}

#[test]
fn every_static_strategy_reaches_a_consistent_view() {
    let inst = common::fixture("mesh10");
    let truth = v9_truth(&inst);
    for kind in [StrategyKind::Pop, StrategyKind::Face, StrategyKind::Gc, StrategyKind::Apc, StrategyKind::Dp] {
        let s = kind.build(&Model::default());
        let trace = run_strategy(s.as_ref(), &inst, &truth, None).unwrap();
        assert!(!trace.final_view.is_contradictory(), "{kind}");
        assert!(trace.final_view.known_broken().is_subset(&truth.failed), "{kind}");
    }
}

#[test]
fn budget_stops_early() {
    let inst = common::fixture("mesh10");
    let s = StrategyKind::Pop.build(&Model::default());
    let trace = run_strategy(s.as_ref(), &inst, &v9_truth(&inst), Some(2)).unwrap();
    assert_eq!(trace.probes(), 2);
    assert_eq!(trace.termination.as_str(), "budgetExhausted");
}
