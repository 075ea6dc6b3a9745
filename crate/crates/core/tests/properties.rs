//! Property tests over random instances.

mod common;

use std::sync::Arc;

use probetomo::bayes::{Bayes, Prior};
use probetomo::strategies::{run_strategy, FaceGreedy, GroundTruth, PopGreedy};
use probetomo::topology::{Instance, LogicalView, Outcome, PathTable};
use probetomo::utility::cumulative_utility;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn setup(seed: u64) -> (ChaCha8Rng, Arc<PathTable>, probetomo::nodeset::NodeSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=12);
    let m = rng.gen_range(1..=8);
    let table = Arc::new(random_table(&mut rng, n, m, 6));
    let truth = random_truth(&mut rng, n, 0.2);
    (rng, table, truth)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn observation_order_does_not_matter(seed in any::<u64>()) {
        let (mut rng, table, truth) = setup(seed);
        let mut obs = random_observations(&mut rng, &table, &truth, 0.7);
        let a = view_of(&table, &obs);
        obs.shuffle(&mut rng);
        let b = view_of(&table, &obs);
        prop_assert_eq!(a.working(), b.working());
        prop_assert_eq!(a.known_broken(), b.known_broken());
        prop_assert_eq!(a.active_actions(), b.active_actions());
    }

    #[test]
    fn truthful_observations_never_contradict(seed in any::<u64>()) {
        let (mut rng, table, truth) = setup(seed);
        let obs = random_observations(&mut rng, &table, &truth, 1.0);
        let view = view_of(&table, &obs);
        prop_assert!(!view.is_contradictory());
        prop_assert!(view.known_broken().is_subset(&truth));
        prop_assert!(!view.working().intersects(&truth));
    }

    #[test]
    fn total_probability_over_next_outcome(seed in any::<u64>(), pi in 0usize..3) {
        let p = [0.05, 0.1, 0.3][pi];
        let (mut rng, table, truth) = setup(seed);
        let obs = random_observations(&mut rng, &table, &truth, 0.5);
        let view = view_of(&table, &obs);
        let bayes = Bayes::new(Prior::new(p).unwrap());
        let joint = bayes.joint_observation_prob(&view, &[]).unwrap();
        for a in table.ids().filter(|&a| !view.is_tested(a)) {
            let w = bayes.joint_observation_prob(&view.apply(a, Outcome::Working), &[]).unwrap();
            let f = bayes.joint_observation_prob(&view.apply(a, Outcome::Failed), &[]).unwrap();
            prop_assert!((w + f - joint).abs() < 1e-12, "{} + {} != {}", w, f, joint);
            let pw = bayes.path_posterior_working(a, &view).unwrap();
            prop_assert!((pw * joint - w).abs() < 1e-12);
        }
    }

    #[test]
    fn information_only_grows(seed in any::<u64>()) {
        let (mut rng, table, truth) = setup(seed);
        let obs = random_observations(&mut rng, &table, &truth, 1.0);
        let mut view = LogicalView::new(table.clone());
        let mut last = cumulative_utility(&view);
        for o in obs {
            let next = view.apply(o.path, o.outcome);
            prop_assert!(view.working().is_subset(next.working()));
            prop_assert!(view.known_broken().is_subset(next.known_broken()));
            let u = cumulative_utility(&next);
            prop_assert!(u >= last);
            last = u;
            view = next;
        }
    }

    #[test]
    fn greedy_runs_match_all_paths_classification(seed in any::<u64>()) {
        let (_, table, truth) = setup(seed);
        let labels: Vec<String> = (0..table.universe()).map(|v| v.to_string()).collect();
        let graph = probetomo::topology::Graph::new(labels, Vec::new()).unwrap();
        let inst = Instance::new(graph, (*table).clone());
        let truth = GroundTruth::new(truth);
        let all = probetomo::strategies::all_paths_view(&inst, &truth);
        for trace in [
            run_strategy(&PopGreedy::default(), &inst, &truth, None).unwrap(),
            run_strategy(&FaceGreedy::default(), &inst, &truth, None).unwrap(),
        ] {
            prop_assert_eq!(trace.final_view.working(), all.working());
            prop_assert_eq!(trace.final_view.known_broken(), all.known_broken());
        }
    }
}
