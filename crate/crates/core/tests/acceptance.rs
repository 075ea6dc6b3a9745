//! Acceptance suite. Each test checks one criterion and writes a single
//! `ACn PASS|FAIL` line to stderr, bypassing the test harness capture so the
//! lines show up in every run.

mod common;

use std::collections::VecDeque;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use probetomo::bayes::{Bayes, Prior};
use probetomo::centrality::CentralityParams;
use probetomo::harness::{Experiment, ExperimentConfig, ReportRow};
use probetomo::metrics::change_detection;
use probetomo::nodeset::NodeSet;
use probetomo::oracle::Oracle;
use probetomo::strategies::{
    evaluate_policy, exact_dp_policy, rollback, run_dynamic, run_dynamic_with_truth, run_strategy, DynamicConfig,
    FaceGreedy, GroundTruth, PopGreedy, StrategyKind, Termination,
};
use probetomo::topology::{is_contradictory, Instance, LogicalView, Observation, Outcome};
use probetomo::utility::{delta_ratio, empirical_alpha, expected_utility_exact, utility_vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn verdict(id: &str, failures: &[String], detail: &str) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{id} {status}: {detail}");
    for f in failures.iter().take(10) {
        let _ = writeln!(err, "    {f}");
    }
    assert!(failures.is_empty(), "{id} failed: {failures:?}");
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn mesh() -> (Instance, GroundTruth) {
    let inst = fixture("mesh10");
    let truth = GroundTruth::new(NodeSet::from_indices(inst.graph.node_count(), [inst.node("v9")]));
    (inst, truth)
}

#[test]
fn ac1_exact_engine_worked_example() {
    let (inst, truth) = mesh();
    let pop = PopGreedy::default();
    let start = Instant::now();
    let trace = run_strategy(&pop, &inst, &truth, None).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let mut f = Vec::new();
    let order = trace.probe_order();
    check(&mut f, order == vec![2, 3, 0, 1], || format!("probe order {order:?}"));
    let scores: Vec<f64> = trace.steps.iter().map(|s| s.score).collect();
    for (i, want) in [(1, 2.187), (2, 1.1358), (3, 1.278)] {
        let got = scores.get(i).copied().unwrap_or(f64::NAN);
        check(&mut f, close(got, want, 1e-3), || format!("utility at step {} = {got}, want {want}", i + 1));
    }
    // state just before the fourth probe
    let before = inst.view().apply(2, Outcome::Working).apply(3, Outcome::Failed).apply(0, Outcome::Working);
    let bayes = Bayes::default();
    let u6 = expected_utility_exact(5, &before, &bayes.context(&before).unwrap()).unwrap();
    check(&mut f, close(u6, 0.0, 1e-3), || format!("u(a6) = {u6}"));
    let last = &trace.steps.last().unwrap().node_scores;
    let (v9, v10) = (last[inst.node("v9")], last[inst.node("v10")]);
    check(&mut f, close(v9, 1.0, 1e-9), || format!("P(v9 broken) = {v9}"));
    check(&mut f, close(v10, 0.1, 1e-9), || format!("P(v10 broken) = {v10}"));
    check(&mut f, trace.termination == Termination::NoUsefulPaths, || format!("termination {}", trace.termination));
    check(&mut f, elapsed < 0.1, || format!("runtime {elapsed:.4} s"));
    verdict(
        "AC1",
        &f,
        &format!("order {order:?}, utilities {scores:.4?}, u(a6) {u6:.3e}, posteriors ({v9}, {v10}), {elapsed:.4} s"),
    );
}

#[test]
fn ac2_centrality_engine_worked_example() {
    let (inst, truth) = mesh();
    let face = FaceGreedy::new(CentralityParams { c0: 0.1, epsilon: 0.05, ..Default::default() });
    let trace = run_strategy(&face, &inst, &truth, None).unwrap();
    let mut f = Vec::new();
    let order = trace.probe_order();
    check(&mut f, order == vec![2, 3, 0, 1], || format!("probe order {order:?}"));
    let c = &trace.steps.last().unwrap().node_scores;
    check(&mut f, c[inst.node("v9")] == 1.0, || format!("c(v9) = {}", c[inst.node("v9")]));
    check(&mut f, c[inst.node("v10")] == 0.1, || format!("c(v10) = {}", c[inst.node("v10")]));
    for v in 1..=8 {
        let id = inst.node(&format!("v{v}"));
        check(&mut f, c[id] == 0.0, || format!("c(v{v}) = {}", c[id]));
    }
    verdict("AC2", &f, &format!("order {order:?}, final centralities {c:?}"));
}

#[test]
fn ac3_non_submodularity_and_empirical_alpha() {
    let inst = fixture("fork6");
    let bayes = Bayes::default();
    let t = inst.view().apply(0, Outcome::Failed);
    let t2 = t.apply(1, Outcome::Failed);
    let mut f = Vec::new();
    let mut line = String::new();
    for (name, view, pz, u) in [("O_T", &t, 0.638, 1.2766), ("O_T'", &t2, 0.789, 1.578)] {
        let ctx = bayes.context(view).unwrap();
        let got_p = ctx.path_working(2).unwrap();
        let got_u = expected_utility_exact(2, view, &ctx).unwrap();
        check(&mut f, close(got_p, pz, 1e-3), || format!("P(Z3|{name}) = {got_p}, want {pz}"));
        check(&mut f, close(got_u, u, 1e-3), || format!("U(a3|{name}) = {got_u}, want {u}"));
        line.push_str(&format!("P(Z3|{name}) {got_p:.4} U {got_u:.4}; "));
    }

    let (inst, truth) = mesh();
    let trace = run_strategy(&PopGreedy::default(), &inst, &truth, None).unwrap();
    let mut view = inst.view();
    let mut states = Vec::new();
    let snapshot = |v: &LogicalView| {
        let ctx = bayes.context(v).unwrap();
        (utility_vector(v, &ctx).unwrap(), v.paths().ids().map(|id| v.is_tested(id)).collect::<Vec<_>>())
    };
    states.push(snapshot(&view));
    for s in &trace.steps {
        view = view.apply(s.path, s.outcome);
        states.push(snapshot(&view));
    }
    let alpha = empirical_alpha(&states);
    check(&mut f, close(alpha, 0.842, 1e-3), || format!("empirical alpha {alpha}"));
    verdict("AC3", &f, &format!("{line}alpha {alpha:.5}"));
}

#[test]
fn ac4_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    let mut f = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let p = [0.05, 0.1, 0.3][case % 3];
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..=8);
        let table = Arc::new(random_table(&mut rng, n, m, 6));
        let truth = random_truth(&mut rng, n, p);
        let obs = random_observations(&mut rng, &table, &truth, 0.5);
        let view = view_of(&table, &obs);
        let bayes = Bayes::new(Prior::new(p).unwrap());
        let got = bayes.report(&view).unwrap();
        let want = Oracle::new(&table, p).report(&obs).unwrap();
        let pairs =
            got.path_working.iter().zip(&want.path_working).chain(got.node_failure.iter().zip(&want.node_failure));
        for (a, b) in pairs {
            worst = worst.max((a - b).abs());
        }
        let jerr = (got.joint_prob - want.joint).abs();
        worst = worst.max(jerr);
        check(&mut f, worst <= 1e-9, || format!("case {case}: deviation {worst:e}"));
        if !f.is_empty() {
            break;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(&mut f, elapsed < 60.0, || format!("runtime {elapsed:.1} s"));
    verdict("AC4", &f, &format!("500 instances, max deviation {worst:.2e}, {elapsed:.2} s"));
}

#[test]
fn ac5_marginal_benefit_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut f = Vec::new();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for case in 0..100 {
        let p = [0.05, 0.1, 0.3][case % 3];
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(2..=8);
        let table = Arc::new(random_table(&mut rng, n, m, 6));
        let truth = random_truth(&mut rng, n, p);
        let obs = random_observations(&mut rng, &table, &truth, 0.4);
        let view = view_of(&table, &obs);
        let bayes = Bayes::new(Prior::new(p).unwrap());
        let ctx = bayes.context(&view).unwrap();
        let oracle = Oracle::new(&table, p);
        for a in table.ids().filter(|&a| !view.is_tested(a)) {
            let got = expected_utility_exact(a, &view, &ctx).unwrap();
            let want = oracle.expected_gain(&obs, a).unwrap();
            worst = worst.max((got - want).abs());
            checked += 1;
            check(&mut f, (got - want).abs() <= 1e-9, || format!("case {case} path {a}: {got} vs {want}"));
        }
    }
    verdict("AC5", &f, &format!("{checked} candidates on 100 instances, max deviation {worst:.2e}"));
}

#[test]
fn ac6_greedy_bound_against_dp() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut f = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut min_alpha: f64 = 1.0;
    for case in 0..100 {
        let p = [0.05, 0.1, 0.3][case % 3];
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(2..=8);
        let table = Arc::new(random_table(&mut rng, n, m, 5));
        let view = LogicalView::new(table.clone());
        let bayes = Bayes::new(Prior::new(p).unwrap());
        let pop = PopGreedy::new(bayes);
        let opt = exact_dp_policy(&view, &bayes, m).unwrap();
        let greedy = evaluate_policy(&pop, &bayes, &view, m).unwrap();
        min_alpha = min_alpha.min(greedy.alpha);
        check(&mut f, greedy.value <= opt.value + 1e-9, || {
            format!("case {case}: greedy {} above DP {}", greedy.value, opt.value)
        });
        if opt.depth == 0 {
            continue;
        }
        let h = opt.depth as f64;
        for k in [m, 2] {
            let g = if k == m { greedy.value } else { evaluate_policy(&pop, &bayes, &view, k).unwrap().value };
            let dp_k = exact_dp_policy(&view, &bayes, k).unwrap().value;
            check(&mut f, g <= dp_k + 1e-9, || format!("case {case} K={k}: greedy {g} above DP {dp_k}"));
            let bound = (1.0 - (-greedy.alpha * k as f64 / h).exp()) * opt.value;
            min_slack = min_slack.min(g - bound);
            check(&mut f, g + 1e-9 >= bound, || {
                format!("case {case} K={k}: greedy {g} below bound {bound} (alpha {}, h {h})", greedy.alpha)
            });
        }
    }
    verdict(
        "AC6",
        &f,
        &format!("100 instances, K in {{|M|, 2}}, min slack {min_slack:.4}, min empirical alpha {min_alpha:.4}"),
    );
}

fn bics_config(k: usize, strategies: &str, repetitions: usize, seed: u64) -> ExperimentConfig {
    let gml = fixture_dir().join("bics.gml");
    let text = format!(
        r#"
[topology]
file = "{}"
format = "gml"
monitors = 10
paths_per_pair = 2

[failures]
mode = "fixed"
k = {k}

[run]
strategies = [{strategies}]
repetitions = {repetitions}
seed = {seed}
"#,
        gml.display()
    );
    ExperimentConfig::from_toml(&text).unwrap()
}

fn summaries(rows: &[ReportRow], kind: StrategyKind) -> Vec<&ReportRow> {
    rows.iter().filter(|r| r.strategy == kind && r.is_summary()).collect()
}

#[test]
fn ac7_convergence_on_bics() {
    let mut f = Vec::new();
    let mut line = String::new();
    for k in 1..=5 {
        let exp = Experiment::new(bics_config(k, "\"pop\", \"face\"", 20, 700 + k as u64)).unwrap();
        let rows = exp.run(4).unwrap();
        let mut means = Vec::new();
        for kind in [StrategyKind::Pop, StrategyKind::Face] {
            let s = summaries(&rows, kind);
            check(&mut f, s.len() == 20, || format!("k={k} {kind}: {} summaries", s.len()));
            for r in &s {
                check(&mut f, r.a_w == Some(1.0) && r.a_b == Some(1.0), || {
                    format!("k={k} {kind} rep {}: a_W {:?} a_B {:?} ({})", r.repetition, r.a_w, r.a_b, r.termination)
                });
            }
            means.push(s.iter().map(|r| r.probes as f64).sum::<f64>() / s.len() as f64);
        }
        let (pop, face) = (means[0], means[1]);
        check(&mut f, face < pop, || format!("k={k}: mean probes face {face} not below pop {pop}"));
        line.push_str(&format!("k={k} pop {pop:.2} face {face:.2}; "));
    }
    verdict("AC7", &f, &format!("a_W = a_B = 1 check and mean probes: {line}"));
}

#[test]
fn ac8_metric_invariants_and_dynamic_properties() {
    let mut f = Vec::new();

    // (a) metric ranges and monotone accuracy along pop and face traces
    let exp = Experiment::new(bics_config(3, "\"pop\", \"face\", \"gc\", \"apc\"", 10, 88)).unwrap();
    let rows = exp.run(4).unwrap();
    let unit = |x: Option<f64>| x.is_none_or(|v| (0.0..=1.0).contains(&v));
    for r in &rows {
        check(&mut f, unit(r.a_w) && unit(r.a_b) && unit(r.r1) && unit(r.r2), || format!("out of range: {r:?}"));
        if let (Some(r1), Some(r2)) = (r.r1, r.r2) {
            check(&mut f, (r1 == 1.0) == (r2 == 1.0), || format!("R1/R2 disagree: {r:?}"));
        }
    }
    for kind in [StrategyKind::Pop, StrategyKind::Face] {
        for rep in 0..10 {
            let steps: Vec<&ReportRow> =
                rows.iter().filter(|r| r.strategy == kind && r.repetition == rep && !r.is_summary()).collect();
            for w in steps.windows(2) {
                check(&mut f, w[1].a_w >= w[0].a_w && w[1].a_b >= w[0].a_b, || {
                    format!("{kind} rep {rep}: accuracy drops at step {:?}", w[1].step)
                });
            }
        }
    }

    // (b1) zero-flip dynamics replay the static run
    let (inst, truth) = mesh();
    let zero = DynamicConfig { p_wf: 0.0, p_fw: 0.0, window: inst.paths.len(), horizon: 20 };
    for (name, strat) in [
        ("pop", Box::new(PopGreedy::default()) as Box<dyn probetomo::strategies::Strategy>),
        ("face", Box::new(FaceGreedy::default())),
    ] {
        let stat = run_strategy(strat.as_ref(), &inst, &truth, None).unwrap();
        let dynm = run_dynamic(strat.as_ref(), &inst, &zero, &truth, 1).unwrap();
        let k = stat.probes();
        let prefix: Vec<usize> = dynm.steps[..k].iter().map(|s| s.path).collect();
        check(&mut f, prefix == stat.probe_order(), || format!("{name}: dynamic prefix {prefix:?}"));
        let s = &dynm.steps[k - 1];
        check(&mut f, &s.working == stat.final_view.working() && &s.broken == stat.final_view.known_broken(), || {
            format!("{name}: classification differs from static")
        });
        check(&mut f, dynm.steps.iter().all(|s| !s.contradiction), || format!("{name}: contradiction without flips"));
    }

    // (b2) forced single flips are always detected
    let covered = inst.paths.covered();
    let n = inst.graph.node_count();
    let mut flips = 0;
    for v in covered.iter() {
        let single = GroundTruth::new(NodeSet::from_indices(n, [v]));
        let all = probetomo::strategies::all_paths_view(&inst, &single);
        if !all.known_broken().contains(v) {
            continue;
        }
        for breaks in [true, false] {
            let timeline: Vec<NodeSet> = (0..60)
                .map(|t| if (t >= 15) == breaks { NodeSet::from_indices(n, [v]) } else { NodeSet::empty(n) })
                .collect();
            for strat in [&PopGreedy::default() as &dyn probetomo::strategies::Strategy, &FaceGreedy::default()] {
                let tr = run_dynamic_with_truth(strat, &inst, inst.paths.len(), &timeline).unwrap();
                let cls: Vec<(NodeSet, NodeSet)> =
                    tr.steps.iter().map(|s| (s.working.clone(), s.broken.clone())).collect();
                let d = change_detection(&tr.truth, &cls, &NodeSet::from_indices(n, [v]));
                let dir = if breaks { &d.broken } else { &d.repaired };
                flips += 1;
                check(&mut f, dir.percent() == Some(100.0) && dir.mean_delay().is_some_and(f64::is_finite), || {
                    format!("{} node {v} breaks={breaks}: {dir:?}", strat.name())
                });
            }
        }
    }

    // (b3) rollback always leaves a consistent window
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rollbacks = 0;
    for case in 0..500 {
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(2..=8);
        let table = Arc::new(random_table(&mut rng, n, m, 5));
        let mut window: VecDeque<Observation> = VecDeque::new();
        for _ in 0..rng.gen_range(1..=10) {
            let truth = random_truth(&mut rng, n, 0.3);
            let path = rng.gen_range(0..m);
            window.push_back(Observation::new(path, outcome(&table, &truth, path)));
        }
        let entries: Vec<Observation> = window.iter().copied().collect();
        if is_contradictory(&entries, &table) {
            rollbacks += 1;
            rollback(&mut window, &table);
        }
        let entries: Vec<Observation> = window.iter().copied().collect();
        check(&mut f, !is_contradictory(&entries, &table), || format!("case {case}: window still contradictory"));
    }

    verdict(
        "AC8",
        &f,
        &format!("{} report rows, zero-flip replay, {flips} forced flips, {rollbacks} rollbacks", rows.len()),
    );
}

#[test]
fn ac9_appendix_grid() {
    let mut f = Vec::new();
    let mut worst = (0.0, 0.0, 0, 0);
    let mut points = 0;
    for p in [0.05, 0.1, 0.3] {
        for len in 2..=10 {
            for deg in 1..=8 {
                let r = delta_ratio(p, deg, len);
                points += 1;
                if r > worst.0 {
                    worst = (r, p, len, deg);
                }
                check(&mut f, r <= 1.0, || format!("p {p}, length {len}, degree {deg}: ratio {r:.4}"));
            }
        }
    }
    verdict(
        "AC9",
        &f,
        &format!(
            "{points} grid points, {} above 1, max ratio {:.4} at p {}, length {}, degree {}",
            f.len(),
            worst.0,
            worst.1,
            worst.2,
            worst.3
        ),
    );
}

#[test]
fn ac10_report_is_byte_identical() {
    let cfg = fixture_dir().join("bics.cfg");
    let bin = env!("CARGO_BIN_EXE_probetomo");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (dir, jobs) in dirs.iter().zip(["1", "4"]) {
        let status = std::process::Command::new(bin)
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut f = Vec::new();
    let mut bytes = 0;
    for name in ["report.csv", "summary.csv"] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        bytes += a.len();
        check(&mut f, a == b, || format!("{name} differs"));
    }
    verdict("AC10", &f, &format!("two runs (1 and 4 jobs), {bytes} bytes identical"));
}
