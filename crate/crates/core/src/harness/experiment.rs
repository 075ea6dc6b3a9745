//! Batch execution of static and dynamic experiments.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{BudgetMode, ExperimentConfig};
use super::failures::generate_failures;
use super::report::{DetectionRow, DynamicRow, ReportRow};
use super::HarnessError;
use crate::bayes::{Bayes, Prior};
use crate::centrality::CentralityParams;
use crate::metrics::{accuracy, change_detection, classify, precision_recall, rank_metrics, Classification};
use crate::nodeset::NodeSet;
use crate::strategies::{
    all_paths_view, run_dynamic, run_strategy, DynamicConfig, GroundTruth, Model, StrategyKind, StrategyTrace,
};
use crate::topology::{generate_paths, parse_topology, Graph, Instance, LogicalView};

/// Parsed inputs shared by all repetitions.
pub struct Experiment {
    pub config: ExperimentConfig,
    graph: Graph,
    fixed: Option<Instance>,
    model: Model,
}

fn read(path: &std::path::Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Io(path.to_path_buf(), e.to_string()))
}

/// Classification read straight off a view: known-working and known-broken
/// nodes.
pub fn view_classification(view: &LogicalView, covered: &NodeSet) -> Classification {
    Classification {
        working: view.working().intersection(covered),
        broken: view.known_broken().intersection(covered),
        ranking: covered.iter().collect(),
    }
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, HarnessError> {
        let text = read(&config.topology.file)?;
        let graph = parse_topology(&text, config.topology.format)?;
        let fixed = match &config.topology.paths {
            Some(p) => Some(Instance::from_fixture(&text, config.topology.format, &read(p)?)?),
            None => None,
        };
        let model = Model {
            bayes: Bayes::new(Prior::new(config.model.prior)?).with_capacity(config.model.capacity),
            centrality: CentralityParams { c0: config.model.c0, epsilon: config.model.epsilon, ..Default::default() },
        };
        Ok(Experiment { config, graph, fixed, model })
    }

    /// Per-repetition generator: the master seed with the repetition index
    /// as stream, so adding repetitions leaves earlier ones unchanged.
    pub fn rng(&self, repetition: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.run.seed);
        rng.set_stream(repetition as u64);
        rng
    }

    /// Instance and ground truth of one repetition.
    pub fn scenario(&self, rng: &mut ChaCha8Rng) -> Result<(Instance, GroundTruth), HarnessError> {
        let instance = match &self.fixed {
            Some(inst) => inst.clone(),
            None => {
                let n = self.graph.node_count();
                let m = self.config.topology.monitors;
                if m > n {
                    return Err(HarnessError::Invalid {
                        field: "topology.monitors".into(),
                        message: format!("{m} monitors on a graph of {n} nodes"),
                    });
                }
                let mut monitors = sample(rng, n, m).into_vec();
                monitors.sort_unstable();
                let mut g = self.graph.clone();
                g.set_monitors(monitors.iter().copied())?;
                let gen = generate_paths(&g, &monitors, self.config.topology.paths_per_pair)?;
                Instance::new(g, gen.table)
            }
        };
        let covered = instance.paths.covered();
        let truth = generate_failures(instance.graph.node_count(), &covered, self.config.failures, rng)?;
        Ok((instance, truth))
    }

    fn static_rows(&self, repetition: usize) -> Result<Vec<ReportRow>, HarnessError> {
        let mut rng = self.rng(repetition);
        let (instance, truth) = self.scenario(&mut rng)?;
        let covered = instance.paths.covered();
        let baseline = view_classification(&all_paths_view(&instance, &truth), &covered);
        let true_failed = truth.failed.intersection(&covered);

        let mut order = self.config.run.strategies.clone();
        if self.config.run.budget == BudgetMode::BoundedByFace {
            order.sort_by_key(|k| *k != StrategyKind::Face);
        }
        let mut face_probes = None;
        let mut rows = Vec::new();
        for kind in order {
            let budget = match self.config.run.budget {
                BudgetMode::UntilConvergence => None,
                BudgetMode::Fixed => self.config.run.budget_k,
                BudgetMode::BoundedByFace if kind == StrategyKind::Face => None,
                BudgetMode::BoundedByFace => face_probes,
            };
            let strategy = kind.build(&self.model);
            let start = Instant::now();
            let result = run_strategy(strategy.as_ref(), &instance, &truth, budget);
            let elapsed = start.elapsed().as_secs_f64();
            let wall = self.config.run.timing.then_some(elapsed);
            match result {
                Ok(trace) => {
                    if kind == StrategyKind::Face {
                        face_probes = Some(trace.probes());
                    }
                    rows.extend(trace_rows(kind, repetition, &trace, &baseline, &covered, &true_failed, wall));
                }
                Err(e) => rows.push(ReportRow::failed(kind, repetition, wall, &e.to_string())),
            }
        }
        rows.sort_by_key(|r| (r.strategy_rank(&self.config.run.strategies), r.step.is_none(), r.step));
        Ok(rows)
    }

    /// Runs every repetition on a pool of `jobs` workers. Rows come back in
    /// repetition, strategy and step order.
    pub fn run(&self, jobs: usize) -> Result<Vec<ReportRow>, HarnessError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        let per_rep: Vec<Result<Vec<ReportRow>, HarnessError>> =
            pool.install(|| (0..self.config.run.repetitions).into_par_iter().map(|r| self.static_rows(r)).collect());
        let mut rows = Vec::new();
        for r in per_rep {
            rows.extend(r?);
        }
        Ok(rows)
    }

    fn dynamic_rows(&self, repetition: usize) -> Result<(Vec<DynamicRow>, Vec<DetectionRow>), HarnessError> {
        let section = self
            .config
            .dynamic
            .as_ref()
            .ok_or(HarnessError::Invalid { field: "dynamic".into(), message: "section missing".into() })?;
        let cfg =
            DynamicConfig { p_wf: section.p_wf, p_fw: section.p_fw, window: section.window, horizon: section.horizon };
        let mut rng = self.rng(repetition);
        let (instance, truth) = self.scenario(&mut rng)?;
        let timeline_seed: u64 = rng.gen();
        let covered = instance.paths.covered();
        let mut rows = Vec::new();
        let mut detection = Vec::new();
        for &kind in &section.strategies {
            let strategy = kind.build(&self.model);
            let trace = run_dynamic(strategy.as_ref(), &instance, &cfg, &truth, timeline_seed)?;
            let mut classified = Vec::with_capacity(trace.steps.len());
            for (step, truth_now) in trace.steps.iter().zip(&trace.truth) {
                let class = Classification {
                    working: step.working.intersection(&covered),
                    broken: step.broken.intersection(&covered),
                    ranking: Vec::new(),
                };
                let (precision, recall) = precision_recall(&class, truth_now, &covered);
                rows.push(DynamicRow {
                    strategy: kind,
                    repetition,
                    step: step.time,
                    path: step.path,
                    outcome: step.outcome,
                    precision,
                    recall,
                    window: step.window_len,
                    contradiction: step.contradiction,
                    dropped: step.dropped,
                });
                classified.push((class.working, class.broken));
            }
            let stats = change_detection(&trace.truth, &classified, &covered);
            let n = rows.len() - trace.steps.len();
            let mean = |f: fn(&DynamicRow) -> f64| {
                let tail = &rows[n..];
                (!tail.is_empty()).then(|| tail.iter().map(f).sum::<f64>() / tail.len() as f64)
            };
            detection.push(DetectionRow {
                strategy: kind,
                repetition,
                mean_precision: mean(|r| r.precision),
                mean_recall: mean(|r| r.recall),
                stats,
            });
        }
        Ok((rows, detection))
    }

    /// Runs the dynamic section for every repetition.
    pub fn run_dynamic(&self, jobs: usize) -> Result<(Vec<DynamicRow>, Vec<DetectionRow>), HarnessError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        let per_rep: Vec<_> =
            pool.install(|| (0..self.config.run.repetitions).into_par_iter().map(|r| self.dynamic_rows(r)).collect());
        let (mut rows, mut detection) = (Vec::new(), Vec::new());
        for r in per_rep {
            let (a, b) = r?;
            rows.extend(a);
            detection.extend(b);
        }
        Ok((rows, detection))
    }
}

fn trace_rows(
    kind: StrategyKind,
    repetition: usize,
    trace: &StrategyTrace,
    baseline: &Classification,
    covered: &NodeSet,
    true_failed: &NodeSet,
    wall: Option<f64>,
) -> Vec<ReportRow> {
    let mut rows = Vec::with_capacity(trace.steps.len() + 1);
    let mut last = None;
    for (i, step) in trace.steps.iter().enumerate() {
        let class = classify(&step.node_scores, covered);
        let (a_w, a_b) = accuracy(&class, baseline);
        let ranks = rank_metrics(&class.ranking, true_failed);
        let row = ReportRow {
            strategy: kind,
            repetition,
            step: Some(i + 1),
            a_w: Some(a_w),
            a_b: Some(a_b),
            r1: ranks.map(|r| r.0),
            r2: ranks.map(|r| r.1),
            probes: i + 1,
            wall: None,
            termination: String::new(),
        };
        last = Some(row.clone());
        rows.push(row);
    }
    let summary = match last {
        Some(r) => ReportRow { step: None, wall, termination: trace.termination.to_string(), ..r },
        None => {
            let class = view_classification(&trace.final_view, covered);
            let (a_w, a_b) = accuracy(&class, baseline);
            ReportRow {
                strategy: kind,
                repetition,
                step: None,
                a_w: Some(a_w),
                a_b: Some(a_b),
                r1: None,
                r2: None,
                probes: 0,
                wall,
                termination: trace.termination.to_string(),
            }
        }
    };
    rows.push(summary);
    rows
}
