//! CSV report rows and writers.

use std::collections::BTreeMap;
use std::path::Path;

use super::HarnessError;
use crate::metrics::{ChangeDetection, DirectionStats};
use crate::strategies::StrategyKind;
use crate::topology::{Outcome, PathId};

/// One line of `report.csv`. Per-step rows carry `step = Some(i)`; the
/// summary row of a (strategy, repetition) has `step = None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub strategy: StrategyKind,
    pub repetition: usize,
    pub step: Option<usize>,
    pub a_w: Option<f64>,
    pub a_b: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub probes: usize,
    pub wall: Option<f64>,
    pub termination: String,
}

impl ReportRow {
    /// Summary row of a run that raised an error.
    pub fn failed(strategy: StrategyKind, repetition: usize, wall: Option<f64>, message: &str) -> Self {
        ReportRow {
            strategy,
            repetition,
            step: None,
            a_w: None,
            a_b: None,
            r1: None,
            r2: None,
            probes: 0,
            wall,
            termination: format!("failed: {message}"),
        }
    }

    pub fn is_summary(&self) -> bool {
        self.step.is_none()
    }

    pub fn is_failed(&self) -> bool {
        self.termination.starts_with("failed")
    }

    /// Position of the row's strategy in the configured list.
    pub fn strategy_rank(&self, order: &[StrategyKind]) -> usize {
        order.iter().position(|k| *k == self.strategy).unwrap_or(order.len())
    }
}

/// One time step of a dynamic run.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicRow {
    pub strategy: StrategyKind,
    pub repetition: usize,
    pub step: usize,
    pub path: PathId,
    pub outcome: Outcome,
    pub precision: f64,
    pub recall: f64,
    pub window: usize,
    pub contradiction: bool,
    pub dropped: usize,
}

/// Change-detection outcome of one dynamic run.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionRow {
    pub strategy: StrategyKind,
    pub repetition: usize,
    pub mean_precision: Option<f64>,
    pub mean_recall: Option<f64>,
    pub stats: ChangeDetection,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Sample mean and standard deviation; the deviation needs two values.
pub fn mean_sd(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = xs.len();
    if n == 0 {
        return (None, None);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (n >= 2).then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
    (Some(mean), sd)
}

fn to_csv(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

type Column = fn(&ReportRow) -> Option<f64>;

pub const REPORT_HEADER: [&str; 10] =
    ["strategy", "repetition", "step", "a_W", "a_B", "R1", "R2", "probesUsed", "wallClockSeconds", "terminationReason"];

pub fn report_csv(rows: &[ReportRow]) -> String {
    to_csv(
        &REPORT_HEADER,
        rows.iter().map(|r| {
            vec![
                r.strategy.to_string(),
                r.repetition.to_string(),
                opt_usize(r.step),
                opt(r.a_w),
                opt(r.a_b),
                opt(r.r1),
                opt(r.r2),
                r.probes.to_string(),
                opt(r.wall),
                r.termination.clone(),
            ]
        }),
    )
}

/// Mean and standard deviation of every summary column, per strategy, in
/// first-appearance order. Failed runs are counted but left out of the
/// averages.
pub fn summary_csv(rows: &[ReportRow]) -> String {
    let mut order: Vec<StrategyKind> = Vec::new();
    let mut groups: BTreeMap<usize, Vec<&ReportRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.is_summary()) {
        let idx = match order.iter().position(|k| *k == r.strategy) {
            Some(i) => i,
            None => {
                order.push(r.strategy);
                order.len() - 1
            }
        };
        groups.entry(idx).or_default().push(r);
    }
    let cols: [(&str, Column); 6] = [
        ("a_W", |r| r.a_w),
        ("a_B", |r| r.a_b),
        ("R1", |r| r.r1),
        ("R2", |r| r.r2),
        ("probesUsed", |r| Some(r.probes as f64)),
        ("wallClockSeconds", |r| r.wall),
    ];
    let names: Vec<String> = cols.iter().flat_map(|(n, _)| [format!("{n}_mean"), format!("{n}_sd")]).collect();
    let mut header = vec!["strategy", "runs", "failedRuns"];
    header.extend(names.iter().map(String::as_str));
    let records = groups.into_iter().map(|(idx, group)| {
        let ok: Vec<&&ReportRow> = group.iter().filter(|r| !r.is_failed()).collect();
        let mut rec = vec![order[idx].to_string(), group.len().to_string(), (group.len() - ok.len()).to_string()];
        for (_, get) in &cols {
            let xs: Vec<f64> = ok.iter().filter_map(|r| get(r)).collect();
            let (m, s) = mean_sd(&xs);
            rec.extend([opt(m), opt(s)]);
        }
        rec
    });
    to_csv(&header, records)
}

pub fn dynamic_csv(rows: &[DynamicRow]) -> String {
    to_csv(
        &[
            "strategy",
            "repetition",
            "step",
            "path",
            "outcome",
            "precision",
            "recall",
            "windowLen",
            "contradiction",
            "dropped",
        ],
        rows.iter().map(|r| {
            vec![
                r.strategy.to_string(),
                r.repetition.to_string(),
                r.step.to_string(),
                r.path.to_string(),
                r.outcome.to_string(),
                r.precision.to_string(),
                r.recall.to_string(),
                r.window.to_string(),
                r.contradiction.to_string(),
                r.dropped.to_string(),
            ]
        }),
    )
}

fn direction(d: &DirectionStats) -> [String; 3] {
    [opt(d.percent()), opt(d.mean_delay()), opt(d.sd_delay())]
}

pub fn detection_csv(rows: &[DetectionRow]) -> String {
    to_csv(
        &[
            "strategy",
            "repetition",
            "meanPrecision",
            "meanRecall",
            "repairs",
            "repairsDetectedPct",
            "repairDelayMean",
            "repairDelaySd",
            "breakdowns",
            "breakdownsDetectedPct",
            "breakdownDelayMean",
            "breakdownDelaySd",
        ],
        rows.iter().map(|r| {
            let mut rec = vec![
                r.strategy.to_string(),
                r.repetition.to_string(),
                opt(r.mean_precision),
                opt(r.mean_recall),
                r.stats.repaired.changes.to_string(),
            ];
            rec.extend(direction(&r.stats.repaired));
            rec.push(r.stats.broken.changes.to_string());
            rec.extend(direction(&r.stats.broken));
            rec
        }),
    )
}

/// Pools the detection rows of each strategy across repetitions.
pub fn detection_summary_csv(rows: &[DetectionRow]) -> String {
    let mut order: Vec<StrategyKind> = Vec::new();
    for r in rows {
        if !order.contains(&r.strategy) {
            order.push(r.strategy);
        }
    }
    let records = order.into_iter().map(|kind| {
        let mut pooled = ChangeDetection::default();
        let mut prec = Vec::new();
        let mut rec = Vec::new();
        for r in rows.iter().filter(|r| r.strategy == kind) {
            for (dst, src) in [(&mut pooled.repaired, &r.stats.repaired), (&mut pooled.broken, &r.stats.broken)] {
                dst.changes += src.changes;
                dst.detected += src.detected;
                dst.delays.extend_from_slice(&src.delays);
            }
            prec.extend(r.mean_precision);
            rec.extend(r.mean_recall);
        }
        let mut out = vec![kind.to_string()];
        out.extend(direction(&pooled.repaired));
        out.extend(direction(&pooled.broken));
        out.extend([opt(mean_sd(&prec).0), opt(mean_sd(&rec).0)]);
        out
    });
    to_csv(
        &[
            "strategy",
            "repairsDetectedPct",
            "repairDelayMean",
            "repairDelaySd",
            "breakdownsDetectedPct",
            "breakdownDelayMean",
            "breakdownDelaySd",
            "precisionMean",
            "recallMean",
        ],
        records,
    )
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), HarnessError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| HarnessError::Io(path, e.to_string()))
}

/// Writes `report.csv` and `summary.csv` into `dir`, creating it if needed.
pub fn write_static(dir: &Path, rows: &[ReportRow]) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(dir.to_path_buf(), e.to_string()))?;
    write(dir, "report.csv", &report_csv(rows))?;
    write(dir, "summary.csv", &summary_csv(rows))
}

/// Writes `dynamic.csv`, `detection.csv` and `summary.csv` into `dir`.
pub fn write_dynamic(dir: &Path, rows: &[DynamicRow], detection: &[DetectionRow]) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(dir.to_path_buf(), e.to_string()))?;
    write(dir, "dynamic.csv", &dynamic_csv(rows))?;
    write(dir, "detection.csv", &detection_csv(detection))?;
    write(dir, "summary.csv", &detection_summary_csv(detection))
}
