use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use probetomo::harness::{write_dynamic, write_static, Experiment, ExperimentConfig};
use probetomo::oracle::Oracle;
use probetomo::topology::{parse_path_fixture, parse_topology, Observation, Outcome, PathTable, TopologyFormat};
use probetomo::utility::{alpha_bound, BoundInputs};

#[derive(Parser)]
#[command(name = "probetomo", version, about = "Adaptive path probing for node failure localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the static strategies of a config; writes report.csv and summary.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the dynamic section of a config; writes dynamic.csv, detection.csv and summary.csv.
    Dynamic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print brute-force posteriors of a path fixture.
    Oracle {
        /// One path per line, comma-separated node labels.
        #[arg(long)]
        paths: PathBuf,
        #[arg(long)]
        prior: f64,
        /// Topology to validate the paths against; without it labels are
        /// taken from the fixture itself.
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long, default_value = "gml")]
        format: TopologyFormat,
        /// Observed outcome as `<path id>:w` or `<path id>:f`; repeatable.
        #[arg(long)]
        observe: Vec<String>,
    },
    /// Print the approximation-ratio bound for the given inputs as one CSV row.
    Bound {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        deg_max: u32,
        #[arg(long)]
        len_max: u32,
        #[arg(long)]
        cand_len: u32,
        #[arg(long)]
        f1: u32,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Path table straight from a fixture, labels numbered by first appearance.
fn label_only_table(text: &str) -> Result<(Vec<String>, PathTable)> {
    let mut labels: Vec<String> = Vec::new();
    let mut seqs = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let seq = line
            .split(',')
            .map(|l| {
                let l = l.trim();
                match labels.iter().position(|x| x == l) {
                    Some(i) => i,
                    None => {
                        labels.push(l.to_string());
                        labels.len() - 1
                    }
                }
            })
            .collect();
        seqs.push(seq);
    }
    let table = PathTable::from_sequences(labels.len(), seqs)?;
    Ok((labels, table))
}

fn parse_observation(s: &str) -> Result<Observation> {
    let (id, out) = s.split_once(':').with_context(|| format!("observation `{s}` is not <id>:<w|f>"))?;
    let outcome = match out {
        "w" => Outcome::Working,
        "f" => Outcome::Failed,
        _ => bail!("outcome in `{s}` must be w or f"),
    };
    Ok(Observation::new(id.parse().with_context(|| format!("path id in `{s}`"))?, outcome))
}

fn oracle(paths: &Path, prior: f64, topology: Option<&Path>, format: TopologyFormat, observe: &[String]) -> Result<()> {
    let text = read(paths)?;
    let (labels, table) = match topology {
        Some(t) => {
            let graph = parse_topology(&read(t)?, format)?;
            let table = parse_path_fixture(&text, &graph)?;
            (graph.labels().to_vec(), table)
        }
        None => label_only_table(&text)?,
    };
    let obs: Vec<Observation> = observe.iter().map(|s| parse_observation(s)).collect::<Result<_>>()?;
    if let Some(o) = obs.iter().find(|o| o.path >= table.len()) {
        bail!("path {} out of range", o.path);
    }
    if !(0.0..=1.0).contains(&prior) {
        bail!("prior {prior} is not a probability");
    }
    let oracle = Oracle::new(&table, prior);
    let report = oracle.report(&obs).context("observations have zero probability")?;
    println!("kind,id,label,probability");
    println!("joint,,,{}", report.joint);
    for (i, p) in report.path_working.iter().enumerate() {
        println!("pathWorking,{i},,{p}");
    }
    for (v, p) in report.node_failure.iter().enumerate() {
        println!("nodeFailure,{v},{},{p}", labels[v]);
    }
    Ok(())
}

fn bound(p: f64, deg_max: u32, len_max: u32, cand_len: u32, f1: u32) -> Result<()> {
    let given = alpha_bound(BoundInputs { p, path_len_max: len_max, deg_max, candidate_len: cand_len, f1_count: f1 })?;
    let widest =
        alpha_bound(BoundInputs { p, path_len_max: len_max, deg_max, candidate_len: len_max, f1_count: len_max })?;
    println!("delta_min,delta_max,alpha,delta_min_at_maxima,alpha_at_maxima");
    println!("{},{},{},{},{}", given.delta_min, given.delta_max, given.alpha, widest.delta_min, widest.alpha);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, out, jobs } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = Experiment::new(cfg)?.run(jobs)?;
            write_static(&out, &rows)?;
        }
        Command::Dynamic { config, out, jobs } => {
            let cfg = ExperimentConfig::load(&config)?;
            if cfg.dynamic.is_none() {
                bail!("{} has no [dynamic] section", config.display());
            }
            let (rows, detection) = Experiment::new(cfg)?.run_dynamic(jobs)?;
            write_dynamic(&out, &rows, &detection)?;
        }
        Command::Oracle { paths, prior, topology, format, observe } => {
            oracle(&paths, prior, topology.as_deref(), format, &observe)?
        }
        Command::Bound { p, deg_max, len_max, cand_len, f1 } => bound(p, deg_max, len_max, cand_len, f1)?,
    }
    Ok(())
}
