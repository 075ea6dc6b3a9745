//! Experiment configuration file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::strategies::StrategyKind;
use crate::topology::TopologyFormat;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySection,
    #[serde(default)]
    pub failures: FailureMode,
    #[serde(default)]
    pub model: ModelSection,
    pub run: RunSection,
    pub dynamic: Option<DynamicSection>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    /// Topology file, relative to the config file.
    pub file: PathBuf,
    pub format: TopologyFormat,
    /// Optional explicit path list; replaces monitor placement and routing.
    pub paths: Option<PathBuf>,
    /// Monitors drawn at random per repetition.
    #[serde(default = "default_monitors")]
    pub monitors: usize,
    /// Routes generated per ordered monitor pair.
    #[serde(default = "default_one")]
    pub paths_per_pair: usize,
}

/// How the broken nodes of a repetition are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum FailureMode {
    /// Exactly `k` broken nodes, uniform over the monitored nodes.
    Fixed { k: usize },
    /// Every node broken independently with probability `p`.
    Iid { p: f64 },
}

impl Default for FailureMode {
    fn default() -> Self {
        FailureMode::Fixed { k: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_tenth")]
    pub prior: f64,
    #[serde(default = "default_tenth")]
    pub c0: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            prior: default_tenth(),
            c0: default_tenth(),
            epsilon: default_epsilon(),
            capacity: default_capacity(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// Each strategy runs until it stops on its own.
    UntilConvergence,
    /// Every strategy gets as many probes as FaCeGreedy used.
    BoundedByFace,
    /// A fixed number of probes, `budget_k`.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub strategies: Vec<StrategyKind>,
    #[serde(default = "default_budget")]
    pub budget: BudgetMode,
    pub budget_k: Option<usize>,
    #[serde(default = "default_one")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    /// Fill the wall-clock column. Off by default so reports are
    /// byte-identical across runs.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicSection {
    pub p_wf: f64,
    pub p_fw: f64,
    pub window: usize,
    pub horizon: usize,
    pub strategies: Vec<StrategyKind>,
}

fn default_monitors() -> usize {
    10
}

fn default_one() -> usize {
    1
}

fn default_tenth() -> f64 {
    0.1
}

fn default_epsilon() -> f64 {
    0.05
}

fn default_capacity() -> usize {
    crate::bayes::DEFAULT_CAPACITY
}

fn default_budget() -> BudgetMode {
    BudgetMode::UntilConvergence
}

fn invalid(field: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Invalid { field: field.to_string(), message: message.into() }
}

fn check_prob(field: &str, p: f64) -> Result<(), HarnessError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(field, format!("{p} is not a probability")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Syntax(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative topology paths resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(path.to_path_buf(), e.to_string()))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.topology.file = base.join(&cfg.topology.file);
        cfg.topology.paths = cfg.topology.paths.map(|p| base.join(p));
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.run.strategies.is_empty() {
            return Err(invalid("run.strategies", "must name at least one strategy"));
        }
        if let Some(k) = self.run.strategies.iter().find(|k| k.is_dynamic()) {
            return Err(invalid("run.strategies", format!("`{k}` belongs in dynamic.strategies")));
        }
        if self.run.repetitions == 0 {
            return Err(invalid("run.repetitions", "must be at least 1"));
        }
        match self.run.budget {
            BudgetMode::BoundedByFace if !self.run.strategies.contains(&StrategyKind::Face) => {
                return Err(invalid("run.budget", "bounded_by_face requires `face` among the strategies"))
            }
            BudgetMode::Fixed if self.run.budget_k.is_none() => {
                return Err(invalid("run.budget_k", "required when budget = \"fixed\""))
            }
            _ => {}
        }
        check_prob("model.prior", self.model.prior)?;
        check_prob("model.c0", self.model.c0)?;
        if self.model.epsilon.is_nan() || self.model.epsilon <= 0.0 {
            return Err(invalid("model.epsilon", "must be positive"));
        }
        if let FailureMode::Iid { p } = self.failures {
            check_prob("failures.p", p)?;
        }
        if self.topology.paths.is_none() && self.topology.monitors < 2 {
            return Err(invalid("topology.monitors", "need at least two monitors"));
        }
        if self.topology.paths_per_pair == 0 {
            return Err(invalid("topology.paths_per_pair", "must be at least 1"));
        }
        if let Some(d) = &self.dynamic {
            check_prob("dynamic.p_wf", d.p_wf)?;
            check_prob("dynamic.p_fw", d.p_fw)?;
            if d.p_wf > d.p_fw {
                return Err(invalid("dynamic.p_wf", "must not exceed dynamic.p_fw"));
            }
            if d.window == 0 {
                return Err(invalid("dynamic.window", "must be at least 1"));
            }
            if let Some(k) = d.strategies.iter().find(|k| !k.is_dynamic()) {
                return Err(invalid("dynamic.strategies", format!("`{k}` is not a dynamic strategy")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[topology]
file = "g.gml"
format = "gml"

[run]
strategies = ["pop", "face"]
"#;

    #[test]
    fn minimal_config_defaults() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.run.repetitions, 1);
        assert_eq!(c.failures, FailureMode::Fixed { k: 1 });
        assert_eq!(c.model.prior, 0.1);
        assert_eq!(c.run.budget, BudgetMode::UntilConvergence);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = BASE.replace("format = \"gml\"", "format = \"gml\"\nmonitor = 3");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Syntax(_))));
        let text = format!("{BASE}\n[failures]\nmode = \"fixed\"\nk = 2\nq = 1\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn empty_strategies_rejected() {
        let text = BASE.replace("[\"pop\", \"face\"]", "[]");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("run.strategies"), "{err}");
    }

    #[test]
    fn face_budget_requires_face() {
        let text = BASE.replace("[\"pop\", \"face\"]", "[\"pop\"]\nbudget = \"bounded_by_face\"");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("run.budget"), "{err}");
    }

    #[test]
    fn iid_failures_parse() {
        let text = format!("{BASE}\n[failures]\nmode = \"iid\"\np = 0.2\n");
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap().failures, FailureMode::Iid { p: 0.2 });
    }
}
