//! Declarative run configuration: an optional TOML file, overridden by
//! command-line flags, resolved into a [`SweepConfig`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use ptmswarm::experiment::{stepped_grid, Scale, DESK_INSTANCES, PAPER_INSTANCES};
use ptmswarm::{GeneratorKind, SweepConfig};

/// Grid given either as `start:step:end` or as an explicit list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn parse_flag(s: &str) -> Result<Self> {
        if s.contains(':') {
            Ok(GridSpec::Range(s.to_string()))
        } else {
            let values = s
                .split(',')
                .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad grid value `{t}`")))
                .collect::<Result<Vec<_>>>()?;
            Ok(GridSpec::List(values))
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Range(s) => {
                let parts: Vec<&str> = s.split(':').collect();
                let [a, step, b] = parts[..] else {
                    bail!("grid range must be start:step:end, got `{s}`");
                };
                let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad grid bound `{t}`"));
                stepped_grid(num(a)?, num(step)?, num(b)?).map_err(anyhow::Error::msg)
            }
        }
    }
}

/// Every field optional; unset fields fall back to the scale profile.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub scale: Option<Scale>,
    pub generator: Option<GeneratorKind>,
    pub seed: Option<u64>,
    pub agents: Option<usize>,
    pub reps: Option<usize>,
    pub grid: Option<GridSpec>,
    pub instances: Option<Vec<PathBuf>>,
    pub data_dir: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub start_city: Option<usize>,
    pub closed_tour: Option<bool>,
    pub rerun_at_star: Option<bool>,
}

impl RunSettings {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: RunSettings) -> Self {
        Self {
            scale: over.scale.or(self.scale),
            generator: over.generator.or(self.generator),
            seed: over.seed.or(self.seed),
            agents: over.agents.or(self.agents),
            reps: over.reps.or(self.reps),
            grid: over.grid.or(self.grid),
            instances: over.instances.or(self.instances),
            data_dir: over.data_dir.or(self.data_dir),
            gamma: over.gamma.or(self.gamma),
            start_city: over.start_city.or(self.start_city),
            closed_tour: over.closed_tour.or(self.closed_tour),
            rerun_at_star: over.rerun_at_star.or(self.rerun_at_star),
        }
    }

    /// Default data directory for named instances.
    pub const DEFAULT_DATA_DIR: &'static str = "data/tsplib";

    pub fn resolve(&self) -> Result<SweepConfig> {
        let scale = self.scale.unwrap_or(Scale::Desk);
        let mut cfg = SweepConfig::for_scale(scale);
        if let Some(g) = self.generator {
            cfg.generator = g;
        }
        if let Some(s) = self.seed {
            cfg.seed_base = s;
        }
        if let Some(n) = self.agents {
            cfg.n_agents = n;
        }
        if let Some(r) = self.reps {
            cfg.repetitions = r;
        }
        if let Some(grid) = &self.grid {
            cfg.v_grid = grid.values()?;
        }
        if let Some(g) = self.gamma {
            cfg.gamma = g;
        }
        if let Some(s) = self.start_city {
            cfg.start_city = s;
        }
        if let Some(c) = self.closed_tour {
            cfg.closed_tour = c;
        }
        if let Some(r) = self.rerun_at_star {
            cfg.rerun_at_star = r;
        }
        cfg.problems = match &self.instances {
            Some(paths) => paths.clone(),
            None => {
                let dir = self
                    .data_dir
                    .clone()
                    .unwrap_or_else(|| PathBuf::from(Self::DEFAULT_DATA_DIR));
                let names: &[&str] = match scale {
                    Scale::Desk => &DESK_INSTANCES,
                    Scale::Paper => &PAPER_INSTANCES,
                };
                names.iter().map(|n| dir.join(format!("{n}.tsp"))).collect()
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
