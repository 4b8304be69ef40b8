//! The sweep protocol: for every grid value of `v` run the swarm several
//! times, average the mean distances into a performance curve, locate its
//! grid minimum and keep the runs made there for the complexity analysis.
//!
//! All `(v, repetition)` jobs are independent and fan out over the rayon
//! pool; results are joined in grid order, so every number is independent of
//! scheduling.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{derive_seed, hash_str, GeneratorKind};
use crate::metrics::{complexity_from_summaries, correlation_quad_trace, CorrelationSummary, MetricsError};
use crate::regression::ComplexityPoint;
use crate::swarm::{check_v, run_simulation, RunResult, SimConfig, SimError, GAMMA};
use crate::tsplib::{problem_complexity, read_tsplib, Problem, TsplibError};

/// Instances used by the desk-scale profile.
pub const DESK_INSTANCES: [&str; 5] = ["eil76", "st70", "kroA100", "pr76", "lin105"];

/// The full benchmark set. The original list names pr144 twice; it appears
/// once here.
pub const PAPER_INSTANCES: [&str; 19] = [
    "eil76", "eil101", "st70", "rat195", "lin105", "kroC100", "kroB100", "kroA100", "kroD100", "d198", "kroA150",
    "pr107", "u159", "pr144", "pr152", "pr226", "pr136", "pr76", "ts225",
];

/// Extra seed word separating fresh runs at `v*` from the sweep's own runs.
const RERUN_TAG: u64 = 0x5245_5255_4E00_0000;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("instance {path}: {source}")]
    Instance {
        path: PathBuf,
        #[source]
        source: TsplibError,
    },
    #[error("{problem}: {source}")]
    Complexity {
        problem: String,
        #[source]
        source: TsplibError,
    },
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Paper,
}

impl std::str::FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(format!("unknown scale `{other}` (expected desk or paper)")),
        }
    }
}

/// `v_i = i / denominator` for `i = 0..=last`. Integer numerators keep the
/// end point exact (e.g. `22 / 20 == 1.1`).
pub fn rational_grid(denominator: u32, last: u32) -> Vec<f64> {
    (0..=last).map(|i| f64::from(i) / f64::from(denominator)).collect()
}

/// Evenly spaced grid `start, start + step, ..., end`.
pub fn stepped_grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(format!("bad grid {start}:{step}:{end}"));
    }
    let count = ((end - start) / step).round() as u64;
    if ((start + count as f64 * step) - end).abs() > 1e-9 * step.max(1.0) {
        return Err(format!("step {step} does not divide [{start}, {end}]"));
    }
    let inv = 1.0 / step;
    let rational = (inv - inv.round()).abs() < 1e-9 && (start * inv - (start * inv).round()).abs() < 1e-9;
    Ok((0..=count)
        .map(|i| {
            if rational {
                ((start * inv).round() + i as f64) / inv.round()
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub v_grid: Vec<f64>,
    pub repetitions: usize,
    pub n_agents: usize,
    pub generator: GeneratorKind,
    pub problems: Vec<PathBuf>,
    pub seed_base: u64,
    pub gamma: f64,
    /// 1-based.
    pub start_city: usize,
    pub closed_tour: bool,
    /// Recompute the complexity from fresh runs at `v*` instead of reusing
    /// the sweep's runs there.
    pub rerun_at_star: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl SweepConfig {
    /// N = 2000, 10 repetitions, `v = 0, 0.05, ..., 1.10`.
    pub fn paper() -> Self {
        Self {
            v_grid: rational_grid(20, 22),
            repetitions: 10,
            n_agents: 2000,
            generator: GeneratorKind::Ptm,
            problems: Vec::new(),
            seed_base: 0,
            gamma: GAMMA,
            start_city: 1,
            closed_tour: false,
            rerun_at_star: false,
        }
    }

    /// N = 200, 5 repetitions, `v = 0, 0.1, ..., 1.1`.
    pub fn desk() -> Self {
        Self {
            v_grid: rational_grid(10, 11),
            repetitions: 5,
            n_agents: 200,
            ..Self::paper()
        }
    }

    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Desk => Self::desk(),
            Scale::Paper => Self::paper(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidConfig(m));
        if self.v_grid.is_empty() {
            return bad("empty v grid".into());
        }
        if self.v_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("v grid must be strictly increasing".into());
        }
        for &v in &self.v_grid {
            if check_v(v, self.gamma).is_err() {
                return bad(format!("v = {v} outside [0, {}]", 1.0 + self.gamma));
            }
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.n_agents < 2 {
            return bad(format!("need at least 2 agents, got {}", self.n_agents));
        }
        Ok(())
    }

    pub fn sim_config(&self, v: f64, seed: u64) -> SimConfig {
        SimConfig {
            n_agents: self.n_agents,
            v,
            gamma: self.gamma,
            generator: self.generator,
            start_city: self.start_city,
            seed,
            closed_tour: self.closed_tour,
        }
    }

    /// Seed of one run. Depends on the problem, the value of `v` and the
    /// repetition, never on the job's position in the schedule.
    pub fn run_seed(&self, problem: &str, v: f64, repetition: usize) -> u64 {
        derive_seed(&[self.seed_base, hash_str(problem), v.to_bits(), repetition as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub v: f64,
    /// Mean of the per-run mean distances.
    pub d_bar: f64,
    /// Sample standard deviation of the per-run means (0 for one run).
    pub d_std: f64,
    pub n_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnimodalityReport {
    /// Strict local minima, endpoints included.
    pub n_local_minima: usize,
    pub argmin: usize,
    /// `true` when the minimum is not at either end of the grid.
    pub interior_optimum: bool,
    /// Largest rise before the minimum or fall after it, in distance units.
    pub violation_abs: f64,
    /// `violation_abs` as a fraction of `max - min` of the curve.
    pub violation_frac: f64,
}

/// Measures how far a sampled curve is from having a single valley.
///
/// Left of the grid minimum the curve should not rise, right of it it should
/// not fall. The largest such excursion is the violation.
pub fn unimodality_check(values: &[f64]) -> UnimodalityReport {
    let n = values.len();
    if n == 0 {
        return UnimodalityReport {
            n_local_minima: 0,
            argmin: 0,
            interior_optimum: false,
            violation_abs: 0.0,
            violation_frac: 0.0,
        };
    }
    let argmin = grid_argmin(values);
    let n_local_minima = (0..n)
        .filter(|&i| {
            let left = i == 0 || values[i] < values[i - 1];
            let right = i + 1 == n || values[i] < values[i + 1];
            n > 1 && left && right
        })
        .count();

    let mut violation = 0.0f64;
    let mut lowest = f64::INFINITY;
    for &y in &values[..=argmin] {
        violation = violation.max(y - lowest);
        lowest = lowest.min(y);
    }
    let mut lowest = f64::INFINITY;
    for &y in values[argmin..].iter().rev() {
        violation = violation.max(y - lowest);
        lowest = lowest.min(y);
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let range = hi - lo;
    UnimodalityReport {
        n_local_minima,
        argmin,
        interior_optimum: argmin > 0 && argmin + 1 < n,
        violation_abs: violation,
        violation_frac: if range > 0.0 { violation / range } else { 0.0 },
    }
}

/// First index of the minimum (ties go to the smaller `v`).
fn grid_argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &y)| if y < values[best] { i } else { best })
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub problem: String,
    pub n_cities: usize,
    pub curve: Vec<CurvePoint>,
    /// Mean distance of every run, `[grid index][repetition]`.
    pub run_means: Vec<Vec<f64>>,
    pub star_index: usize,
    pub v_star: f64,
    pub best_d_bar: f64,
    /// Runs whose strategy matrices feed the algorithm complexity.
    pub runs_at_star: Vec<RunResult>,
    /// Correlation summary of each run in `runs_at_star`.
    pub star_summaries: Vec<CorrelationSummary>,
    pub unimodality: UnimodalityReport,
}

impl SweepResult {
    pub fn algorithm_complexity(&self) -> Result<f64, MetricsError> {
        complexity_from_summaries(&self.star_summaries)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs the full grid for one problem.
pub fn sweep(p: &Problem, cfg: &SweepConfig) -> Result<SweepResult, ExperimentError> {
    cfg.validate()?;
    cfg.sim_config(0.0, 0).validate(p.n())?;
    let reps = cfg.repetitions;
    let jobs: Vec<(usize, usize)> = (0..cfg.v_grid.len())
        .flat_map(|vi| (0..reps).map(move |r| (vi, r)))
        .collect();

    let mut runs: Vec<Option<RunResult>> = jobs
        .par_iter()
        .map(|&(vi, r)| {
            let v = cfg.v_grid[vi];
            run_simulation(p, &cfg.sim_config(v, cfg.run_seed(p.name(), v, r))).map(Some)
        })
        .collect::<Result<_, _>>()?;

    let run_means: Vec<Vec<f64>> = runs
        .chunks(reps)
        .map(|c| c.iter().map(|r| r.as_ref().expect("filled").mean_distance).collect())
        .collect();
    let curve: Vec<CurvePoint> = cfg
        .v_grid
        .iter()
        .zip(&run_means)
        .map(|(&v, means)| {
            let (d_bar, d_std) = mean_std(means);
            CurvePoint {
                v,
                d_bar,
                d_std,
                n_runs: means.len(),
            }
        })
        .collect();
    let d_bars: Vec<f64> = curve.iter().map(|c| c.d_bar).collect();
    let star_index = grid_argmin(&d_bars);
    let v_star = cfg.v_grid[star_index];

    let runs_at_star: Vec<RunResult> = if cfg.rerun_at_star {
        (0..reps)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(&[cfg.run_seed(p.name(), v_star, r), RERUN_TAG]);
                run_simulation(p, &cfg.sim_config(v_star, seed))
            })
            .collect::<Result<_, _>>()?
    } else {
        runs[star_index * reps..(star_index + 1) * reps]
            .iter_mut()
            .map(|r| r.take().expect("filled"))
            .collect()
    };
    drop(runs);

    let star_summaries = runs_at_star
        .par_iter()
        .map(|r| correlation_quad_trace(&r.strategy_matrix))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(SweepResult {
        problem: p.name().to_string(),
        n_cities: p.n(),
        unimodality: unimodality_check(&d_bars),
        best_d_bar: d_bars[star_index],
        curve,
        run_means,
        star_index,
        v_star,
        runs_at_star,
        star_summaries,
    })
}

/// Everything produced by one pass over the configured problem set.
#[derive(Debug, Clone)]
pub struct ProblemOutcome {
    pub path: PathBuf,
    pub sweep: SweepResult,
    pub point: ComplexityPoint,
}

/// Loads an instance, naming the file on failure.
pub fn load_problem(path: &Path) -> Result<Problem, ExperimentError> {
    read_tsplib(path).map_err(|source| ExperimentError::Instance {
        path: path.to_path_buf(),
        source,
    })
}

/// Complexity point for one problem from its sweep.
pub fn complexity_point(p: &Problem, sweep: &SweepResult) -> Result<ComplexityPoint, ExperimentError> {
    let x = problem_complexity(p).map_err(|source| ExperimentError::Complexity {
        problem: p.name().to_string(),
        source,
    })?;
    Ok(ComplexityPoint::new(p.name(), x, sweep.algorithm_complexity()?))
}

/// Sweeps every configured problem in order.
pub fn run_experiment(cfg: &SweepConfig) -> Result<Vec<ProblemOutcome>, ExperimentError> {
    cfg.validate()?;
    let problems = cfg
        .problems
        .iter()
        .map(|path| load_problem(path))
        .collect::<Result<Vec<_>, _>>()?;
    problems
        .iter()
        .zip(&cfg.problems)
        .map(|(p, path)| {
            let sweep = sweep(p, cfg)?;
            let point = complexity_point(p, &sweep)?;
            Ok(ProblemOutcome {
                path: path.clone(),
                sweep,
                point,
            })
        })
        .collect()
}

/// One `(C(p), C(A(p)))` point per configured problem.
pub fn collect_points(cfg: &SweepConfig) -> Result<Vec<ComplexityPoint>, ExperimentError> {
    Ok(run_experiment(cfg)?.into_iter().map(|o| o.point).collect())
}
