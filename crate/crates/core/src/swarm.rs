//! The N-agent walk over one instance for a single value of the control
//! parameter `v`.
//!
//! All agents start in the same city. Every step each agent moves with its
//! current strategy, then the per-step range of travelled distances is split
//! at the threshold `D+ - v (D+ - D-)`. Agents at or below the threshold keep
//! their strategy; the others consult their generator for the next one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{agent_seed, stream, ConsultState, GeneratorKind, Strategy};
use crate::tsplib::Problem;

/// Default overshoot of `v` past 1.
pub const GAMMA: f64 = 0.1;

/// Slack when checking `v <= 1 + gamma`, so that grid points built by
/// floating arithmetic are not rejected at the boundary.
const V_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("start city {start} outside 1..={n}")]
    InvalidStartCity { start: usize, n: usize },
    #[error("need at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("need at least 2 cities, got {0}")]
    TooFewCities(usize),
    #[error("v = {v} outside [0, {max}]")]
    VOutOfRange { v: f64, max: f64 },
    #[error("gamma must be finite and non-negative, got {0}")]
    InvalidGamma(f64),
    #[error("no unvisited city remains")]
    NoUnvisited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_agents: usize,
    pub v: f64,
    pub gamma: f64,
    pub generator: GeneratorKind,
    /// 1-based index into the instance's city list.
    pub start_city: usize,
    pub seed: u64,
    /// Add the edge back to the start city to each agent's final distance.
    pub closed_tour: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_agents: 2000,
            v: 0.0,
            gamma: GAMMA,
            generator: GeneratorKind::Ptm,
            start_city: 1,
            seed: 0,
            closed_tour: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, n_cities: usize) -> Result<(), SimError> {
        if n_cities < 2 {
            return Err(SimError::TooFewCities(n_cities));
        }
        if self.n_agents < 2 {
            return Err(SimError::TooFewAgents(self.n_agents));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(SimError::InvalidGamma(self.gamma));
        }
        check_v(self.v, self.gamma)?;
        if self.start_city == 0 || self.start_city > n_cities {
            return Err(SimError::InvalidStartCity {
                start: self.start_city,
                n: n_cities,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_v(v: f64, gamma: f64) -> Result<(), SimError> {
    let max = 1.0 + gamma;
    if !v.is_finite() || v < 0.0 || v > max + V_SLACK {
        return Err(SimError::VOutOfRange { v, max });
    }
    Ok(())
}

/// Membership over cities with O(1) removal and a dense list of the cities
/// still open.
#[derive(Debug, Clone)]
pub struct VisitSet {
    visited: Vec<bool>,
    open: Vec<u32>,
    slot: Vec<u32>,
}

impl VisitSet {
    /// All `n` cities open.
    pub fn new(n: usize) -> Self {
        Self {
            visited: vec![false; n],
            open: (0..n as u32).collect(),
            slot: (0..n as u32).collect(),
        }
    }

    pub fn contains(&self, city: usize) -> bool {
        self.visited[city]
    }

    /// Marks `city` visited. Returns `false` if it already was.
    pub fn insert(&mut self, city: usize) -> bool {
        if self.visited[city] {
            return false;
        }
        self.visited[city] = true;
        let at = self.slot[city] as usize;
        let last = *self.open.last().expect("an unvisited city is open");
        self.open.swap_remove(at);
        if at < self.open.len() {
            self.slot[last as usize] = at as u32;
        }
        true
    }

    pub fn visited_count(&self) -> usize {
        self.visited.len() - self.open.len()
    }

    /// Unvisited cities, in no particular order.
    pub fn open(&self) -> &[u32] {
        &self.open
    }
}

/// Nearest unvisited city; ties go to the lowest index.
pub fn greedy_next(p: &Problem, position: usize, visited: &VisitSet) -> Result<usize, SimError> {
    let row = p.row(position);
    visited
        .open()
        .iter()
        .map(|&c| (row[c as usize], c as usize))
        .min()
        .map(|(_, c)| c)
        .ok_or(SimError::NoUnvisited)
}

/// Uniform choice among the unvisited cities.
pub fn random_next<R: Rng + ?Sized>(visited: &VisitSet, rng: &mut R) -> Result<usize, SimError> {
    let open = visited.open();
    if open.is_empty() {
        return Err(SimError::NoUnvisited);
    }
    Ok(open[rng.random_range(0..open.len())] as usize)
}

/// Split point `D+ - v (D+ - D-)` of the per-step distance range.
#[inline]
pub fn threshold(d_min: f64, d_max: f64, v: f64) -> f64 {
    d_max - v * (d_max - d_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Successful,
    Unsuccessful,
}

/// The successful interval is closed at the threshold.
#[inline]
pub fn classify(distance: f64, threshold: f64) -> Outcome {
    if distance <= threshold {
        Outcome::Successful
    } else {
        Outcome::Unsuccessful
    }
}

/// Classification against one step's range. When every agent has travelled
/// the same distance the threshold collapses onto it; for `v > 1` the
/// threshold lies below the range by definition, so everyone fails.
#[inline]
pub fn classify_in_step(distance: u64, bounds: &StepBounds, v: f64) -> Outcome {
    if bounds.min == bounds.max && v > 1.0 {
        return Outcome::Unsuccessful;
    }
    classify(distance as f64, bounds.threshold)
}

/// Per-step extremes of the agents' cumulative distances and the resulting
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    pub min: u64,
    pub max: u64,
    pub threshold: f64,
}

/// `N x (n-1)` record of the strategy every agent used at every step, one
/// bit per entry (set bit = greedy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl StrategyMatrix {
    /// All entries `+1`.
    pub fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    /// Builds a matrix from rows of `+1`/`-1`. Panics on any other value or
    /// ragged rows.
    pub fn from_signs(rows: &[Vec<i8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged strategy rows");
            for (j, &s) in row.iter().enumerate() {
                let s = Strategy::from_sign(s).expect("strategy entries are +1 or -1");
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Strategy {
        debug_assert!(i < self.rows && j < self.cols);
        if self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1 {
            Strategy::Greedy
        } else {
            Strategy::Random
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, s: Strategy) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.words + j / 64];
        match s {
            Strategy::Greedy => *w |= 1 << (j % 64),
            Strategy::Random => *w &= !(1 << (j % 64)),
        }
    }

    /// Packed bits of row `i`; bits past `cols` are zero.
    #[inline]
    pub fn row_bits(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Number of `-1` entries in row `i`.
    #[inline]
    pub fn row_greedy_count(&self, i: usize) -> u32 {
        self.row_bits(i).iter().map(|w| w.count_ones()).sum()
    }

    /// Sum of the `+1`/`-1` entries of row `i`.
    #[inline]
    pub fn row_sum(&self, i: usize) -> i64 {
        self.cols as i64 - 2 * i64::from(self.row_greedy_count(i))
    }

    pub fn row_signs(&self, i: usize) -> Vec<i8> {
        (0..self.cols).map(|j| self.get(i, j).sign()).collect()
    }

    pub fn to_signs(&self) -> Vec<Vec<i8>> {
        (0..self.rows).map(|i| self.row_signs(i)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct AgentState {
    pub position: usize,
    pub visited: VisitSet,
    pub distance: u64,
    pub last_strategy: Strategy,
    pub consult: ConsultState,
    rng: ChaCha8Rng,
}

impl AgentState {
    fn new(n: usize, start: usize, kind: GeneratorKind, run_seed: u64, index: usize) -> Self {
        let mut visited = VisitSet::new(n);
        visited.insert(start);
        Self {
            position: start,
            visited,
            distance: 0,
            last_strategy: Strategy::Random,
            consult: ConsultState::new(kind, agent_seed(run_seed, index, stream::CONSULT)),
            rng: ChaCha8Rng::seed_from_u64(agent_seed(run_seed, index, stream::MOVES)),
        }
    }

    fn step(&mut self, p: &Problem, strategy: Strategy) -> Result<(), SimError> {
        let next = match strategy {
            Strategy::Random => random_next(&self.visited, &mut self.rng)?,
            Strategy::Greedy => greedy_next(p, self.position, &self.visited)?,
        };
        self.distance += u64::from(p.dist(self.position, next));
        self.visited.insert(next);
        self.position = next;
        self.last_strategy = strategy;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final travelled distance of each agent.
    pub distances: Vec<u64>,
    /// Arithmetic mean of `distances`.
    pub mean_distance: f64,
    pub strategy_matrix: StrategyMatrix,
    /// Range and threshold after each of the `n-1` steps.
    pub step_bounds: Vec<StepBounds>,
    /// Total generator consultations across all agents.
    pub consultations: u64,
}

/// Runs the full `n-1` step walk. Deterministic in `cfg.seed`.
pub fn run_simulation(p: &Problem, cfg: &SimConfig) -> Result<RunResult, SimError> {
    simulate(p, cfg, false).map(|(r, _)| r)
}

/// As [`run_simulation`], also returning each agent's visiting order as
/// 0-based city indices, start city first.
pub fn run_simulation_with_paths(p: &Problem, cfg: &SimConfig) -> Result<(RunResult, Vec<Vec<u32>>), SimError> {
    simulate(p, cfg, true).map(|(r, paths)| (r, paths.unwrap_or_default()))
}

type Paths = Vec<Vec<u32>>;

fn simulate(p: &Problem, cfg: &SimConfig, record: bool) -> Result<(RunResult, Option<Paths>), SimError> {
    let n = p.n();
    cfg.validate(n)?;
    let start = cfg.start_city - 1;
    let steps = n - 1;
    let mut agents: Vec<AgentState> = (0..cfg.n_agents)
        .map(|i| AgentState::new(n, start, cfg.generator, cfg.seed, i))
        .collect();
    let mut next: Vec<Strategy> = vec![Strategy::Random; cfg.n_agents];
    let mut matrix = StrategyMatrix::new(cfg.n_agents, steps);
    let mut step_bounds = Vec::with_capacity(steps);
    let mut paths: Option<Paths> = record.then(|| {
        (0..cfg.n_agents)
            .map(|_| {
                let mut v = Vec::with_capacity(n);
                v.push(start as u32);
                v
            })
            .collect()
    });

    for j in 0..steps {
        for (i, (agent, &s)) in agents.iter_mut().zip(&next).enumerate() {
            matrix.set(i, j, s);
            agent.step(p, s)?;
            if let Some(paths) = paths.as_mut() {
                paths[i].push(agent.position as u32);
            }
        }

        let (min, max) = agents
            .iter()
            .fold((u64::MAX, 0), |(lo, hi), a| (lo.min(a.distance), hi.max(a.distance)));
        let bounds = StepBounds {
            min,
            max,
            threshold: threshold(min as f64, max as f64, cfg.v),
        };
        step_bounds.push(bounds);

        if j + 1 < steps {
            for (agent, s) in agents.iter_mut().zip(next.iter_mut()) {
                if classify_in_step(agent.distance, &bounds, cfg.v) == Outcome::Unsuccessful {
                    *s = agent.consult.consult();
                }
            }
        }
    }

    if cfg.closed_tour {
        for a in &mut agents {
            a.distance += u64::from(p.dist(a.position, start));
        }
    }

    let distances: Vec<u64> = agents.iter().map(|a| a.distance).collect();
    let total: u64 = distances.iter().sum();
    let consultations = agents.iter().map(|a| a.consult.consultations()).sum();
    let result = RunResult {
        mean_distance: total as f64 / cfg.n_agents as f64,
        distances,
        strategy_matrix: matrix,
        step_bounds,
        consultations,
    };
    Ok((result, paths))
}
