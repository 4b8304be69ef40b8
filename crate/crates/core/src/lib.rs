//! Multi-agent walkers over TSPLIB instances whose strategy switching is
//! driven by the Prouhet-Thue-Morse sequence (or a fair coin), together with
//! the complexity metrics and the parameter-sweep protocol used to relate the
//! swarm's correlation structure to the instance's distance structure.
//!
//! Modules, bottom up:
//!
//! - [`tsplib`]: instance parsing, distances, problem complexity
//! - [`generators`]: PTM and random consultation generators, seed derivation
//! - [`swarm`]: one run of the N-agent walk for a fixed `v`
//! - [`metrics`]: agent correlation trace and algorithm complexity
//! - [`experiment`]: v-grid sweeps, optimum location, complexity points
//! - [`regression`]: OLS fit and generator comparison

pub mod experiment;
pub mod generators;
pub mod metrics;
pub mod regression;
pub mod swarm;
pub mod tsplib;

pub use experiment::{
    collect_points, run_experiment, sweep, unimodality_check, Scale, SweepConfig, SweepResult, UnimodalityReport,
};
pub use generators::{ptm_bit, ConsultState, GeneratorKind, Strategy};
pub use metrics::{algorithm_complexity, correlation_quad_trace, CorrelationSummary};
pub use regression::{compare_generators, fit_ols, ComparisonReport, ComplexityPoint, RegressionFit};
pub use swarm::{run_simulation, run_simulation_with_paths, RunResult, SimConfig, StrategyMatrix};
pub use tsplib::{parse_tsplib, problem_complexity, read_tsplib, City, Problem};
