//! Criterion benchmarks for the hot paths of `ptmswarm`: the swarm walk,
//! the correlation trace and the problem complexity. Run with
//! `cargo bench -p ptmswarm-bench`.
