mod common;

use common::*;
use proptest::prelude::*;

use ptmswarm::experiment::{complexity_point, rational_grid, sweep};
use ptmswarm::{algorithm_complexity, run_simulation, GeneratorKind, Problem, SweepConfig};

fn small_cfg(reps: usize, n_agents: usize, seed: u64) -> SweepConfig {
    SweepConfig {
        v_grid: rational_grid(10, 11),
        repetitions: reps,
        n_agents,
        seed_base: seed,
        ..SweepConfig::desk()
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sweep_is_identical_across_thread_counts() {
    let p = lattice(40);
    let cfg = small_cfg(3, 30, 5);
    let a = in_pool(1, || sweep(&p, &cfg).unwrap());
    let b = in_pool(4, || sweep(&p, &cfg).unwrap());
    assert_eq!(a.curve, b.curve);
    assert_eq!(a.run_means, b.run_means);
    assert_eq!(a.star_summaries, b.star_summaries);
    assert_eq!(a.algorithm_complexity().unwrap(), b.algorithm_complexity().unwrap());
}

#[test]
fn star_matrices_are_the_runs_at_v_star() {
    let p = lattice(35);
    let cfg = small_cfg(4, 25, 9);
    let s = sweep(&p, &cfg).unwrap();
    assert_eq!(s.v_star, cfg.v_grid[s.star_index]);
    let matrices: Vec<_> = (0..cfg.repetitions)
        .map(|r| {
            let seed = cfg.run_seed(p.name(), s.v_star, r);
            run_simulation(&p, &cfg.sim_config(s.v_star, seed))
                .unwrap()
                .strategy_matrix
        })
        .collect();
    for (run, m) in s.runs_at_star.iter().zip(&matrices) {
        assert_eq!(&run.strategy_matrix, m);
    }
    let direct = algorithm_complexity(&matrices).unwrap();
    assert!((direct - s.algorithm_complexity().unwrap()).abs() <= 1e-15);
    let means: Vec<f64> = s.runs_at_star.iter().map(|r| r.mean_distance).collect();
    assert_eq!(means, s.run_means[s.star_index]);
}

#[test]
fn single_point_grids_hit_the_anchors() {
    let p = lattice(30);
    for (v, expected) in [(0.0, 1.0 / 40.0), (1.1, 1.0)] {
        let cfg = SweepConfig {
            v_grid: vec![v],
            ..small_cfg(3, 40, 1)
        };
        let s = sweep(&p, &cfg).unwrap();
        assert_eq!(s.algorithm_complexity().unwrap(), expected, "v = {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sweep_invariants(p in problem(4..=30), reps in 1usize..=3, seed in any::<u64>(), random in any::<bool>()) {
        let mut cfg = small_cfg(reps, 12, seed);
        if random {
            cfg.generator = GeneratorKind::Random;
        }
        let s = sweep(&p, &cfg).unwrap();
        prop_assert_eq!(s.curve.len(), cfg.v_grid.len());
        for (c, means) in s.curve.iter().zip(&s.run_means) {
            prop_assert_eq!(c.n_runs, reps);
            prop_assert_eq!(means.len(), reps);
            if reps == 1 {
                prop_assert_eq!(c.d_std, 0.0);
                prop_assert_eq!(c.d_bar, means[0]);
            }
        }
        prop_assert!(cfg.v_grid.contains(&s.v_star));
        let min = s.curve.iter().map(|c| c.d_bar).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(s.best_d_bar, min);
        prop_assert!(s.curve[..s.star_index].iter().all(|c| c.d_bar > min));

        let pt = complexity_point(&p, &s).unwrap();
        prop_assert!(pt.x > 0.0 && pt.x <= 1.0);
        prop_assert!(pt.y >= 1.0 / 12.0 - 1e-15 && pt.y <= 1.0 + 1e-15);

        let again = sweep(&p, &cfg).unwrap();
        prop_assert_eq!(&again.curve, &s.curve);
        prop_assert_eq!(&again.star_summaries, &s.star_summaries);
    }
}

#[test]
fn seeds_do_not_depend_on_grid_position() {
    let p: Problem = lattice(25);
    let full = sweep(&p, &small_cfg(2, 10, 3)).unwrap();
    let part = sweep(
        &p,
        &SweepConfig {
            v_grid: vec![0.3, 0.7],
            ..small_cfg(2, 10, 3)
        },
    )
    .unwrap();
    assert_eq!(part.run_means[0], full.run_means[3]);
    assert_eq!(part.run_means[1], full.run_means[7]);
}
