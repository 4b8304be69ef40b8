#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use ptmswarm::{City, Problem, StrategyMatrix};

/// Sum of squared eigenvalues of a symmetric matrix.
pub fn eigen_sq_sum(m: DMatrix<f64>) -> f64 {
    m.symmetric_eigen().eigenvalues.iter().map(|l| l * l).sum()
}

/// Pearson correlation matrix of the rows, written out from the textbook
/// definition with the constant-row convention.
pub fn pearson_matrix(rows: &[Vec<i8>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows[0].len() as f64;
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mean = r.iter().map(|&x| f64::from(x)).sum::<f64>() / m;
            r.iter().map(|&x| f64::from(x) - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if norms[i] == 0.0 || norms[j] == 0.0 {
            0.0
        } else {
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            dot / (norms[i] * norms[j])
        }
    })
}

pub fn sign_rows(
    n_rows: std::ops::RangeInclusive<usize>,
    n_cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Vec<Vec<i8>>> {
    (n_rows, n_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(
            prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), c),
            r,
        )
    })
}

/// Symmetric, zero-diagonal distance matrix with at least one positive entry.
pub fn distance_matrix(n: std::ops::RangeInclusive<usize>, max: u32) -> impl Strategy<Value = (usize, Vec<u32>)> {
    n.prop_flat_map(move |n| {
        let k = n * (n - 1) / 2;
        (Just(n), prop::collection::vec(0..=max, k), 0..k)
    })
    .prop_map(move |(n, upper, forced)| {
        let mut d = vec![0u32; n * n];
        let mut t = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let x = if t == forced { upper[t].max(1) } else { upper[t] };
                d[i * n + j] = x;
                d[j * n + i] = x;
                t += 1;
            }
        }
        (n, d)
    })
}

/// Distinct-ish integer cities on a square.
pub fn cities(n: std::ops::RangeInclusive<usize>, side: i32) -> impl Strategy<Value = Vec<City>> {
    n.prop_flat_map(move |n| prop::collection::vec((0..side, 0..side), n))
        .prop_map(|xy| {
            xy.into_iter()
                .enumerate()
                .map(|(i, (x, y))| City::new(i + 1, f64::from(x), f64::from(y)))
                .collect()
        })
}

pub fn problem(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Problem> {
    cities(n, 1000)
        .prop_filter("needs two distinct cities", |c| {
            c.iter().any(|a| (a.x, a.y) != (c[0].x, c[0].y))
        })
        .prop_map(|c| Problem::from_cities("prop", c))
}

pub fn matrix_of(rows: &[Vec<i8>]) -> StrategyMatrix {
    StrategyMatrix::from_signs(rows)
}

/// Small deterministic instance on a jittered lattice.
pub fn lattice(n: usize) -> Problem {
    let cities = (0..n)
        .map(|i| {
            let jitter = (ptmswarm::generators::mix64(i as u64) % 17) as f64;
            City::new(
                i + 1,
                (i % 9) as f64 * 40.0 + jitter,
                (i / 9) as f64 * 35.0 + jitter * 0.5,
            )
        })
        .collect();
    Problem::from_cities("lattice", cities)
}
