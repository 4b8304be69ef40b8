//! Agent correlation statistics of a strategy matrix and the algorithm
//! complexity derived from them.
//!
//! `V` is the matrix of Pearson correlations between agent rows. Its
//! quadratic trace `tr(V^2)` equals `sum_ij V_ij^2` because `V` is symmetric,
//! so it is accumulated pair by pair and never materialized.
//!
//! A row whose entries are all equal has no defined correlation. Such rows
//! get `V_ii = 1` and `V_ij = 0` against every other row.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::swarm::StrategyMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("correlation needs at least 2 columns, got {0}")]
    TooFewColumns(usize),
    #[error("correlation needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("no strategy matrices given")]
    Empty,
    #[error("matrix {index} is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    /// `tr(V^2)`.
    pub quad_trace: f64,
    /// `tr(V^2) / N^2`.
    pub normalized: f64,
    pub n_agents: usize,
    /// Agents whose strategy never changed.
    pub n_constant_rows: usize,
}

/// Per-row quantities reused across all pairs.
struct RowStats {
    sum: i64,
    /// `m^2 - sum^2`, zero for a constant row.
    spread: i64,
}

fn row_stats(s: &StrategyMatrix) -> Vec<RowStats> {
    let m = s.cols() as i64;
    (0..s.rows())
        .map(|i| {
            let sum = s.row_sum(i);
            RowStats {
                sum,
                spread: m * m - sum * sum,
            }
        })
        .collect()
}

/// Squared Pearson correlation between rows `i` and `j`, exact up to the
/// final division. For `+1/-1` rows the dot product is `m - 2 * hamming`,
/// so `r = (m * dot - s_i s_j) / sqrt(spread_i * spread_j)`.
#[inline]
fn pair_r2(s: &StrategyMatrix, stats: &[RowStats], i: usize, j: usize) -> f64 {
    let (a, b) = (&stats[i], &stats[j]);
    if a.spread == 0 || b.spread == 0 {
        return 0.0;
    }
    let m = s.cols() as i64;
    let hamming: u32 = s
        .row_bits(i)
        .iter()
        .zip(s.row_bits(j))
        .map(|(x, y)| (x ^ y).count_ones())
        .sum();
    let dot = m - 2 * i64::from(hamming);
    let num = i128::from(m * dot - a.sum * b.sum);
    let num2 = (num * num) as f64;
    let den = (i128::from(a.spread) * i128::from(b.spread)) as f64;
    num2 / den
}

fn check_shape(s: &StrategyMatrix) -> Result<(), MetricsError> {
    if s.rows() < 2 {
        return Err(MetricsError::TooFewRows(s.rows()));
    }
    if s.cols() < 2 {
        return Err(MetricsError::TooFewColumns(s.cols()));
    }
    Ok(())
}

fn summary(s: &StrategyMatrix, stats: &[RowStats], off_diagonal: f64) -> CorrelationSummary {
    let n = s.rows();
    let quad_trace = n as f64 + 2.0 * off_diagonal;
    CorrelationSummary {
        quad_trace,
        normalized: quad_trace / (n as f64 * n as f64),
        n_agents: n,
        n_constant_rows: stats.iter().filter(|r| r.spread == 0).count(),
    }
}

/// `tr(V^2)` of the agent correlation matrix. Sequential reference path.
pub fn correlation_quad_trace(s: &StrategyMatrix) -> Result<CorrelationSummary, MetricsError> {
    check_shape(s)?;
    let stats = row_stats(s);
    let mut off = 0.0;
    for i in 0..s.rows() {
        for j in (i + 1)..s.rows() {
            off += pair_r2(s, &stats, i, j);
        }
    }
    Ok(summary(s, &stats, off))
}

/// Same as [`correlation_quad_trace`] with rows split across the rayon pool.
/// Agrees with the sequential path up to summation order.
pub fn correlation_quad_trace_par(s: &StrategyMatrix) -> Result<CorrelationSummary, MetricsError> {
    check_shape(s)?;
    let stats = row_stats(s);
    let off: f64 = (0..s.rows())
        .into_par_iter()
        .map(|i| ((i + 1)..s.rows()).map(|j| pair_r2(s, &stats, i, j)).sum::<f64>())
        .sum();
    Ok(summary(s, &stats, off))
}

/// Algorithm complexity: the run-averaged quadratic trace divided by `N^2`.
pub fn algorithm_complexity(matrices: &[StrategyMatrix]) -> Result<f64, MetricsError> {
    let first = matrices.first().ok_or(MetricsError::Empty)?;
    for (index, m) in matrices.iter().enumerate() {
        if m.rows() != first.rows() || m.cols() != first.cols() {
            return Err(MetricsError::ShapeMismatch {
                index,
                rows: m.rows(),
                cols: m.cols(),
                expected_rows: first.rows(),
                expected_cols: first.cols(),
            });
        }
    }
    let summaries = matrices
        .iter()
        .map(correlation_quad_trace)
        .collect::<Result<Vec<_>, _>>()?;
    complexity_from_summaries(&summaries)
}

/// Algorithm complexity from already computed per-run summaries.
///
/// Traces are averaged first and scaled by `1/N^2` once, which keeps the
/// limiting values `1/N` and `1` exact.
pub fn complexity_from_summaries(summaries: &[CorrelationSummary]) -> Result<f64, MetricsError> {
    let first = summaries.first().ok_or(MetricsError::Empty)?;
    let n = first.n_agents;
    if let Some((index, s)) = summaries.iter().enumerate().find(|(_, s)| s.n_agents != n) {
        return Err(MetricsError::ShapeMismatch {
            index,
            rows: s.n_agents,
            cols: 0,
            expected_rows: n,
            expected_cols: 0,
        });
    }
    let mean = summaries.iter().map(|s| s.quad_trace).sum::<f64>() / summaries.len() as f64;
    Ok(mean / (n as f64 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i8]]) -> StrategyMatrix {
        StrategyMatrix::from_signs(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn identical_rows_saturate() {
        let row: &[i8] = &[1, -1, -1, 1, -1];
        let s = m(&[row, row, row, row]);
        let c = correlation_quad_trace(&s).unwrap();
        assert_eq!(c.quad_trace, 16.0);
        assert_eq!(c.normalized, 1.0);
        assert_eq!(c.n_constant_rows, 0);
    }

    #[test]
    fn uncorrelated_pair() {
        // centered rows (1,1,-1,-1) and (1,-1,1,-1) are orthogonal
        let s = m(&[&[1, 1, -1, -1], &[1, -1, 1, -1]]);
        let c = correlation_quad_trace(&s).unwrap();
        assert_eq!(c.quad_trace, 2.0);
        assert_eq!(c.normalized, 0.5);
    }

    #[test]
    fn two_row_closed_form() {
        let a: Vec<i8> = vec![1, 1, 1, -1, -1, 1, -1];
        let b: Vec<i8> = vec![1, -1, 1, -1, 1, 1, 1];
        let r = {
            let n = a.len() as f64;
            let (x, y): (Vec<f64>, Vec<f64>) = a.iter().zip(&b).map(|(&p, &q)| (p as f64, q as f64)).unzip();
            let mx = x.iter().sum::<f64>() / n;
            let my = y.iter().sum::<f64>() / n;
            let cov: f64 = x.iter().zip(&y).map(|(p, q)| (p - mx) * (q - my)).sum();
            let vx: f64 = x.iter().map(|p| (p - mx).powi(2)).sum();
            let vy: f64 = y.iter().map(|q| (q - my).powi(2)).sum();
            cov / (vx * vy).sqrt()
        };
        let c = correlation_quad_trace(&StrategyMatrix::from_signs(&[a, b])).unwrap();
        assert!((c.quad_trace - (2.0 + 2.0 * r * r)).abs() < 1e-14);
    }

    #[test]
    fn constant_rows_are_uncorrelated() {
        let s = m(&[&[1, 1, 1], &[1, 1, 1], &[-1, -1, -1]]);
        let c = correlation_quad_trace(&s).unwrap();
        assert_eq!(c.quad_trace, 3.0);
        assert_eq!(c.normalized, 1.0 / 3.0);
        assert_eq!(c.n_constant_rows, 3);
    }

    #[test]
    fn negating_and_permuting_rows_preserves_trace() {
        let s = m(&[&[1, -1, 1, 1, -1], &[1, 1, -1, 1, -1], &[-1, -1, 1, 1, 1]]);
        let t = correlation_quad_trace(&s).unwrap().quad_trace;
        let neg = m(&[&[-1, 1, -1, -1, 1], &[1, 1, -1, 1, -1], &[-1, -1, 1, 1, 1]]);
        let perm = m(&[&[-1, -1, 1, 1, 1], &[1, -1, 1, 1, -1], &[1, 1, -1, 1, -1]]);
        assert!((correlation_quad_trace(&neg).unwrap().quad_trace - t).abs() < 1e-12);
        assert!((correlation_quad_trace(&perm).unwrap().quad_trace - t).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        assert_eq!(
            correlation_quad_trace(&m(&[&[1], &[-1]])).unwrap_err(),
            MetricsError::TooFewColumns(1)
        );
        assert_eq!(
            correlation_quad_trace(&m(&[&[1, -1]])).unwrap_err(),
            MetricsError::TooFewRows(1)
        );
        assert_eq!(algorithm_complexity(&[]).unwrap_err(), MetricsError::Empty);
        let a = m(&[&[1, -1], &[1, 1]]);
        let b = m(&[&[1, -1, 1], &[1, 1, 1]]);
        assert!(matches!(
            algorithm_complexity(&[a, b]),
            Err(MetricsError::ShapeMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn complexity_mean_of_one_and_copies() {
        let s = m(&[&[1, -1, 1, 1], &[1, 1, -1, -1], &[-1, 1, 1, -1]]);
        let one = algorithm_complexity(std::slice::from_ref(&s)).unwrap();
        assert_eq!(one, correlation_quad_trace(&s).unwrap().normalized);
        let ten = algorithm_complexity(&vec![s; 10]).unwrap();
        assert!((ten - one).abs() < 1e-15);
    }

    #[test]
    fn parallel_matches_sequential() {
        let rows: Vec<Vec<i8>> = (0..40)
            .map(|i| (0..37).map(|j| if (i * 7 + j * j) % 5 < 2 { -1 } else { 1 }).collect())
            .collect();
        let s = StrategyMatrix::from_signs(&rows);
        let a = correlation_quad_trace(&s).unwrap();
        let b = correlation_quad_trace_par(&s).unwrap();
        assert!((a.quad_trace - b.quad_trace).abs() <= 1e-12 * a.quad_trace);
        assert_eq!(a.n_constant_rows, b.n_constant_rows);
    }
}
