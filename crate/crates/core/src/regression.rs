//! Ordinary least squares of algorithm complexity on problem complexity, and
//! the side-by-side comparison of the two generators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("need at least 2 points, got {0}")]
    InsufficientData(usize),
    #[error("all x values are equal; slope is undefined")]
    DegenerateX,
    #[error("problem sets differ: {0}")]
    MismatchedProblems(String),
}

/// One `(C(p), C(A(p)))` observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityPoint {
    pub problem: String,
    /// Problem complexity.
    pub x: f64,
    /// Algorithm complexity at the performance optimum.
    pub y: f64,
}

impl ComplexityPoint {
    pub fn new(problem: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            problem: problem.into(),
            x,
            y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Undefined for fewer than three points.
    pub slope_stderr: Option<f64>,
    pub intercept_stderr: Option<f64>,
    /// Standard error of estimate, `sqrt(SSE / (m - 2))`.
    pub see: Option<f64>,
    pub r_squared: f64,
    pub max_abs_residual: f64,
    pub m: usize,
}

impl RegressionFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Least-squares line `y = slope * x + intercept`.
///
/// Point order does not affect the result: the sums are taken over points
/// sorted by `(x, y)`.
pub fn fit_ols(points: &[ComplexityPoint]) -> Result<RegressionFit, RegressionError> {
    let m = points.len();
    if m < 2 {
        return Err(RegressionError::InsufficientData(m));
    }
    let mut xy: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.y)).collect();
    xy.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mf = m as f64;
    let x_mean = xy.iter().map(|p| p.0).sum::<f64>() / mf;
    let y_mean = xy.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = xy.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    if sxx == 0.0 {
        return Err(RegressionError::DegenerateX);
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let sst: f64 = xy.iter().map(|p| (p.1 - y_mean).powi(2)).sum();

    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals: Vec<f64> = xy.iter().map(|p| p.1 - (slope * p.0 + intercept)).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let max_abs_residual = residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));

    let r_squared = if sst == 0.0 {
        1.0
    } else {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    };

    let (see, slope_stderr, intercept_stderr) = if m >= 3 {
        let see = (sse / (mf - 2.0)).sqrt();
        let se_slope = see / sxx.sqrt();
        let se_icpt = see * (1.0 / mf + x_mean * x_mean / sxx).sqrt();
        (Some(see), Some(se_slope), Some(se_icpt))
    } else {
        (None, None, None)
    };

    Ok(RegressionFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        see,
        r_squared,
        max_abs_residual,
        m,
    })
}

/// Residuals `y - (slope x + intercept)` in input order.
pub fn residuals(fit: &RegressionFit, points: &[ComplexityPoint]) -> Vec<f64> {
    points.iter().map(|p| p.y - fit.predict(p.x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Ptm,
    Random,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemComparison {
    pub problem: String,
    pub best_ptm: f64,
    pub best_random: f64,
    pub winner: Winner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitContrast {
    pub r_squared: (f64, f64),
    pub see: (Option<f64>, Option<f64>),
    pub max_abs_residual: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub problems: Vec<ProblemComparison>,
    pub ptm_wins: usize,
    pub random_wins: usize,
    pub ties: usize,
    /// `(ptm, random)` pairs.
    pub fit_contrast: FitContrast,
}

/// Compares best averaged performance per problem (lower wins) and the
/// quality of the two complexity fits.
pub fn compare_generators(
    fit_ptm: &RegressionFit,
    fit_rand: &RegressionFit,
    best_ptm: &BTreeMap<String, f64>,
    best_rand: &BTreeMap<String, f64>,
) -> Result<ComparisonReport, RegressionError> {
    if best_ptm.len() != best_rand.len() || best_ptm.keys().ne(best_rand.keys()) {
        let only_ptm: Vec<_> = best_ptm.keys().filter(|k| !best_rand.contains_key(*k)).collect();
        let only_rand: Vec<_> = best_rand.keys().filter(|k| !best_ptm.contains_key(*k)).collect();
        return Err(RegressionError::MismatchedProblems(format!(
            "only in ptm: {only_ptm:?}; only in random: {only_rand:?}"
        )));
    }
    if fit_ptm.m != fit_rand.m {
        return Err(RegressionError::MismatchedProblems(format!(
            "fits cover {} and {} points",
            fit_ptm.m, fit_rand.m
        )));
    }
    let problems: Vec<ProblemComparison> = best_ptm
        .iter()
        .zip(best_rand.values())
        .map(|((name, &a), &b)| ProblemComparison {
            problem: name.clone(),
            best_ptm: a,
            best_random: b,
            winner: if a < b {
                Winner::Ptm
            } else if b < a {
                Winner::Random
            } else {
                Winner::Tie
            },
        })
        .collect();
    let count = |w: Winner| problems.iter().filter(|p| p.winner == w).count();
    Ok(ComparisonReport {
        ptm_wins: count(Winner::Ptm),
        random_wins: count(Winner::Random),
        ties: count(Winner::Tie),
        fit_contrast: FitContrast {
            r_squared: (fit_ptm.r_squared, fit_rand.r_squared),
            see: (fit_ptm.see, fit_rand.see),
            max_abs_residual: (fit_ptm.max_abs_residual, fit_rand.max_abs_residual),
        },
        problems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(xy: &[(f64, f64)]) -> Vec<ComplexityPoint> {
        xy.iter()
            .enumerate()
            .map(|(i, &(x, y))| ComplexityPoint::new(format!("p{i}"), x, y))
            .collect()
    }

    #[test]
    fn two_points_determine_the_line() {
        let f = fit_ols(&pts(&[(0.0, 0.33), (1.0, 1.0)])).unwrap();
        assert!((f.slope - 0.67).abs() < 1e-15);
        assert!((f.intercept - 0.33).abs() < 1e-15);
        assert!(f.max_abs_residual < 1e-15);
        assert_eq!(f.see, None);
        assert_eq!(f.slope_stderr, None);
    }

    #[test]
    fn collinear_points() {
        let f = fit_ols(&pts(&[(0.1, 0.2), (0.4, 0.5), (0.8, 0.9), (0.9, 1.0)])).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!((f.intercept - 0.1).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.see.unwrap() < 1e-12);
        assert!(f.max_abs_residual < 1e-12);
    }

    #[test]
    fn known_stats() {
        // x = 1..5, y = 2,4,5,4,5: slope 0.6, intercept 2.2, SSE 2.4,
        // SST 6, R^2 0.6, SEE sqrt(0.8), se(slope) = sqrt(0.8/10)
        let f = fit_ols(&pts(&[(1.0, 2.0), (2.0, 4.0), (3.0, 5.0), (4.0, 4.0), (5.0, 5.0)])).unwrap();
        assert!((f.slope - 0.6).abs() < 1e-12);
        assert!((f.intercept - 2.2).abs() < 1e-12);
        assert!((f.r_squared - 0.6).abs() < 1e-12);
        assert!((f.see.unwrap() - 0.8f64.sqrt()).abs() < 1e-12);
        assert!((f.slope_stderr.unwrap() - 0.08f64.sqrt()).abs() < 1e-12);
        assert!((f.intercept_stderr.unwrap() - (0.8f64 * (0.2 + 9.0 / 10.0)).sqrt()).abs() < 1e-12);
        assert!((f.max_abs_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert_eq!(
            fit_ols(&pts(&[(1.0, 1.0)])).unwrap_err(),
            RegressionError::InsufficientData(1)
        );
        assert_eq!(
            fit_ols(&pts(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)])).unwrap_err(),
            RegressionError::DegenerateX
        );
    }

    #[test]
    fn self_comparison_has_no_winner() {
        let p = pts(&[(0.1, 0.4), (0.3, 0.5), (0.6, 0.7)]);
        let f = fit_ols(&p).unwrap();
        let best: BTreeMap<String, f64> = [("a".to_string(), 10.0), ("b".to_string(), 20.0)].into();
        let r = compare_generators(&f, &f, &best, &best).unwrap();
        assert_eq!((r.ptm_wins, r.random_wins, r.ties), (0, 0, 2));
        assert_eq!(r.fit_contrast.r_squared.0, r.fit_contrast.r_squared.1);
    }

    #[test]
    fn comparison_counts_wins() {
        let f = fit_ols(&pts(&[(0.1, 0.4), (0.3, 0.5), (0.6, 0.7)])).unwrap();
        let a: BTreeMap<String, f64> = [("a", 1.0), ("b", 5.0), ("c", 3.0)]
            .map(|(k, v)| (k.to_string(), v))
            .into();
        let b: BTreeMap<String, f64> = [("a", 2.0), ("b", 4.0), ("c", 4.0)]
            .map(|(k, v)| (k.to_string(), v))
            .into();
        let r = compare_generators(&f, &f, &a, &b).unwrap();
        assert_eq!((r.ptm_wins, r.random_wins, r.ties), (2, 1, 0));
        assert_eq!(r.problems[1].winner, Winner::Random);
    }

    #[test]
    fn mismatched_sets_rejected() {
        let f = fit_ols(&pts(&[(0.1, 0.4), (0.3, 0.5), (0.6, 0.7)])).unwrap();
        let a: BTreeMap<String, f64> = [("a".to_string(), 1.0)].into();
        let b: BTreeMap<String, f64> = [("b".to_string(), 1.0)].into();
        assert!(matches!(
            compare_generators(&f, &f, &a, &b),
            Err(RegressionError::MismatchedProblems(_))
        ));
    }
}
