//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use ptmswarm::experiment::{complexity_point, load_problem, sweep};
use ptmswarm::regression::{compare_generators, fit_ols, ComparisonReport, ComplexityPoint, RegressionFit};
use ptmswarm::{problem_complexity, SweepConfig};

use crate::persist::{self, FitRecord, Manifest, PointRow, ProblemEntry, SweepSummary, SCHEMA_VERSION};

/// Sweeps every configured problem and writes curves, summaries and the
/// manifest to `out`, then runs [`analyze`] on the result.
pub fn sweep_cmd(cfg: &SweepConfig, out: &Path, jobs: Option<usize>) -> Result<Analysis> {
    cfg.validate()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build()?;

    let total = cfg.problems.len();
    let mut entries = Vec::with_capacity(total);
    for (k, path) in cfg.problems.iter().enumerate() {
        let problem = load_problem(path)?;
        eprintln!(
            "[{}/{}] {} (n = {}, {} x {} runs)",
            k + 1,
            total,
            problem.name(),
            problem.n(),
            cfg.v_grid.len(),
            cfg.repetitions
        );
        let started = Instant::now();
        let result = pool.install(|| sweep(&problem, cfg))?;
        eprintln!(
            "      v* = {}  D_bar = {:.3}  ({:.1?})",
            result.v_star,
            result.best_d_bar,
            started.elapsed()
        );

        let stem = persist::problem_stem(problem.name());
        let curve_name = PathBuf::from(format!("{stem}_curve.csv"));
        let summary_name = PathBuf::from(format!("{stem}_summary.json"));
        persist::write_curve_csv(&out.join(&curve_name), &result.curve)?;
        persist::write_json(&out.join(&summary_name), &SweepSummary::from_sweep(&result, cfg)?)?;

        let instance = fs::canonicalize(path).with_context(|| format!("resolving {}", path.display()))?;
        entries.push(ProblemEntry {
            problem: problem.name().to_string(),
            instance_sha256: persist::sha256_file(&instance)?,
            instance,
            curve_sha256: persist::sha256_file(&out.join(&curve_name))?,
            curve: curve_name,
            summary_sha256: persist::sha256_file(&out.join(&summary_name))?,
            summary: summary_name,
        });
    }

    let mut names: Vec<&str> = entries.iter().map(|e| e.problem.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        bail!("problem `{}` appears more than once", w[0]);
    }

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config: cfg.clone(),
        problems: entries,
    };
    persist::write_json(&out.join(persist::MANIFEST_FILE), &manifest)?;
    analyze(out)
}

/// Result of analyzing one output directory.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub manifest: Manifest,
    pub summaries: Vec<SweepSummary>,
    pub points: Vec<PointRow>,
    /// `None` when fewer than two problems were swept.
    pub fit: Option<RegressionFit>,
}

impl Analysis {
    pub fn best_by_problem(&self) -> BTreeMap<String, f64> {
        self.summaries
            .iter()
            .map(|s| (s.problem.clone(), s.best_d_bar))
            .collect()
    }
}

/// Verifies a sweep directory, builds the complexity points and fits the
/// regression line. Writes `points.csv`, `fit.json` and the plot data.
pub fn analyze(dir: &Path) -> Result<Analysis> {
    let manifest = Manifest::load(dir)?;
    manifest.verify(dir)?;

    let mut summaries = Vec::with_capacity(manifest.problems.len());
    let mut curves = Vec::with_capacity(manifest.problems.len());
    let mut points = Vec::with_capacity(manifest.problems.len());
    for e in &manifest.problems {
        let summary = persist::load_summary(&dir.join(&e.summary))?;
        if summary.problem != e.problem {
            bail!("{}: summary names problem `{}`", e.problem, summary.problem);
        }
        let curve = persist::read_curve_csv(&dir.join(&e.curve))?;
        let problem = load_problem(&e.instance)?;
        let x = problem_complexity(&problem).with_context(|| format!("complexity of {}", e.problem))?;
        points.push(PointRow {
            point: ComplexityPoint::new(&e.problem, x, summary.algorithm_complexity),
            v_star: summary.v_star,
        });
        curves.push((e.problem.clone(), curve));
        summaries.push(summary);
    }

    persist::write_points_csv(&dir.join(persist::POINTS_FILE), &points)?;
    persist::write_plot_curves(&dir.join(persist::PLOT_CURVES_FILE), &curves)?;

    let plain: Vec<ComplexityPoint> = points.iter().map(|r| r.point.clone()).collect();
    let fit_path = dir.join(persist::FIT_FILE);
    let fit = if plain.len() < 2 {
        eprintln!(
            "warning: {} problem(s) swept; a regression needs at least 2, skipping the fit",
            plain.len()
        );
        if fit_path.exists() {
            fs::remove_file(&fit_path)?;
        }
        None
    } else {
        let fit = fit_ols(&plain)?;
        persist::write_json(&fit_path, &FitRecord::new(&fit, manifest.config.generator))?;
        Some(fit)
    };
    persist::write_plot_regression(&dir.join(persist::PLOT_REGRESSION_FILE), &plain, fit.as_ref())?;

    Ok(Analysis {
        manifest,
        summaries,
        points,
        fit,
    })
}

/// Fits a regression from a persisted points file.
pub fn fit_from_points_file(path: &Path) -> Result<RegressionFit> {
    let rows = persist::read_points_csv(path)?;
    let plain: Vec<ComplexityPoint> = rows.into_iter().map(|r| r.point).collect();
    Ok(fit_ols(&plain)?)
}

/// Contrasts a PTM sweep directory with a random-generator one.
pub fn compare(ptm_dir: &Path, random_dir: &Path, out: &Path) -> Result<ComparisonReport> {
    let a = analyze(ptm_dir)?;
    let b = analyze(random_dir)?;
    let (Some(fa), Some(fb)) = (&a.fit, &b.fit) else {
        bail!("comparison needs a fit on both sides; sweep at least 2 problems");
    };
    let report = compare_generators(fa, fb, &a.best_by_problem(), &b.best_by_problem())?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    persist::write_json(&out.join(persist::COMPARISON_FILE), &report)?;
    persist::write_plot_best(&out.join(persist::PLOT_BEST_FILE), &report)?;
    Ok(report)
}

/// Human-readable comparison.
pub fn format_report(r: &ComparisonReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<12} {:>14} {:>14}  winner\n",
        "problem", "best ptm", "best random"
    ));
    for p in &r.problems {
        s.push_str(&format!(
            "{:<12} {:>14.3} {:>14.3}  {:?}\n",
            p.problem, p.best_ptm, p.best_random, p.winner
        ));
    }
    s.push_str(&format!(
        "wins: ptm {}, random {}, ties {}\n",
        r.ptm_wins, r.random_wins, r.ties
    ));
    let c = &r.fit_contrast;
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    s.push_str(&format!("R^2: ptm {:.6}, random {:.6}\n", c.r_squared.0, c.r_squared.1));
    s.push_str(&format!("SEE: ptm {}, random {}\n", opt(c.see.0), opt(c.see.1)));
    s.push_str(&format!(
        "max |residual|: ptm {:.6}, random {:.6}\n",
        c.max_abs_residual.0, c.max_abs_residual.1
    ));
    s
}

/// One-line description of an instance.
pub fn parse_check(path: &Path) -> Result<String> {
    let p = load_problem(path)?;
    let c = problem_complexity(&p).with_context(|| format!("complexity of {}", p.name()))?;
    Ok(format!(
        "{}: n = {}, d_max = {}, C(p) = {:.6}, sha256 = {}",
        p.name(),
        p.n(),
        p.d_max(),
        c,
        persist::sha256_file(path)?
    ))
}

/// Complexity point recomputed from a fresh sweep; used by tests that check
/// persisted values against an in-memory run.
pub fn point_in_memory(path: &Path, cfg: &SweepConfig) -> Result<ComplexityPoint> {
    let p = load_problem(path)?;
    let s = sweep(&p, cfg)?;
    Ok(complexity_point(&p, &s)?)
}
