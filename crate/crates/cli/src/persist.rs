//! On-disk formats: curve and point CSVs, summary/fit/manifest JSON, and the
//! plot-data CSVs. Reals are written in shortest round-trip scientific
//! notation so re-reading reproduces every value bitwise.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ptmswarm::experiment::{CurvePoint, UnimodalityReport};
use ptmswarm::regression::{ComparisonReport, ComplexityPoint, RegressionFit, Winner};
use ptmswarm::{CorrelationSummary, GeneratorKind, SweepConfig, SweepResult};

/// Version of every schema written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const POINTS_FILE: &str = "points.csv";
pub const FIT_FILE: &str = "fit.json";
pub const PLOT_CURVES_FILE: &str = "plot_curves.csv";
pub const PLOT_REGRESSION_FILE: &str = "plot_regression.csv";
pub const PLOT_BEST_FILE: &str = "plot_best_performance.csv";
pub const COMPARISON_FILE: &str = "comparison.json";

pub const CURVE_HEADER: [&str; 4] = ["v", "D_bar", "D_std", "n_runs"];
pub const POINTS_HEADER: [&str; 4] = ["problem", "C_p", "C_A", "v_star"];

#[inline]
pub fn real(x: f64) -> String {
    format!("{x:e}")
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        bail!(
            "{}: unexpected header {:?}, expected {:?}",
            path.display(),
            header,
            expected
        );
    }
    Ok(())
}

fn parse_real(field: &str, path: &Path) -> Result<f64> {
    field
        .parse()
        .with_context(|| format!("{}: bad number `{field}`", path.display()))
}

pub fn write_curve_csv(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(CURVE_HEADER)?;
    for c in curve {
        w.write_record([real(c.v), real(c.d_bar), real(c.d_std), c.n_runs.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    check_header(path, &mut rdr, &CURVE_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(CurvePoint {
                v: parse_real(&rec[0], path)?,
                d_bar: parse_real(&rec[1], path)?,
                d_std: parse_real(&rec[2], path)?,
                n_runs: rec[3]
                    .parse()
                    .with_context(|| format!("{}: bad n_runs", path.display()))?,
            })
        })
        .collect()
}

/// A complexity point with the grid optimum it was measured at.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub point: ComplexityPoint,
    pub v_star: f64,
}

pub fn write_points_csv(path: &Path, rows: &[PointRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(POINTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.point.problem.clone(),
            real(r.point.x),
            real(r.point.y),
            real(r.v_star),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv(path: &Path) -> Result<Vec<PointRow>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    check_header(path, &mut rdr, &POINTS_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(PointRow {
                point: ComplexityPoint::new(&rec[0], parse_real(&rec[1], path)?, parse_real(&rec[2], path)?),
                v_star: parse_real(&rec[3], path)?,
            })
        })
        .collect()
}

/// Per-problem sweep summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub problem: String,
    pub n_cities: usize,
    pub n_agents: usize,
    pub generator: GeneratorKind,
    pub repetitions: usize,
    pub star_index: usize,
    pub v_star: f64,
    pub best_d_bar: f64,
    pub unimodality: UnimodalityReport,
    /// Correlation summaries of the runs at `v_star`.
    pub star_traces: Vec<CorrelationSummary>,
    /// Run-averaged `tr(V^2) / N^2` at `v_star`.
    pub algorithm_complexity: f64,
}

impl SweepSummary {
    pub fn from_sweep(s: &SweepResult, cfg: &SweepConfig) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            problem: s.problem.clone(),
            n_cities: s.n_cities,
            n_agents: cfg.n_agents,
            generator: cfg.generator,
            repetitions: cfg.repetitions,
            star_index: s.star_index,
            v_star: s.v_star,
            best_d_bar: s.best_d_bar,
            unimodality: s.unimodality.clone(),
            star_traces: s.star_summaries.clone(),
            algorithm_complexity: s.algorithm_complexity()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub problem: String,
    pub instance: PathBuf,
    pub instance_sha256: String,
    /// Relative to the manifest's directory.
    pub curve: PathBuf,
    pub curve_sha256: String,
    pub summary: PathBuf,
    pub summary_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub timestamp: String,
    pub config: SweepConfig,
    pub problems: Vec<ProblemEntry>,
}

impl Manifest {
    /// Reads a manifest and checks its schema version.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let raw: serde_json::Value = read_json(&path)?;
        let version = raw.get("schema_version").and_then(|v| v.as_u64());
        if version != Some(u64::from(SCHEMA_VERSION)) {
            bail!(
                "{}: unsupported schema version {:?} (this build reads {})",
                path.display(),
                version,
                SCHEMA_VERSION
            );
        }
        serde_json::from_value(raw).with_context(|| format!("parsing {}", path.display()))
    }

    /// Verifies every referenced file against its recorded checksum.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for e in &self.problems {
            for (file, want) in [
                (dir.join(&e.curve), &e.curve_sha256),
                (dir.join(&e.summary), &e.summary_sha256),
                (e.instance.clone(), &e.instance_sha256),
            ] {
                if !file.exists() {
                    bail!("{}: missing file {}", e.problem, file.display());
                }
                let got = sha256_file(&file)?;
                if &got != want {
                    bail!("{}: checksum mismatch for {}", e.problem, file.display());
                }
            }
        }
        Ok(())
    }
}

pub fn load_summary(path: &Path) -> Result<SweepSummary> {
    let s: SweepSummary = read_json(path)?;
    if s.schema_version != SCHEMA_VERSION {
        bail!("{}: unsupported schema version {}", path.display(), s.schema_version);
    }
    Ok(s)
}

/// Fit statistics as persisted; names follow the regression line
/// `y = alpha x + beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub schema_version: u32,
    pub generator: GeneratorKind,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_stderr: Option<f64>,
    pub beta_stderr: Option<f64>,
    pub see: Option<f64>,
    pub r_squared: f64,
    pub max_abs_residual: f64,
    pub m: usize,
}

impl FitRecord {
    pub fn new(fit: &RegressionFit, generator: GeneratorKind) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator,
            alpha: fit.slope,
            beta: fit.intercept,
            alpha_stderr: fit.slope_stderr,
            beta_stderr: fit.intercept_stderr,
            see: fit.see,
            r_squared: fit.r_squared,
            max_abs_residual: fit.max_abs_residual,
            m: fit.m,
        }
    }

    pub fn to_fit(&self) -> RegressionFit {
        RegressionFit {
            slope: self.alpha,
            intercept: self.beta,
            slope_stderr: self.alpha_stderr,
            intercept_stderr: self.beta_stderr,
            see: self.see,
            r_squared: self.r_squared,
            max_abs_residual: self.max_abs_residual,
            m: self.m,
        }
    }
}

/// Performance curves of every problem, long format.
pub fn write_plot_curves(path: &Path, curves: &[(String, Vec<CurvePoint>)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["problem", "v", "D_bar", "D_std"])?;
    for (name, curve) in curves {
        for c in curve {
            w.write_record([name.clone(), real(c.v), real(c.d_bar), real(c.d_std)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Points with fitted values and residuals.
pub fn write_plot_regression(path: &Path, points: &[ComplexityPoint], fit: Option<&RegressionFit>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["problem", "C_p", "C_A", "C_A_fit", "residual"])?;
    for p in points {
        let (fitted, resid) = match fit {
            Some(f) => (real(f.predict(p.x)), real(p.y - f.predict(p.x))),
            None => (String::new(), String::new()),
        };
        w.write_record([p.problem.clone(), real(p.x), real(p.y), fitted, resid])?;
    }
    w.flush()?;
    Ok(())
}

/// Best averaged performance of each generator per problem.
pub fn write_plot_best(path: &Path, report: &ComparisonReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["problem", "best_ptm", "best_random", "winner"])?;
    for p in &report.problems {
        let winner = match p.winner {
            Winner::Ptm => "ptm",
            Winner::Random => "random",
            Winner::Tie => "tie",
        };
        w.write_record([
            p.problem.clone(),
            real(p.best_ptm),
            real(p.best_random),
            winner.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// File stem used for a problem's outputs.
pub fn problem_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.0, 1.1, 1.0 / 3.0, 6.02e23, -2.5e-310, 1234.5678] {
            assert_eq!(real(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(real(1.1), "1.1e0");
    }

    #[test]
    fn stems_are_file_safe() {
        assert_eq!(problem_stem("kroA100"), "kroA100");
        assert_eq!(problem_stem("a/b c"), "a_b_c");
    }
}
