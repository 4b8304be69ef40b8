//! Command-line front end: configuration, persistence and subcommands.

pub mod commands;
pub mod config;
pub mod persist;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use ptmswarm::experiment::Scale;
use ptmswarm::GeneratorKind;

use config::{GridSpec, RunSettings};

#[derive(Debug, Parser)]
#[command(
    name = "ptmswarm",
    version,
    about = "Swarm TSP heuristic driven by the Prouhet-Thue-Morse sequence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the v grid over a set of instances and analyze the result.
    Sweep(SweepArgs),
    /// Re-verify a sweep directory and refit the complexity regression.
    Analyze {
        /// Directory written by `sweep`.
        dir: PathBuf,
    },
    /// Contrast a PTM sweep with a random-generator sweep.
    Compare {
        #[arg(long)]
        ptm: PathBuf,
        #[arg(long)]
        random: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse an instance and print its size, d_max and complexity.
    ParseCheck {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Instance files; defaults to the scale's instance set under --data-dir.
    #[arg(long, num_args = 1..)]
    pub instances: Option<Vec<PathBuf>>,
    #[arg(long, value_parser = parse_generator)]
    pub generator: Option<GeneratorKind>,
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<Scale>,
    /// `start:step:end` or a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// 1-based start city.
    #[arg(long)]
    pub start_city: Option<usize>,
    /// Count the edge back to the start city.
    #[arg(long)]
    pub closed_tour: bool,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_generator(s: &str) -> Result<GeneratorKind, String> {
    s.parse().map_err(|e: String| e)
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse().map_err(|e: String| e)
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse_flag(s).map_err(|e| format!("{e:#}"))
}

impl SweepArgs {
    pub fn settings(&self) -> Result<RunSettings> {
        let base = match &self.config {
            Some(path) => RunSettings::from_toml_file(path)?,
            None => RunSettings::default(),
        };
        let flags = RunSettings {
            scale: self.scale,
            generator: self.generator,
            seed: self.seed,
            agents: self.agents,
            reps: self.reps,
            grid: self.grid.clone(),
            instances: self.instances.clone(),
            data_dir: self.data_dir.clone(),
            start_city: self.start_city,
            closed_tour: self.closed_tour.then_some(true),
            ..Default::default()
        };
        Ok(base.overlay(flags))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.settings()?.resolve()?;
            let a = commands::sweep_cmd(&cfg, &args.out, args.jobs)?;
            if let Some(fit) = &a.fit {
                println!(
                    "C(A) = {:.6} C(p) + {:.6}  (R^2 = {:.4}, m = {})",
                    fit.slope, fit.intercept, fit.r_squared, fit.m
                );
            }
            println!("wrote {}", args.out.display());
        }
        Command::Analyze { dir } => {
            let a = commands::analyze(&dir)?;
            for r in &a.points {
                println!(
                    "{:<12} C(p) = {:.6}  C(A) = {:.6}  v* = {}",
                    r.point.problem, r.point.x, r.point.y, r.v_star
                );
            }
            if let Some(fit) = &a.fit {
                println!(
                    "C(A) = {:.6} C(p) + {:.6}  (R^2 = {:.4}, m = {})",
                    fit.slope, fit.intercept, fit.r_squared, fit.m
                );
            }
        }
        Command::Compare { ptm, random, out } => {
            let report = commands::compare(&ptm, &random, &out)?;
            print!("{}", commands::format_report(&report));
        }
        Command::ParseCheck { files } => {
            for f in files {
                println!("{}", commands::parse_check(&f)?);
            }
        }
    }
    Ok(())
}
