//! `geoperm`: geometric permutations, pinning and lemma checks from the
//! command line.

mod commands;
mod manifest;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use geoperm::Error;

#[derive(Debug, Parser, serde::Serialize)]
#[command(name = "geoperm", version, about = "Line transversals and pinning configurations of unit balls")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate the geometric permutations of a configuration.
    Perms {
        #[arg(long)]
        config: PathBuf,
        /// Directions sampled on the sphere.
        #[arg(long, default_value_t = 100_000)]
        resolution: usize,
    },
    /// Shrink a configuration until a transversal with the given order is pinned.
    Pin {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        order: String,
        /// Also pin a second order with the two-stage shrink.
        #[arg(long, requires = "order2")]
        two_stage: bool,
        #[arg(long)]
        order2: Option<String>,
        /// Objective evaluations for each transversal search.
        #[arg(long, default_value_t = 4000)]
        budget: usize,
    },
    /// Randomized or exhaustive checks of one lemma.
    Verify {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Per-trial CSV (default: next to --out with extension csv).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Four unit balls tangent to the x-axis on the quadric xy = hz.
    Hyperb {
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, num_args = 4, allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
    },
    /// Multistart numerical search for a four-ball counter-example.
    Search {
        #[arg(long, value_enum)]
        formulation: Formulation,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Write the polynomial pinning system.
    EmitSystem {
        #[arg(long, value_enum, default_value_t = SystemFormat::Plain)]
        format: SystemFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    Distance,
    Angle,
    Cylinder,
    Cylinder6,
    Triangle,
    Functions,
    Graph,
    #[value(name = "2d")]
    #[serde(rename = "2d")]
    Planar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Tangency,
    Pinning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemFormat {
    Plain,
    Smtlib,
}

/// Failure of a run, mapped onto the exit status.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Tie(..) | Error::NoInitialTransversal | Error::Infeasible(_) | Error::DegenerateChart => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
