//! Command-line driver: dataset generation, annotation, oracle labels,
//! evaluation and statistics over directories.

mod commands;
mod pool;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use matrixgt::evaluator::ApMethod;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "matrixgt", version, about = "Ground-truth forge for vehicle detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a dataset directory from a scenario file.
    Generate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        workers: Workers,
    },
    /// Write tight-box KITTI labels from engine buffers.
    Annotate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Relative depth band half-width.
        #[arg(long, default_value_t = 0.10)]
        rho: f64,
        #[command(flatten)]
        workers: Workers,
    },
    /// Write perfect labels from the instance oracle.
    OracleLabels {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        workers: Workers,
    },
    /// Score detections against ground truth per difficulty level.
    Evaluate {
        #[arg(long)]
        det: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value_t = 0.7)]
        iou: f64,
        /// `11pt` or `all`.
        #[arg(long, default_value = "11pt")]
        ap: ApMethod,
        /// Directory receiving report.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Centroid heatmap, detections histogram and summary of a label directory.
    Stats {
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Heatmap cells, COLSxROWS.
        #[arg(long, default_value = "48x27")]
        grid: Dims,
        /// Image size the boxes refer to, WIDTHxHEIGHT.
        #[arg(long, default_value = "640x480")]
        image: Dims,
    },
}

#[derive(Debug, Clone, Copy, clap::Args)]
pub struct Workers {
    /// Worker threads, 0 for one per core.
    #[arg(long = "workers", env = "MATRIXGT_WORKERS", default_value_t = 0)]
    pub count: usize,
}

/// `AxB` pair of positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims(pub u32, pub u32);

impl FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected AxB, got {s:?}"))?;
        let p = |v: &str| v.trim().parse::<u32>().ok().filter(|&n| n > 0);
        match (p(a), p(b)) {
            (Some(a), Some(b)) => Ok(Dims(a, b)),
            _ => Err(format!("expected two positive integers in {s:?}")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<matrixgt::Error> for CliError {
    fn from(e: matrixgt::Error) -> Self {
        use matrixgt::Error as E;
        let msg = e.to_string();
        match e {
            E::Io { .. } => CliError::Io(msg),
            E::Validation(_) => CliError::Validation(msg),
            E::Config(_) | E::Domain(_) | E::Format(_) | E::Truncated { .. } | E::BehindCamera(_) => {
                CliError::Config(msg)
            }
        }
    }
}
