//! Command line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cocyc_core::{Mode, Pixel};
use thiserror::Error;

use crate::document::{compute, document, RunOptions};
use crate::dump;
use crate::pbm::{self, Limits, PbmError};
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "cocyc", version, about = "Representative cocycles of binary image objects")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a cohomology basis for every object of a PBM image.
    Compute(ComputeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fast,
    Invariant,
}

#[derive(Debug, clap::Args)]
pub struct ComputeArgs {
    /// PBM image (P1 or P4); set pixels are foreground.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "fast")]
    pub mode: ModeArg,
    /// Kernel selection seed; ignored in invariant mode.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report the cocycles at this pyramid level instead of the base.
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    /// Pins the order anchor of the object containing pixel X,Y. Repeatable.
    #[arg(long, value_parser = parse_pixel)]
    pub anchor: Vec<Pixel>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Check the result against the homology oracle.
    #[arg(long)]
    pub verify: bool,
    /// Writes a text dump of every pyramid level into this directory.
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 4096)]
    pub max_width: u32,
    #[arg(long, default_value_t = 4096)]
    pub max_height: u32,
}

fn parse_pixel(s: &str) -> Result<Pixel, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x = x.trim().parse().map_err(|_| format!("bad x coordinate in {s:?}"))?;
    let y = y.trim().parse().map_err(|_| format!("bad y coordinate in {s:?}"))?;
    Ok(Pixel::new(x, y))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Pbm { path: PathBuf, source: PbmError },
    #[error("invalid request: {0}")]
    Request(cocyc_core::Error),
    #[error("computation failed: {0}")]
    Pipeline(cocyc_core::Error),
    #[error("verification failed:\n  {}", .0.join("\n  "))]
    Verification(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Pbm { .. } | CliError::Request(_) => 2,
            CliError::Write { .. } | CliError::Pipeline(_) | CliError::Verification(_) => 1,
        }
    }
}

fn classify(e: cocyc_core::Error) -> CliError {
    use cocyc_core::Error as E;
    match e {
        E::LevelOutOfRange { .. } | E::PixelOutsideObject { .. } | E::DuplicateAnchor { .. } => CliError::Request(e),
        e => CliError::Pipeline(e),
    }
}

pub fn compute_command(args: &ComputeArgs) -> Result<(), CliError> {
    let data = std::fs::read(&args.input).map_err(|source| CliError::Read { path: args.input.clone(), source })?;
    let limits = Limits { max_width: args.max_width, max_height: args.max_height };
    let img = pbm::parse(&data, limits).map_err(|source| CliError::Pbm { path: args.input.clone(), source })?;
    let opts = RunOptions {
        mode: match args.mode {
            ModeArg::Fast => Mode::Fast,
            ModeArg::Invariant => Mode::Invariant,
        },
        seed: args.seed,
        level: args.level,
        anchors: args.anchor.clone(),
        verify: args.verify,
    };
    let c = compute(&img, &opts).map_err(classify)?;
    let doc = document(&img, &c, &opts);
    std::fs::write(&args.output, doc.to_json())
        .map_err(|source| CliError::Write { path: args.output.clone(), source })?;
    if let Some(path) = &args.svg {
        std::fs::write(path, svg::render(&img, &doc)).map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    if let Some(dir) = &args.dump_dir {
        dump::write_all(&c.pyramid, dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
    }
    match doc.verification {
        Some(v) if !v.passed => Err(CliError::Verification(v.failures)),
        _ => Ok(()),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(args) => compute_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cocyc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
