//! Experiment configuration: an optional TOML file overridden by flags.
//!
//! ```toml
//! shape = "disk-minus-hole:r=40,hole=3"
//! h = 1.0
//! delta = 8.0
//! lambda = [0.05, 0.1]
//! n_ladder = "auto"        # or [100, 200, 400]
//! trials = 1000
//! seed = 7
//! out = "runs/disk"
//! format = "json"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::report::DEFAULT_UNIT;
use crate::shape::{ShapeKind, ShapeSpec};

/// Sample counts to run coverage experiments at.
#[derive(Clone, Debug, PartialEq)]
pub enum Ladder {
    /// Derived from the bound: `N₀, 2N₀, 4N₀` with `N₀` the count where
    /// the bound reaches 1/2, plus the count where it reaches 0.99.
    Auto,
    Explicit(Vec<u64>),
}

impl FromStr for Ladder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ladder> {
        if s.trim() == "auto" {
            return Ok(Ladder::Auto);
        }
        let ns = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Config(format!("n-ladder must be \"auto\" or a comma list of counts, got {s:?}")))?;
        if ns.is_empty() {
            return Err(Error::Config("n-ladder is empty".into()));
        }
        Ok(Ladder::Explicit(ns))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Config(format!("format must be json, csv or svg, got {s:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LadderValue {
    Word(String),
    Counts(Vec<u64>),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    shape: Option<String>,
    h: Option<f64>,
    delta: Option<f64>,
    lambda: Option<OneOrMany>,
    n_ladder: Option<LadderValue>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    unit: Option<String>,
    threads: Option<usize>,
}

/// Flags shared by every subcommand. Each overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Shape specification, e.g. `disk:r=32` or `from-mask-file:path=e.pbm`.
    #[arg(long)]
    pub shape: Option<String>,
    /// Cell size in physical units.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// One λ or a comma-separated ladder.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    /// `auto` or a comma-separated list of sample counts.
    #[arg(long = "n-ladder")]
    pub n_ladder: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print on stdout: json, csv or svg.
    #[arg(long)]
    pub format: Option<String>,
    /// Name of the physical length unit recorded in headers.
    #[arg(long)]
    pub unit: Option<String>,
    /// Worker threads for Monte Carlo trials; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub shape: ShapeSpec,
    pub delta: Option<f64>,
    pub lambda: Vec<f64>,
    pub n_ladder: Ladder,
    pub trials: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub unit: String,
    pub threads: usize,
}

pub const DEFAULT_TRIALS: u64 = 1000;

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl ExperimentConfig {
    /// Merges the config file named by `--config` (if any) with the
    /// flags and validates the result.
    pub fn resolve(flags: &Overrides) -> Result<ExperimentConfig> {
        let (file, base) = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let file: ConfigFile = toml::from_str(&text)
                    .map_err(|e| Error::format(path, e.to_string()))?;
                (file, path.parent().map(Path::to_path_buf))
            }
            None => (ConfigFile::default(), None),
        };

        let (shape_text, from_file) = match (&flags.shape, &file.shape) {
            (Some(s), _) => (s.clone(), false),
            (None, Some(s)) => (s.clone(), true),
            (None, None) => return Err(Error::Config("no shape given (--shape or shape = ...)".into())),
        };
        let mut shape = ShapeSpec::parse(&shape_text)?;
        if let Some(h) = flags.h.or(file.h) {
            shape.h = h;
        }
        if !(shape.h > 0.0 && shape.h.is_finite()) {
            return Err(Error::Config(format!("h must be positive, got {}", shape.h)));
        }
        // Mask paths in a config file are relative to that file.
        if let (true, Some(base), ShapeKind::FromMaskFile { path }) = (from_file, &base, &mut shape.kind) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let Some(p) = shape.input_file() {
            if !p.is_file() {
                return Err(Error::Config(format!("mask file {} does not exist", p.display())));
            }
        }

        let lambda = match (&flags.lambda, file.lambda) {
            (Some(l), _) => l.clone(),
            (None, Some(OneOrMany::One(l))) => vec![l],
            (None, Some(OneOrMany::Many(l))) => l,
            (None, None) => Vec::new(),
        };
        let n_ladder = match (&flags.n_ladder, file.n_ladder) {
            (Some(s), _) => s.parse()?,
            (None, Some(LadderValue::Word(s))) => s.parse()?,
            (None, Some(LadderValue::Counts(ns))) if !ns.is_empty() => Ladder::Explicit(ns),
            (None, Some(LadderValue::Counts(_))) => return Err(Error::Config("n_ladder is empty".into())),
            (None, None) => Ladder::Auto,
        };
        let format = match flags.format.as_deref().or(file.format.as_deref()) {
            Some(s) => s.parse()?,
            None => Format::Json,
        };
        let threads = flags.threads.or(file.threads).unwrap_or_else(default_threads).max(1);
        Ok(ExperimentConfig {
            shape,
            delta: flags.delta.or(file.delta),
            lambda,
            n_ladder,
            trials: flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            format,
            unit: flags.unit.clone().or(file.unit).unwrap_or_else(|| DEFAULT_UNIT.to_string()),
            threads,
        })
    }

    pub fn need_delta(&self) -> Result<f64> {
        self.delta.ok_or_else(|| Error::Config("this command needs --delta".into()))
    }

    pub fn need_lambda(&self) -> Result<f64> {
        match self.lambda.as_slice() {
            [l] => Ok(*l),
            [] => Err(Error::Config("this command needs --lambda".into())),
            _ => Err(Error::Config("this command takes a single --lambda".into())),
        }
    }
}
