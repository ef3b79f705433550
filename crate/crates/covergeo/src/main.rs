use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use covergeo::commands::{self, Output, RenderKind};
use covergeo::config::{ExperimentConfig, Format, Overrides};
use covergeo::report::to_pretty;
use covergeo::Error;

/// Random covers of bounded sets: shapes, partitions, coverage bounds,
/// flat-norm regularization and Monte Carlo checks.
///
/// Exit status is 0 on success, 2 when a hypothesis of a covering result
/// fails for the input (the message names the inequality), 1 otherwise.
#[derive(Parser)]
#[command(name = "covergeo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a shape to a mask and header.
    Shape {
        #[command(flatten)]
        common: Overrides,
    },
    /// Partition a shape at scale --delta and certify the partition.
    Partition {
        #[command(flatten)]
        common: Overrides,
        /// Fatten by the measured distance to the eroded set instead of
        /// requiring stability under opening.
        #[arg(long)]
        eta: bool,
    },
    /// Tabulate the coverage bounds along the sample-count ladder.
    Bound {
        #[command(flatten)]
        common: Overrides,
    },
    /// Compare empirical coverage with the bound along the ladder.
    Cover {
        #[command(flatten)]
        common: Overrides,
        /// Test against the per-region bound instead of the uniform one.
        #[arg(long)]
        regions: bool,
    },
    /// Minimize the flat norm for each --lambda.
    Flatnorm {
        #[command(flatten)]
        common: Overrides,
        /// Also locate the lambda where the minimizer stops being empty.
        #[arg(long)]
        threshold: bool,
        /// For disk-minus-hole shapes, check that the minimizer fills the hole.
        #[arg(long)]
        fill_in: bool,
    },
    /// Regularize, partition, bound and test almost-coverage end to end.
    Pipeline {
        #[command(flatten)]
        common: Overrides,
    },
    /// Draw a partition, boundary overlay or sample cover as SVG.
    Render {
        #[command(flatten)]
        common: Overrides,
        #[arg(long, value_enum)]
        kind: RenderKind,
        /// Label raster written by `partition`.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Extra masks whose boundaries to draw.
        #[arg(long)]
        overlay: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(Output, Format), Error> {
    let (common, action): (&Overrides, Box<dyn Fn(&ExperimentConfig) -> Result<Output, Error>>) = match &cli.command {
        Command::Shape { common } => (common, Box::new(commands::cmd_shape)),
        Command::Partition { common, eta } => (common, Box::new(|c| commands::cmd_partition(c, *eta))),
        Command::Bound { common } => (common, Box::new(commands::cmd_bound)),
        Command::Cover { common, regions } => (common, Box::new(|c| commands::cmd_cover(c, *regions))),
        Command::Flatnorm { common, threshold, fill_in } => {
            (common, Box::new(|c| commands::cmd_flatnorm(c, *threshold, *fill_in)))
        }
        Command::Pipeline { common } => (common, Box::new(commands::cmd_pipeline)),
        Command::Render { common, kind, labels, overlay } => {
            (common, Box::new(|c| commands::cmd_render(c, *kind, labels.as_deref(), overlay)))
        }
    };
    let cfg = ExperimentConfig::resolve(common)?;
    Ok((action(&cfg)?, cfg.format))
}

fn emit(out: &Output, format: Format) -> Result<(), Error> {
    let body = match format {
        Format::Json => to_pretty(&out.json),
        Format::Csv => out.csv.clone().ok_or_else(|| Error::Config("this command has no csv output".into()))?,
        Format::Svg => out.svg.clone().ok_or_else(|| Error::Config("this command has no svg output".into()))?,
    };
    eprint!("{}", out.summary);
    std::io::stdout()
        .write_all(body.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn main() -> ExitCode {
    // Clap reports usage errors with status 2, which is reserved here for
    // failed hypotheses.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(cli).and_then(|(out, format)| {
        emit(&out, format)?;
        match out.failure {
            Some(msg) => Err(Error::CheckFailed(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("covergeo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
