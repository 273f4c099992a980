//! Command-line harness: frame fixtures, Gram and tensor reports, the seeded
//! verification suite and inverse-norm trends.
//!
//! Exit codes: 0 when everything passes, 1 when a verification check fails,
//! 2 for usage, parse and input errors.

pub mod commands;
pub mod report;
pub mod suite;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use frametensor_core::{Error, TensorAlgebraSpec};

use commands::{FrameKind, PerturbationKind};
use suite::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "frametensor", version, about = "Frame localisation and rank-four tensor algebra diagnostics")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Tolerance override `CHECK=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrix, algebra norm and decay profile of a frame file.
    Gram {
        frame: PathBuf,
        #[arg(long, default_value = "jaffard:2")]
        spec: String,
    },
    /// Gram tensor of the product of two frames, with factorised norms.
    Tensor {
        frame1: PathBuf,
        frame2: PathBuf,
        #[arg(long, default_value = "jaffard:2")]
        spec1: String,
        #[arg(long, default_value = "jaffard:3")]
        spec2: String,
    },
    /// Run the seeded verification suite.
    Verify {
        #[arg(long, default_value_t = 4)]
        n1: usize,
        #[arg(long, default_value_t = 4)]
        n2: usize,
        /// Trials for every check; defaults differ per check.
        #[arg(long)]
        trials: Option<usize>,
        /// Replace the default spec pairs with a single pair.
        #[arg(long, requires = "spec2")]
        spec1: Option<String>,
        #[arg(long, requires = "spec1")]
        spec2: Option<String>,
    },
    /// Inverse norms of identity plus perturbation across truncation sizes.
    InverseTrend {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "schur:1:0")]
        spec1: String,
        #[arg(long, default_value = "sjostrand:0")]
        spec2: String,
        /// Target `norm_a` of the perturbation.
        #[arg(long, default_value_t = 0.5)]
        perturbation: f64,
        #[arg(long, value_enum, default_value_t = PerturbationKind::Localised)]
        kind: PerturbationKind,
    },
    /// Write a fixture frame.
    GenFrame {
        #[arg(long, value_enum)]
        kind: FrameKind,
        #[arg(long)]
        n: usize,
        /// Gaussian window width for shift-invariant frames.
        #[arg(long, default_value_t = 2.0)]
        width: f64,
    },
}

fn parse_tolerance(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected CHECK=VALUE, got {text:?}"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("bad tolerance value {value:?}"))?;
    Ok((name.to_string(), value))
}

fn spec_pair(spec1: &str, spec2: &str) -> Result<TensorAlgebraSpec, Error> {
    TensorAlgebraSpec::new(commands::parse_spec(spec1)?, commands::parse_spec(spec2)?)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialise");
    text.push('\n');
    text
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            // a closed pipe is not worth a panic
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    let text = match &cli.command {
        Command::Gram { frame, spec } => {
            let spec = commands::parse_spec(spec)?;
            let report = commands::gram(&commands::read_frame(frame)?, &spec)?;
            match cli.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            }
        }
        Command::Tensor {
            frame1,
            frame2,
            spec1,
            spec2,
        } => {
            let spec = spec_pair(spec1, spec2)?;
            let f1 = commands::read_frame(frame1)?;
            let f2 = commands::read_frame(frame2)?;
            let report = commands::tensor(&f1, &f2, &spec)?;
            match cli.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            }
        }
        Command::Verify {
            n1,
            n2,
            trials,
            spec1,
            spec2,
        } => {
            let spec_pairs = match (spec1, spec2) {
                (Some(a), Some(b)) => vec![spec_pair(a, b)?],
                _ => suite::default_spec_pairs(),
            };
            let cfg = RunConfig {
                seed: cli.seed,
                outer_size: *n1,
                inner_size: *n2,
                trials: *trials,
                tolerances: cli.tolerances.iter().cloned().collect::<BTreeMap<_, _>>(),
                spec_pairs,
            };
            let report = suite::run_verification(&cfg)?;
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            };
            emit(cli, &text)?;
            for failure in report.failures() {
                eprintln!(
                    "FAILED {}: max violation {:e} exceeds tolerance {:e} over {} trials",
                    failure.name, failure.max_violation, failure.tolerance, failure.trials
                );
            }
            return Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED });
        }
        Command::InverseTrend {
            sizes,
            spec1,
            spec2,
            perturbation,
            kind,
        } => {
            let spec = spec_pair(spec1, spec2)?;
            let rows = commands::inverse_trend(cli.seed, sizes, &spec, *perturbation, *kind)?;
            match cli.format {
                Format::Json => json(&rows),
                Format::Csv => commands::trend_csv(&rows),
            }
        }
        Command::GenFrame { kind, n, width } => {
            let frame = commands::gen_frame(*kind, *n, *width)?;
            match cli.format {
                Format::Json => commands::frame_json(&frame) + "\n",
                Format::Csv => commands::frame_csv(&frame),
            }
        }
    };
    emit(cli, &text)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
