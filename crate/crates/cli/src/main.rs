mod commands;
mod complex;

use std::path::PathBuf;
use std::process::ExitCode;

use ahlfors::presets::PRESET_NAMES;
use ahlfors::Boundary;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

const EXIT_CODES: &str = "\
Exit status:
  0  success
  2  usage error: unknown flag, malformed value, n odd or below 8
  3  geometry error: invalid curve or region, a0 not interior
  4  solver error: singular or rank-deficient system, zero outside the region
  5  I/O error: unreadable region file or unwritable output

Complex numbers are written a+bi without spaces, e.g. --a0 -0.5+0.2i or --a0=-i.";

#[derive(Debug, Parser)]
#[command(
    name = "ahlfors",
    version,
    about = "Ahlfors map of doubly connected regions and recovery of its second zero",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recover the second zero a1 for one region and grid size
    #[command(after_help = EXIT_CODES)]
    Solve {
        #[command(flatten)]
        region: RegionArgs,
        /// Nodes per boundary curve (even, at least 8)
        #[arg(long, value_parser = parse_n, default_value = "64")]
        n: usize,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rerun the reference configurations behind one results table
    #[command(after_help = EXIT_CODES)]
    Table {
        #[arg(value_parser = ["1", "2", "3a", "3b"])]
        id: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write per-node tables or kernel matrices as CSV
    #[command(after_help = EXIT_CODES)]
    Export {
        what: ExportKind,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, value_parser = parse_n, default_value = "64")]
        n: usize,
        /// Output file (boundary, theta) or directory (kernels); stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve once per grid size and tabulate the convergence
    #[command(after_help = EXIT_CODES)]
    Sweep {
        #[command(flatten)]
        region: RegionArgs,
        /// Comma-separated grid sizes
        #[arg(long = "n-list", value_delimiter = ',', value_parser = parse_n, default_value = "16,32,64,128")]
        n_list: Vec<usize>,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct RegionArgs {
    /// Built-in region
    #[arg(long, value_parser = PRESET_NAMES, required_unless_present = "region", conflicts_with = "region")]
    preset: Option<String>,
    /// Region file: {"outer": {...}, "inner": {...}, "a0": [re, im]}
    #[arg(long)]
    region: Option<PathBuf>,
    /// Prescribed zero, overriding the preset or file value
    #[arg(long, value_parser = complex::parse, allow_hyphen_values = true)]
    a0: Option<Complex64>,
    /// Inner radius of the example1 annulus
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeKind {
    LeastSquares,
    ThreePoint,
}

#[derive(Debug, Args)]
struct ModeArgs {
    /// How the three-unknown system for a1 is closed
    #[arg(long, value_enum, default_value = "least-squares")]
    mode: ModeKind,
    /// Boundary parameter for three-point mode: t (outer curve) or inner:t
    #[arg(long, value_parser = parse_t, required_if_eq("mode", "three-point"), allow_hyphen_values = true)]
    t1: Option<TPoint>,
    #[arg(long, value_parser = parse_t, required_if_eq("mode", "three-point"), allow_hyphen_values = true)]
    t2: Option<TPoint>,
    #[arg(long, value_parser = parse_t, required_if_eq("mode", "three-point"), allow_hyphen_values = true)]
    t3: Option<TPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    /// Jets, S, S_p, theta' and f at every node
    Boundary,
    /// theta' at every node
    Theta,
    /// Kernel matrices, one CSV file each
    Kernels,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TPoint {
    boundary: Boundary,
    t: f64,
}

fn parse_n(text: &str) -> Result<usize, String> {
    let n: usize = text
        .parse()
        .map_err(|_| format!("{text:?} is not a whole number"))?;
    if n < 8 || n % 2 != 0 {
        return Err(format!("n must be even and at least 8, got {n}"));
    }
    Ok(n)
}

fn parse_t(text: &str) -> Result<TPoint, String> {
    let (boundary, value) = match text.split_once(':') {
        Some(("outer", v)) => (Boundary::Outer, v),
        Some(("inner", v)) => (Boundary::Inner, v),
        Some((other, _)) => return Err(format!("unknown boundary {other:?}; use outer or inner")),
        None => (Boundary::Outer, text),
    };
    match value.parse::<f64>() {
        Ok(t) if t.is_finite() => Ok(TPoint { boundary, t }),
        _ => Err(format!("{value:?} is not a finite parameter value")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
