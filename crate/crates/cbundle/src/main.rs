use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cbundle::commands::{self, CountArgs};
use cbundle::CliError;

#[derive(Parser)]
#[command(name = "cbundle", version, about = "Conic bundle surfaces over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant, fibre classification and invariants of a surface file.
    Analyze { file: PathBuf },
    /// N(B), D(B) and the density sum as CSV, one row per bound.
    Count {
        file: PathBuf,
        #[arg(long = "B", num_args = 1.., required = true)]
        bounds: Vec<u64>,
        /// Largest prime in the truncated Euler product.
        #[arg(long, default_value_t = 50)]
        pmax: u64,
        /// Quadrature steps for the real density.
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Base point of the congruence data; searched for when absent.
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["S0", "T0"])]
        base: Option<Vec<i64>>,
        /// Fibres with max(|s|, |t|) ≤ B^exponent are counted.
        #[arg(long, default_value_t = 0.5)]
        exponent: f64,
        /// Leave the density column empty.
        #[arg(long)]
        skip_density: bool,
        /// Print D as an exact fraction; slow for large bounds.
        #[arg(long)]
        exact: bool,
    },
    /// Closed form and brute-force local densities of a ternary form "a b c d e f".
    Densities {
        form: String,
        #[arg(long = "p", num_args = 1.., required = true)]
        primes: Vec<u64>,
        /// Oracle depth; defaults to v_p(disc) + 2.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Admissibility report and the divisor sum D(B) as CSV.
    Detector {
        file: PathBuf,
        #[arg(long = "B", num_args = 1.., required = true)]
        bounds: Vec<u64>,
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["S0", "T0"])]
        base: Option<Vec<i64>>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Print D as an exact fraction; slow for large bounds.
        #[arg(long)]
        exact: bool,
    },
    /// Del Pezzo surfaces: subgroup classification, criteria and bundle models.
    Dp {
        #[command(subcommand)]
        action: DpAction,
    },
}

#[derive(Subcommand)]
enum DpAction {
    /// Conjugacy classes of subgroups of the Weyl group with their conic bundle data.
    Classify {
        #[arg(long)]
        degree: u32,
        /// Allow the long degree 3 run.
        #[arg(long)]
        deep: bool,
    },
    /// Whether a surface file is a del Pezzo surface of the given degree.
    Check {
        #[arg(long)]
        degree: u32,
        file: PathBuf,
    },
    /// The standard bundle model for a degree.
    Model {
        #[arg(long)]
        degree: u32,
    },
}

fn pair(v: Option<Vec<i64>>) -> Option<(i64, i64)> {
    v.map(|v| (v[0], v[1]))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Analyze { file } => commands::analyze(&file),
        Command::Count { file, bounds, pmax, steps, workers, base, exponent, skip_density, exact } => commands::count(
            &file,
            &CountArgs { bounds, p_max: pmax, steps, workers, base: pair(base), exponent, skip_density, exact },
        ),
        Command::Densities { form, primes, depth } => commands::densities(&form, &primes, depth),
        Command::Detector { file, bounds, base, workers, exact } => {
            commands::detector(&file, &bounds, pair(base), workers, exact)
        }
        Command::Dp { action } => match action {
            DpAction::Classify { degree, deep } => commands::dp_classify(degree, deep),
            DpAction::Check { degree, file } => commands::dp_check(degree, &file),
            DpAction::Model { degree } => commands::dp_model(degree),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
