use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use twistlab_cli::{run_str, Command, OutputFormat, Overrides, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "twistlab", version, about = "Build, verify and classify twisting maps from JSON jobs")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Build a family (ore, almost_null, tower, dual_square, truncated_derivation, series, series_tower)
    Build(Args),
    /// Verify a family given by its matrix or tables
    Verify(Args),
    /// Classify a plane family by the root conditions
    ClassifyPlane(Args),
    /// Classify a dual-number pair (P, Q)
    ClassifyDual(Args),
    /// Rank and nullity of the classification matrix
    RankTable(Args),
    /// Exhaustive checks of the binomial identities
    Identities(Args),
    /// Run a job file naming its own command
    Run(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Job or params file; `-` reads standard input
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum)]
    output: Option<Format>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Treat the input as a series matrix (verify only)
    #[arg(long)]
    series: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn configure_threads() {
    if let Some(n) = std::env::var("TWISTLAB_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let (expected, args) = match cli.command {
        Sub::Build(a) => (Some(Command::Build), a),
        Sub::Verify(a) => (Some(Command::Verify), a),
        Sub::ClassifyPlane(a) => (Some(Command::ClassifyPlane), a),
        Sub::ClassifyDual(a) => (Some(Command::ClassifyDual), a),
        Sub::RankTable(a) => (Some(Command::RankTable), a),
        Sub::Identities(a) => (Some(Command::Identities), a),
        Sub::Run(a) => (None, a),
    };
    let text = if args.input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(&args.input)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.input.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let overrides = Overrides {
        degree: args.degree,
        nx: args.nx,
        ny: args.ny,
        seed: args.seed,
        series: args.series,
    };
    let (outcome, job_format) = run_str(&text, expected, &overrides);
    let format = match args.output {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Text) => OutputFormat::Text,
        None => job_format,
    };
    print!("{}", outcome.render(format));
    ExitCode::from(outcome.exit as u8)
}
