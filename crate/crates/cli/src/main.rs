//! `hdx`: generate complexes, inspect their spectra and run the bound checks.
//!
//! Exit status: 0 pass, 1 a checked inequality or verdict failed, 2 usage
//! error, 3 a theorem hypothesis does not hold, 4 unreadable or malformed input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "hdx",
    version,
    about = "Spectral checks on weighted pure simplicial complexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a fixture complex.
    Generate {
        #[command(subcommand)]
        kind: Kind,
        /// Output file; standard output when omitted.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Face counts, weight sums, link expansion profile and skeleton gap.
    Analyze {
        file: PathBuf,
        /// Threshold for the local expander verdict.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Proper level decomposition of a cochain.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run one bound over random and basis cochains.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Least-norm representative of a cochain modulo coboundaries.
    Minimize {
        file: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
        /// Also write the representative as a cochain file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum Kind {
    /// All (d+1)-subsets of n vertices.
    Complete { n: usize, d: usize },
    /// Transversals of disjoint vertex groups.
    Partite {
        /// Group sizes, comma separated.
        #[arg(value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        #[arg(short, long)]
        d: usize,
    },
    /// m random d-faces on n vertices with connected links.
    Random {
        n: usize,
        d: usize,
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Two triangles glued along an edge.
    TwoTriangles,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    FineGrained,
    AlevLau,
    Advantage,
    Trickling,
    Bootstrap,
    Updown,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::FineGrained => "fine-grained",
            Theorem::AlevLau => "alev-lau",
            Theorem::Advantage => "advantage",
            Theorem::Trickling => "trickling",
            Theorem::Bootstrap => "bootstrap",
            Theorem::Updown => "updown",
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Generate { kind, output } => commands::generate(&kind, output.as_deref()).map(|_| true),
        Command::Analyze { file, lambda, json } => commands::analyze(&file, lambda, json),
        Command::Decompose { file, cochain, json } => commands::decompose(&file, &cochain, json),
        Command::Verify {
            file,
            theorem,
            samples,
            seed,
            json,
        } => commands::verify(&file, theorem, samples, seed, json),
        Command::Minimize {
            file,
            cochain,
            output,
            json,
        } => commands::minimize(&file, &cochain, output.as_deref(), json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hdx: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
