use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use collana::driver::{self, AnalyzeOptions, DriverError};
use collana::horn::Mode;
use collana::mset::DEFAULT_MAX_STATES;
use collana::oracle::OracleOptions;

#[derive(Parser, Debug)]
#[command(name = "collana", version, about = "Collection analysis of Horn clause programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prove the verification conditions of an annotated program
    Analyze(AnalyzeArgs),
    /// Prove a standalone sequent file
    Prove(ProveArgs),
    /// Test the annotations against random ground queries
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Multiset,
    Set,
    Dlist,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Multiset => Mode::Multiset,
            ModeArg::Set => Mode::Set,
            ModeArg::Dlist => Mode::Dlist,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    program: PathBuf,
    annotations: PathBuf,
    /// Override the mode given in the annotation file
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Search bound for multiset statements
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t)]
    report: ReportFormat,
    /// Print each derivation or search summary
    #[arg(long)]
    trace: bool,
    /// Derive constructor maps from the type declarations when none is given
    #[arg(long)]
    derive_ctors: bool,
    /// Prover threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct ProveArgs {
    sequent: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t)]
    report: ReportFormat,
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    program: PathBuf,
    annotations: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    derive_ctors: bool,
    #[arg(long, value_enum, default_value_t)]
    report: ReportFormat,
}

fn run(cli: Cli) -> Result<i32, DriverError> {
    match cli.command {
        Command::Analyze(a) => {
            let opts = AnalyzeOptions {
                mode: a.mode.map(Mode::from),
                max_states: a.max_states,
                derive_ctors: a.derive_ctors,
                jobs: a.jobs,
                trace: a.trace,
            };
            let report = driver::analyze(&a.program, &a.annotations, &opts)?;
            match a.report {
                ReportFormat::Text => print!("{}", report.to_text()),
                ReportFormat::Json => println!("{}", report.to_json()),
            }
            Ok(report.exit_code())
        }
        Command::Prove(a) => {
            let report = driver::prove_file(&a.sequent, a.max_states)?;
            match a.report {
                ReportFormat::Text => print!("{}", report.to_text(a.trace)),
                ReportFormat::Json => println!("{}", report.to_json()),
            }
            Ok(report.exit_code())
        }
        Command::Oracle(a) => {
            let opts = OracleOptions {
                trials: a.trials,
                seed: a.seed,
                ..OracleOptions::default()
            };
            let report = driver::oracle(&a.program, &a.annotations, a.mode.map(Mode::from), a.derive_ctors, &opts)?;
            match a.report {
                ReportFormat::Text => print!("{}", report.to_text()),
                ReportFormat::Json => println!("{}", report.to_json()),
            }
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
