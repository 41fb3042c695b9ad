use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod verify;

use error::CliError;

#[derive(Parser)]
#[command(name = "grounded-chi", version, about = "Grounded set families on the half-plane grid: generate, analyze, verify, render")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Random,
    Clique,
    Bracket,
    Pillars,
    Scene,
    Pierced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    Ladder,
    Layers,
    Pillars,
    Clip,
    Attach,
    Final,
    Dist2,
    Corollaries,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    #[default]
    Exact,
    Recursive,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated family or scene file.
    Gen(GenArgs),
    /// Print size, clique number, chromatic number and order of a file.
    Analyze(AnalyzeArgs),
    /// Run a seeded verification campaign.
    Verify(VerifyArgs),
    /// Print the bound table up to k.
    Bounds(BoundsArgs),
    /// Draw a family, scene or trace file as SVG.
    Render(RenderArgs),
}

#[derive(clap::Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Baseline columns available to bases.
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    /// Reject growth steps that would create a larger clique.
    #[arg(long)]
    pub max_clique: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(clap::Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
    /// Clique bound handed to the scene pipeline; defaults to the scene's clique number.
    #[arg(long)]
    pub k: Option<usize>,
    /// Write the pipeline trace of a scene here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub oracle: OracleArg,
}

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub lemma: Lemma,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Write the JSON-lines report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Save failing instances into this directory.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Include wall-clock time per record (breaks byte-identical output).
    #[arg(long)]
    pub timing: bool,
}

#[derive(clap::Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(clap::Args)]
pub struct RenderArgs {
    pub file: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Bounds(a) => commands::bounds(&a),
        Command::Render(a) => commands::render(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
