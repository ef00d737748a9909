//! `ftwalk` command-line front-end.
//!
//! Wires the pipeline graph → walk operator → two-level decomposition →
//! angle tables → gate program → verification report, plus plot data and
//! the Steane-code protocol checks.

mod checks;
mod commands;
mod report;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ftwalk::synth::Policy;

pub use checks::{steane_checks, CheckResult};
pub use commands::{plot_data, simulate_csv};
pub use report::{read_program, verify, ProgramMeta, VerificationReport};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ftwalk", version, about = "Compile quantum walk operators into Clifford+T gate programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the walk operator U = T·C of a graph and write it as a matrix file.
    WalkBuild {
        graph: PathBuf,
        /// `grover`, `identity` or `file:<dir>` holding `<vertex>.json` coins.
        #[arg(long, default_value = "grover")]
        coin: String,
        /// `default` or `file:<order list>`.
        #[arg(long, default_value = "default")]
        order: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decompose a unitary into two-level rotations.
    Decompose {
        matrix: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search gate sequences and write the four R_y angle tables.
    Table {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        node_budget: Option<usize>,
        /// Deduplicate matrices up to global phase.
        #[arg(long)]
        phase_fold: bool,
        /// Also print every angle of each table.
        #[arg(long)]
        list_angles: bool,
    },
    /// Replace every rotation of a decomposition with a table sequence.
    Compile {
        decomposition: PathBuf,
        #[arg(long)]
        tables: PathBuf,
        /// `best` (smallest r first) or `shortest`.
        #[arg(long, default_value = "best", value_parser = parse_policy)]
        policy: Policy,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare a gate program against a target operator (JSON report).
    Verify { program: PathBuf, matrix: PathBuf },
    /// Iterate a walk and print per-step state probabilities as CSV.
    #[command(group(ArgGroup::new("operator").required(true).args(["matrix", "program"])))]
    Simulate {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        program: Option<PathBuf>,
        /// Dimension of a program's operator; defaults to the next power of two.
        #[arg(long, requires = "program")]
        dim: Option<usize>,
        /// 1-based basis state to start from.
        #[arg(long, default_value_t = 1, conflicts_with = "state")]
        start: usize,
        /// JSON file `{"re": [..], "im": [..]}` with the initial amplitudes.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Print (angle, smallest r) pairs over all tables in a directory.
    PlotData { tables: PathBuf },
    /// Steane-code protocol checks and the fault-tolerant T demo.
    Steane(SteaneArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["check", "demo"])))]
pub struct SteaneArgs {
    #[arg(long)]
    pub check: Option<CheckSet>,
    #[arg(long)]
    pub demo: Option<Demo>,
    /// Forced outcome of the data-block measurement.
    #[arg(long, requires = "demo", value_parser = clap::value_parser!(u8).range(0..=1))]
    pub branch: Option<u8>,
    /// Forced outcome of the ancilla-preparation measurement.
    #[arg(long, requires = "demo", value_parser = clap::value_parser!(u8).range(0..=1))]
    pub ancilla_branch: Option<u8>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckSet {
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    TGate,
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: ftwalk::Error| e.to_string())
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ftwalk::Error> for CliError {
    fn from(e: ftwalk::Error) -> Self {
        CliError {
            code: if e.is_validation() { EXIT_VALIDATION } else { EXIT_INTERNAL },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::internal(e.to_string())
    }
}

/// Runs one command. Primary output goes to `out`, diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    use commands::*;
    match cli.command {
        Command::WalkBuild { graph, coin, order, out: path } => walk_build(&graph, &coin, &order, path.as_deref(), out),
        Command::Decompose { matrix, out: path } => decompose(&matrix, path.as_deref(), out, err),
        Command::Table {
            max_len,
            out: dir,
            workers,
            node_budget,
            phase_fold,
            list_angles,
        } => {
            let mut opts = ftwalk::synth::SearchOptions::new(max_len);
            opts.workers = workers;
            opts.node_budget = node_budget;
            opts.phase_fold = phase_fold;
            table(&opts, &dir, list_angles, out, err)
        }
        Command::Compile {
            decomposition,
            tables,
            policy,
            out: path,
        } => compile(&decomposition, &tables, policy, path.as_deref(), out),
        Command::Verify { program, matrix } => verify_cmd(&program, &matrix, out),
        Command::Simulate {
            matrix,
            program,
            dim,
            start,
            state,
            steps,
        } => simulate(matrix.as_deref(), program.as_deref(), dim, start, state.as_deref(), steps, out),
        Command::PlotData { tables } => plot_data_cmd(&tables, out),
        Command::Steane(args) => steane(&args, out),
    }
}
