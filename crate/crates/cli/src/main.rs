use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod report;

/// Simulate probabilistic logic circuits as matrix products, search for
/// preimages and count solutions.
#[derive(Parser, Debug)]
#[command(name = "matcomp", version)]
struct Cli {
    #[command(flatten)]
    opts: Options,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Singular values at or below rank_tol * sigma_max are dropped.
    #[arg(long, global = true, default_value_t = 1e-12, value_name = "FLOAT")]
    pub rank_tol: f64,

    /// Cap every bond dimension (lossy).
    #[arg(long, global = true, value_name = "INT")]
    pub max_rank: Option<NonZeroUsize>,

    /// Largest width the dense reference will handle in `verify`.
    #[arg(long, global = true, default_value_t = 12, value_name = "INT",
          value_parser = clap::value_parser!(u64).range(1..=matcomp::ORACLE_MAX_BITS as u64))]
    pub oracle_cap: u64,

    /// Leave wall time out of the output, so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute a circuit and report marginal probabilities.
    Run {
        circuit: PathBuf,
        /// `bit=value,...` for one marginal, or `all-outputs` for the joint
        /// distribution of the output register.
        #[arg(long, default_value = "all-outputs", allow_hyphen_values = true)]
        marginal: String,
    },
    /// Find the smallest input that produces the target output.
    Search {
        circuit: PathBuf,
        /// Output values, `bit=value,...`, covering every output bit.
        #[arg(long)]
        target: String,
    },
    /// Count the inputs that produce the target output.
    Count {
        circuit: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// Compare the simulation against dense brute force.
    Verify {
        circuit: PathBuf,
        /// Scale one site after execution, to exercise the failure path.
        #[arg(long, hide = true, value_name = "BIT")]
        corrupt_site: Option<usize>,
    },
    /// Per-step entanglement heights and bond dimensions as CSV.
    Heights { circuit: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let opts = &cli.opts;
    let outcome = match &cli.command {
        Command::Run { circuit, marginal } => commands::run(circuit, marginal, opts),
        Command::Search { circuit, target } => commands::search(circuit, target, opts),
        Command::Count { circuit, target } => commands::count(circuit, target, opts),
        Command::Verify { circuit, corrupt_site } => commands::verify(circuit, *corrupt_site, opts),
        Command::Heights { circuit } => commands::heights(circuit, opts),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
