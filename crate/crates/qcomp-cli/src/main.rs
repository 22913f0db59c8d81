//! `qcomp`: scriptable front end to the qcomp library.
//!
//! Each run writes one JSON or CSV report, to standard output or `--out`. Exit codes: 0 on
//! success, 1 when a checked relation is violated or output fails, 2 for bad input,
//! 3 when a size cap is exceeded and 4 when a numerical solver fails.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcomp::qkdrate::{Protocol, DEFAULT_MAX_BLOCK, THRESHOLD_TOL};

use commands::{codes, distill, qkd, uncertainty};
use error::CliError;
use report::{Context, Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "qcomp",
    version,
    about = "Complementarity-based quantum information toolkit"
)]
struct Cli {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit the timestamp so that identical runs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stabilizer-code tables and decoding demos.
    #[command(subcommand)]
    Codes(CodesCommand),
    /// Entropic uncertainty relations over a state file or `random:N[:seed]`.
    Uncertainty {
        #[arg(value_enum)]
        relation: uncertainty::Relation,
        states: String,
    },
    /// Entanglement distillation and hash-based codes.
    #[command(subcommand)]
    Distill(DistillCommand),
    /// QKD key rates and thresholds.
    #[command(subcommand)]
    Qkd(QkdCommand),
}

#[derive(Debug, Subcommand)]
enum CodesCommand {
    /// Syndromes of all single-qubit errors and the virtual-qubit basis.
    Table { code: String },
    /// Corrects every single-qubit Pauli error by maximum-likelihood decoding.
    DecodeDemo { code: String },
}

#[derive(Debug, Subcommand)]
enum DistillCommand {
    /// Hashing rate of a Bell-diagonal state.
    Hashing {
        /// Bell probabilities `p00,p01,p10,p11`.
        #[arg(long)]
        p: String,
    },
    /// Monte-Carlo CSS-hash distillation.
    Sim {
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: usize,
        /// Z-type checks; default from the hashing bound and `--margin`.
        #[arg(long)]
        n_z: Option<usize>,
        /// X-type checks; default from the hashing bound.
        #[arg(long)]
        n_x: Option<usize>,
        /// Rate gap below the hashing bound for the default check counts.
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Block error of a reconciliation-hash code over a binary symmetric channel.
    Channel {
        #[arg(long)]
        p_flip: f64,
        #[arg(long)]
        n: usize,
        /// Rate gap below capacity.
        #[arg(long)]
        gap: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
}

#[derive(Debug, Args)]
struct ModelOpts {
    /// bb84, sixstate or tetrahedral.
    #[arg(long, value_parser = parse_protocol)]
    protocol: Protocol,
    /// Noisy-preprocessing flip probability.
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Repetition block length.
    #[arg(long, default_value_t = 1)]
    m: usize,
}

impl ModelOpts {
    fn args(&self) -> qkd::ModelArgs {
        qkd::ModelArgs {
            protocol: self.protocol,
            q: self.q,
            m: self.m,
        }
    }
}

#[derive(Debug, Subcommand)]
enum QkdCommand {
    /// Key rate at one error rate.
    Rate {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        delta: f64,
    },
    /// Largest error rate with positive key at fixed `q`.
    Threshold {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long, default_value_t = THRESHOLD_TOL)]
        tol: f64,
    },
    /// Optimal preprocessing at `--delta`, or the optimized threshold without it.
    Optimize {
        #[arg(long, value_parser = parse_protocol)]
        protocol: Protocol,
        #[arg(long, default_value_t = 1, help = format!("Repetition block length (at most {DEFAULT_MAX_BLOCK})"))]
        m: usize,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = THRESHOLD_TOL)]
        tol: f64,
    },
    /// Rates over an evenly spaced error-rate grid.
    Sweep {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 0.15)]
        to: f64,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    Protocol::parse(s).map_err(|e| e.to_string())
}

/// Builds the report; a relation violation is returned alongside so that the report is
/// still written.
fn dispatch(cli: &Cli) -> Result<(Report, Option<CliError>), CliError> {
    let plain = |r: Report| Ok((r, None));
    match &cli.command {
        Command::Codes(CodesCommand::Table { code }) => plain(codes::table(code)?),
        Command::Codes(CodesCommand::DecodeDemo { code }) => plain(codes::decode_demo(code)?),
        Command::Uncertainty { relation, states } => {
            let source = uncertainty::Source::parse(states, cli.seed)?;
            let (report, violations) = uncertainty::run(*relation, &source)?;
            let total = report.rows.as_ref().map_or(0, Vec::len);
            let err = (violations > 0).then_some(CliError::Violations { violations, total });
            Ok((report, err))
        }
        Command::Distill(DistillCommand::Hashing { p }) => {
            plain(distill::hashing(&distill::parse_params(p)?)?)
        }
        Command::Distill(DistillCommand::Sim {
            p,
            n,
            n_z,
            n_x,
            margin,
            trials,
        }) => {
            let args = distill::SimArgs {
                n: *n,
                n_z: *n_z,
                n_x: *n_x,
                margin: *margin,
                trials: *trials,
            };
            plain(distill::sim(&distill::parse_params(p)?, args, cli.seed)?)
        }
        Command::Distill(DistillCommand::Channel {
            p_flip,
            n,
            gap,
            trials,
        }) => plain(distill::channel(*p_flip, *n, *gap, *trials, cli.seed)?),
        Command::Qkd(QkdCommand::Rate { model, delta }) => {
            plain(qkd::rate_at(&model.args(), *delta)?)
        }
        Command::Qkd(QkdCommand::Threshold { model, tol }) => {
            plain(qkd::threshold_at(&model.args(), *tol)?)
        }
        Command::Qkd(QkdCommand::Optimize {
            protocol,
            m,
            delta,
            tol,
        }) => {
            let args = qkd::ModelArgs {
                protocol: *protocol,
                q: 0.0,
                m: *m,
            };
            plain(qkd::optimize(&args, *delta, *tol)?)
        }
        Command::Qkd(QkdCommand::Sweep {
            model,
            from,
            to,
            steps,
        }) => plain(qkd::sweep(&model.args(), *from, *to, *steps)?),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Context {
        seed: cli.seed,
        format: cli.format,
        timestamp: !cli.no_timestamp,
    };
    let (report, pending) = dispatch(cli)?;
    report::emit(&report, &ctx, cli.out.as_deref())?;
    pending.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
