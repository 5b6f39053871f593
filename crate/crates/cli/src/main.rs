use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use commands::CliError;

/// Gap-metric tools for pairs of orthogonal projections. Every command reads
/// matrix JSON files and prints a JSON report.
#[derive(Debug, Parser)]
#[command(name = "grassgap", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Record wall-clock time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long, value_name = "FILE")]
    p: PathBuf,
    #[arg(long, value_name = "FILE")]
    q: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GapMethod {
    Direct,
    Formula,
    Lower,
    Rank1,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RelationArg {
    Perp,
    Sharp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConfigArg {
    ExtraBlocks,
    GenericSubcritical,
    CriticalSine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    /// The map described by --spec.
    Spec,
    /// P ↦ I − P.
    Complement,
    /// Entrywise complex conjugation.
    Conjugate,
    Identity,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical two-projection form: block dimensions, sines, cosines, frame.
    Decompose {
        #[command(flatten)]
        pair: Pair,
        /// Singular values within TOL of 0 or 1 count as fixed blocks.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Gap ‖P − Q‖ by one or more methods.
    Gap {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "both")]
        method: GapMethod,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Rotation geodesic from P to Q, sampled at --theta or on a --grid.
    #[command(group = clap::ArgGroup::new("at").required(true).args(["theta", "grid"]))]
    Geodesic {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        theta: Option<f64>,
        /// Number of evenly spaced samples on [0, π/2].
        #[arg(long)]
        grid: Option<usize>,
    },
    /// An element of P^{≤ sin θ} ∩ Q^{≤ cos θ}.
    Midpoint {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        theta: f64,
        /// Unitary H1 → H2 (matrix JSON); identity when omitted.
        #[arg(long, value_name = "FILE")]
        u: Option<PathBuf>,
    },
    /// Geodesic through P, R, Q at θ = 0, π/4, π/2.
    ThreePoint {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_name = "FILE")]
        r: PathBuf,
        #[arg(long, default_value_t = 17)]
        grid: usize,
        /// Unitary V for the uniqueness probe (needs --theta).
        #[arg(long, value_name = "FILE", requires = "theta")]
        v: Option<PathBuf>,
        #[arg(long, requires = "v")]
        theta: Option<f64>,
    },
    /// Two distinct geodesics through one (P, R, Q) triple.
    Branch {
        #[arg(long, value_enum)]
        config: ConfigArg,
        /// Block sizes as JSON, inline or a file path.
        #[arg(long, value_name = "JSON|FILE")]
        params: String,
        /// Reparameterization {"kind", "params"}, inline or a file path.
        #[arg(long, value_name = "JSON|FILE")]
        f1: String,
        #[arg(long, value_name = "JSON|FILE")]
        f2: String,
        #[arg(long, default_value_t = 33)]
        grid: usize,
    },
    /// Chain from P to Q with consecutive ⊥ or ♯ links.
    Chain {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum)]
        relation: RelationArg,
        /// Dimension that counts as "infinite".
        #[arg(long, default_value_t = 3)]
        margin: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Block-form certificate for R near P and Q along a unit vector x.
    Edmon {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_name = "FILE")]
        r: PathBuf,
        /// Unit vector as an N x 1 matrix JSON.
        #[arg(long, value_name = "FILE")]
        x: PathBuf,
        #[arg(long)]
        theta: f64,
    },
    /// Check that an isometry spec preserves the gap and ∼ on random samples.
    VerifyMap {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, value_enum)]
        field: Option<Field>,
        /// Also report the image of this projection.
        #[arg(long, value_name = "FILE")]
        p: Option<PathBuf>,
    },
    /// Identify which unitary/antiunitary form a map takes.
    Classify {
        #[arg(long, value_enum, default_value = "spec")]
        oracle: OracleArg,
        #[arg(long, value_name = "FILE", required_if_eq("oracle", "spec"))]
        spec: Option<PathBuf>,
        /// Dimension for the built-in oracles.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_enum)]
        field: Option<Field>,
        #[arg(long, default_value_t = 6)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Orthogonal P, Q whose complements are not orthogonal.
    Counterexample {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Rank stratum of P.
    Stratum {
        #[arg(long, value_name = "FILE")]
        p: PathBuf,
        #[arg(long, default_value_t = 3)]
        margin: usize,
    },
    /// Chain of equal-rank projections with every step below gap 1.
    Connect {
        #[command(flatten)]
        pair: Pair,
    },
}

fn run(cmd: Command) -> Result<(&'static str, report::InputLog, commands::Outcome), CliError> {
    let mut log = report::InputLog::default();
    let (name, outcome) = match cmd {
        Command::Decompose { pair, tol } => ("decompose", commands::decompose(&mut log, &pair, tol)?),
        Command::Gap { pair, method, tol } => ("gap", commands::gap(&mut log, &pair, method, tol)?),
        Command::Geodesic { pair, theta, grid } => ("geodesic", commands::geodesic(&mut log, &pair, theta, grid)?),
        Command::Midpoint { pair, theta, u } => ("midpoint", commands::midpoint(&mut log, &pair, theta, u.as_deref())?),
        Command::ThreePoint { pair, r, grid, v, theta } => (
            "three-point",
            commands::three_point(&mut log, &pair, &r, grid, v.as_deref().zip(theta))?,
        ),
        Command::Branch { config, params, f1, f2, grid } => {
            ("branch", commands::branch(&mut log, config, &params, &f1, &f2, grid)?)
        }
        Command::Chain { pair, relation, margin, tol } => {
            ("chain", commands::chain(&mut log, &pair, relation, margin, tol)?)
        }
        Command::Edmon { pair, r, x, theta } => ("edmon", commands::edmon(&mut log, &pair, &r, &x, theta)?),
        Command::VerifyMap { spec, seed, samples, field, p } => (
            "verify-map",
            commands::verify_map(&mut log, &spec, seed, samples, field, p.as_deref())?,
        ),
        Command::Classify { oracle, spec, dim, field, samples, seed } => (
            "classify",
            commands::classify(&mut log, oracle, spec.as_deref(), dim, field, samples, seed)?,
        ),
        Command::Counterexample { k } => ("counterexample", commands::counterexample(&mut log, k)?),
        Command::Stratum { p, margin } => ("stratum", commands::stratum(&mut log, &p, margin)?),
        Command::Connect { pair } => ("connect", commands::connect(&mut log, &pair)?),
    };
    Ok((name, log, outcome))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let start = Instant::now();
    let (command, log, outcome) = match run(cli.command) {
        Ok(done) => done,
        Err(e) => {
            eprintln!("grassgap: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let rep = report::CommandReport {
        command: command.to_string(),
        inputs: log.finish(),
        outputs: outcome.outputs,
        residuals: outcome.residuals,
        elapsed: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let text = report::render(&rep.to_value(), true) + "\n";
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grassgap: cannot write report: {e}");
            ExitCode::from(2)
        }
    }
}
