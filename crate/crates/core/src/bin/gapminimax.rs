use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapminimax::dirac::ChannelConfig;
use gapminimax::workflow::{
    error_exit_code, parse_grid, parse_sizes, parse_splits, run, Command, MatrixInputs, RandomSuite, RunConfig,
    EXIT_INPUT,
};
use gapminimax::{Error, Result};

#[derive(Parser)]
#[command(name = "gapminimax", version, about = "Gap eigenvalues by Schur-complement minimax")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gap eigenvalues of one Dirac-Coulomb channel.
    Solve(Opts),
    /// Ground state over a coupling grid and a list of splits.
    Sweep(Opts),
    /// Ground-state error against basis size.
    Converge(Opts),
    /// Direct Rayleigh-Ritz versus minimax on an unbalanced basis.
    PollutionDemo(Opts),
    /// Form conditions (1)-(8) of Matrix Market inputs.
    CheckForms(Opts),
    /// Minimax against the dense pencil, for files or a seeded random suite.
    AbstractSolve(Opts),
}

#[derive(Args, Clone)]
#[command(allow_negative_numbers = true)]
struct Opts {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    kappa: Option<i32>,
    /// Comma-separated splits, P and/or T.
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Coupling grid: "lo:hi:step" or a comma-separated list.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated basis sizes.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Channel configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for <command>.csv and <command>.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Proceed past refusals: the T split above its coupling threshold, or
    /// failed form conditions in abstract-solve.
    #[arg(long)]
    force: bool,
    /// Override the command's assertion tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    n_splines: Option<usize>,
    /// Knot-interval factor of the upper component (pollution demo).
    #[arg(long)]
    upper_refinement: Option<usize>,
    #[arg(long)]
    m: Option<PathBuf>,
    #[arg(long)]
    q: Option<PathBuf>,
    #[arg(long)]
    v: Option<PathBuf>,
    /// Split descriptor JSON for Matrix Market inputs.
    #[arg(long)]
    split_file: Option<PathBuf>,
    /// Search ceiling for abstract-solve.
    #[arg(long)]
    b: Option<f64>,
    /// Number of random pairs for abstract-solve without files.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Dimension of the random pairs (drawn from 2..=40 when absent).
    #[arg(long)]
    dim: Option<usize>,
    /// Export the assembled channel matrices (solve).
    #[arg(long)]
    export: Option<PathBuf>,
}

fn build(command: Command, o: Opts) -> Result<RunConfig> {
    let mut c = RunConfig::new(command);
    c.channel = match &o.config {
        Some(path) => serde_json::from_str::<ChannelConfig>(&std::fs::read_to_string(path)?)?,
        None => ChannelConfig::new(-1),
    };
    if let Some(kappa) = o.kappa {
        c.channel.kappa = kappa;
    }
    if let Some(n) = o.n_splines {
        c.channel.n_splines = n;
    }
    c.channel.upper_refinement = match (o.upper_refinement, command) {
        (Some(f), _) => f,
        (None, Command::PollutionDemo) if o.config.is_none() => 2,
        (None, _) => c.channel.upper_refinement,
    };
    c.nu = match (command, &o.grid, o.nu) {
        (Command::Sweep, Some(grid), _) => parse_grid(grid)?,
        (Command::Sweep, None, Some(nu)) => vec![nu],
        (Command::Sweep, None, None) => parse_grid("0.1:0.9:0.1")?,
        (_, Some(_), _) => return Err(Error::InvalidParameter("--grid is only used by sweep".into())),
        (_, None, nu) => vec![nu.unwrap_or(0.5)],
    };
    if let Some(split) = &o.split {
        c.splits = parse_splits(split)?;
    }
    c.k_max = o.k.unwrap_or(match command {
        Command::PollutionDemo => 3,
        Command::AbstractSolve => 5,
        _ => 1,
    });
    c.eps = o.eps;
    if let Some(sizes) = &o.sizes {
        c.sizes = parse_sizes(sizes)?;
    }
    c.seed = o.seed;
    c.force = o.force;
    c.tolerance = o.tol;
    c.b = o.b;
    c.out = o.out;
    c.export = o.export;
    c.matrices = match (o.m, o.q, o.v, o.split_file) {
        (Some(m), Some(q), Some(v), Some(split)) => Some(MatrixInputs { m, q, v, split }),
        (None, None, None, None) => None,
        _ => return Err(Error::InvalidParameter("--m, --q, --v and --split-file go together".into())),
    };
    if command == Command::AbstractSolve && c.matrices.is_none() {
        c.random = Some(RandomSuite {
            count: o.count,
            dim: o.dim,
        });
    }
    Ok(c)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let (command, opts) = match cli.command {
        Cmd::Solve(o) => (Command::Solve, o),
        Cmd::Sweep(o) => (Command::Sweep, o),
        Cmd::Converge(o) => (Command::Converge, o),
        Cmd::PollutionDemo(o) => (Command::PollutionDemo, o),
        Cmd::CheckForms(o) => (Command::CheckForms, o),
        Cmd::AbstractSolve(o) => (Command::AbstractSolve, o),
    };
    let config = match build(command, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(&config) {
        Ok(record) => {
            if config.out.is_none() {
                match record.table.to_csv() {
                    Ok(csv) => print!("{csv}"),
                    Err(e) => eprintln!("error: {e}"),
                }
            }
            for failure in &record.failures {
                eprintln!("not computed: {failure}");
            }
            for a in record.assertions.iter().filter(|a| !a.pass) {
                eprintln!("FAILED {}: {:.3e} > {:.3e}", a.name, a.value, a.tolerance);
            }
            ExitCode::from(record.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::FormCheckFailed(report) = &e {
                if let Ok(json) = serde_json::to_string_pretty(report) {
                    eprintln!("{json}");
                }
            }
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
