//! `reflekt`: JSON front end to the reflekt library.
//!
//! Exit codes: 0 success, 1 a verification failed (or a computation broke
//! down), 2 bad usage or input.

mod cache;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reflekt::group::{GroupError, DEFAULT_MAX_ORDER};
use reflekt::kz::{KzConfig, KzError, DEFAULT_SEED as KZ_SEED, DEFAULT_TOLERANCE};
use reflekt::minmat::DEFAULT_SEED as MINMAT_SEED;

use crate::cache::Cache;

#[derive(Parser, Debug)]
#[command(name = "reflekt", version, about = "Invariant theory, fake degrees and KZ monodromy of complex reflection groups")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Refuse groups larger than this.
    #[arg(long, global = true, env = "REFLEKT_MAX_ORDER", default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    /// Seed for every randomized step (base points, generic combinations).
    #[arg(long, global = true, env = "REFLEKT_SEED")]
    seed: Option<u64>,
    /// Local relative error per integration step (kz).
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Largest group order accepted by kz commands.
    #[arg(long, global = true, default_value_t = 48)]
    kz_max_order: usize,
    /// Largest representation degree accepted by kz commands.
    #[arg(long, global = true, default_value_t = 4)]
    kz_max_degree: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group data: `group S3 info`.
    Group {
        /// `Sn`, `G(m,p,n)` or `file:<path>` with a JSON list of generator matrices.
        descriptor: String,
        #[arg(value_enum, default_value_t = GroupAction::Info)]
        action: GroupAction,
    },
    /// Exact character table.
    Chars { descriptor: String },
    /// Fake degrees of every irreducible character.
    Fake {
        descriptor: String,
        /// Also write the table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run one identity over every irreducible character.
    Verify {
        #[arg(value_enum)]
        identity: Identity,
        descriptor: String,
    },
    /// Minimal polynomial matrices, with their checks.
    Minmat {
        descriptor: String,
        /// Row of the character table; all rows when omitted.
        #[arg(long)]
        rep: Option<usize>,
    },
    /// KZ monodromy.
    Kz {
        #[command(subcommand)]
        op: KzCommand,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GroupAction {
    Info,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Identity {
    Pn,
    Symmetry,
    Palindrome,
    Poincare,
}

#[derive(Subcommand, Debug)]
enum KzCommand {
    /// Generator matrices for one irreducible and Hecke residuals.
    Monodromy {
        descriptor: String,
        #[arg(long)]
        rep: usize,
        /// Labels as JSON, e.g. '{"0": [0, "1/3"]}'; entries may be [re, im].
        #[arg(long)]
        k: String,
    },
    /// The permutation of irreducibles induced at integral labels.
    Gamma {
        descriptor: String,
        #[arg(long)]
        k: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::BadDescriptor(_)
            | GroupError::InvalidParameters(_)
            | GroupError::OrderCap(..)
            | GroupError::File(_)
            | GroupError::NonUnitary(..)
            | GroupError::NotReflectionGroup(..) => CliError::Input(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<KzError> for CliError {
    fn from(e: KzError) -> Self {
        match e {
            KzError::Labels(_) | KzError::NotIntegral | KzError::TooLarge { .. } | KzError::Generators => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

pub fn compute_err(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

/// Resolved settings shared by every command.
pub struct Ctx {
    pub max_order: usize,
    pub seed: Option<u64>,
    pub kz: KzConfig,
    pub cache: Option<Cache>,
}

/// Result of a command: its JSON payload and whether all checks passed.
pub struct Outcome {
    pub result: Value,
    pub pass: bool,
}

fn config_json(cli: &Cli, command: Value) -> Value {
    let g = &cli.global;
    json!({
        "command": command,
        "max_order": g.max_order,
        "seed": g.seed,
        "output": g.output.as_ref().map(|p| p.display().to_string()),
        "kz": {
            "tolerance": g.tolerance,
            "max_order": g.kz_max_order,
            "max_degree": g.kz_max_degree,
        },
    })
}

fn command_json(c: &Command) -> Value {
    match c {
        Command::Group { descriptor, action } => json!({"name": "group", "descriptor": descriptor, "action": format!("{action:?}").to_lowercase()}),
        Command::Chars { descriptor } => json!({"name": "chars", "descriptor": descriptor}),
        Command::Fake { descriptor, csv } => {
            json!({"name": "fake", "descriptor": descriptor, "csv": csv.as_ref().map(|p| p.display().to_string())})
        }
        Command::Verify { identity, descriptor } => {
            json!({"name": "verify", "identity": format!("{identity:?}").to_lowercase(), "descriptor": descriptor})
        }
        Command::Minmat { descriptor, rep } => json!({"name": "minmat", "descriptor": descriptor, "rep": rep}),
        Command::Kz { op: KzCommand::Monodromy { descriptor, rep, k } } => {
            json!({"name": "kz monodromy", "descriptor": descriptor, "rep": rep, "k": k})
        }
        Command::Kz { op: KzCommand::Gamma { descriptor, k } } => json!({"name": "kz gamma", "descriptor": descriptor, "k": k}),
    }
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Group { descriptor, action: GroupAction::Info } => report::group_info(ctx, descriptor),
        Command::Chars { descriptor } => report::chars(ctx, descriptor),
        Command::Fake { descriptor, csv } => report::fake(ctx, descriptor, csv.as_deref()),
        Command::Verify { identity, descriptor } => match identity {
            Identity::Pn => report::verify_pn(ctx, descriptor),
            Identity::Symmetry => report::verify_symmetry(ctx, descriptor),
            Identity::Palindrome => report::verify_palindrome(ctx, descriptor),
            Identity::Poincare => report::verify_poincare(ctx, descriptor),
        },
        Command::Minmat { descriptor, rep } => report::minmat(ctx, descriptor, *rep),
        Command::Kz { op: KzCommand::Monodromy { descriptor, rep, k } } => report::kz_monodromy(ctx, descriptor, *rep, k),
        Command::Kz { op: KzCommand::Gamma { descriptor, k } } => report::kz_gamma(ctx, descriptor, k),
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let g = &cli.global;
    if !(g.tolerance > 0.0 && g.tolerance <= DEFAULT_TOLERANCE) {
        return Err(CliError::Input(format!("--tolerance must be in (0, {DEFAULT_TOLERANCE:e}]")));
    }
    let ctx = Ctx {
        max_order: g.max_order,
        seed: g.seed,
        kz: KzConfig {
            tolerance: g.tolerance,
            seed: g.seed.unwrap_or(KZ_SEED),
            max_order: g.kz_max_order,
            max_degree: g.kz_max_degree,
            ..KzConfig::default()
        },
        cache: Cache::from_env(),
    };
    let outcome = dispatch(cli, &ctx)?;
    let mut config = config_json(cli, command_json(&cli.command));
    config["resolved_seed"] = json!({"kz": ctx.kz.seed, "minmat": g.seed.unwrap_or(MINMAT_SEED)});
    let doc = json!({
        "version": format!("{}/{}", env!("CARGO_PKG_VERSION"), reflekt::ALGORITHM_VERSION),
        "config": config,
        "pass": outcome.pass,
        "result": outcome.result,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(compute_err)?;
    text.push('\n');
    match &g.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
