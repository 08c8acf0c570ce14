//! Command-line front end: reads a TOML run configuration, runs one
//! subcommand and writes a versioned JSON document or a fixed-header CSV
//! table.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};
use output::Document;

#[derive(Debug, Parser)]
#[command(
    name = "collision-game",
    version,
    about = "Equilibria and arrival-count limit laws of the one-shot collision game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Pure, mixed and fully-mixed equilibria with verification results.
    Equilibria,
    /// Limit law of the arrival count and convergence diagnostics.
    Limit,
    /// Distance between exact FMNE arrival laws and a reference law.
    Distance,
    /// Monte Carlo play at the FMNE or a given profile.
    Simulate,
    /// Cartesian product over families and player counts, in long format.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Equilibria => "equilibria",
            Self::Limit => "limit",
            Self::Distance => "distance",
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `simulate.trials`.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Overrides `format` (json by default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Overrides `out`; standard output when neither is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the output schema of the subcommand and exit.
    #[arg(long, global = true)]
    pub schema: bool,
}

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "invalid configuration: {e:#}"),
            Self::Io(e) => write!(f, "{e:#}"),
        }
    }
}

/// Loads the configuration named by `options` and applies the flag
/// overrides.
pub fn load_config(options: &Options) -> Result<RunConfig, Failure> {
    let path = options
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config(anyhow::anyhow!("--config is required")))?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::Io(anyhow::Error::new(e).context(format!("reading {}", path.display())))
    })?;
    let mut cfg = RunConfig::parse(&text).map_err(Failure::Config)?;
    if let Some(seed) = options.seed {
        cfg.seed = Some(seed);
    }
    if let Some(trials) = options.trials {
        cfg.simulate.trials = Some(trials);
    }
    if let Some(format) = options.format {
        cfg.format = Some(format);
    }
    if let Some(out) = &options.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

pub fn validate(command: Command, cfg: &RunConfig) -> anyhow::Result<()> {
    match command {
        Command::Equilibria => commands::validate_equilibria(cfg),
        Command::Limit => commands::validate_limit(cfg),
        Command::Distance => commands::validate_distance(cfg),
        Command::Simulate => commands::validate_simulate(cfg),
        Command::Sweep => commands::validate_sweep(cfg),
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.options.schema {
        print!("{}", output::schema(cli.command));
        return Ok(());
    }
    let cfg = load_config(&cli.options)?;
    validate(cli.command, &cfg).map_err(Failure::Config)?;
    let format = cfg.format.unwrap_or(Format::Json);
    let out = cfg.out.as_deref();
    let io = Failure::Io;
    // Validation has already rejected every input the library would refuse.
    let compute = Failure::Config;
    match cli.command {
        Command::Equilibria => {
            let doc = Document::new(cli.command, commands::equilibria(&cfg).map_err(compute)?);
            output::write(&doc, output::equilibria_table, format, out).map_err(io)
        }
        Command::Limit => {
            let doc = Document::new(cli.command, commands::limit(&cfg).map_err(compute)?);
            output::write(&doc, output::limit_table, format, out).map_err(io)
        }
        Command::Distance => {
            let doc = Document::new(cli.command, commands::distance(&cfg).map_err(compute)?);
            output::write(&doc, output::distance_table, format, out).map_err(io)
        }
        Command::Simulate => {
            let doc = Document::new(cli.command, commands::simulate_cmd(&cfg).map_err(compute)?);
            output::write(&doc, output::simulate_table, format, out).map_err(io)
        }
        Command::Sweep => {
            let doc = Document::new(cli.command, commands::sweep(&cfg).map_err(compute)?);
            output::write(&doc, output::sweep_table, format, out).map_err(io)
        }
    }
}
