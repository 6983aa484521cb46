//! Command-line front end: configuration loading, dispatch to the core
//! library, CSV/JSON emission and sweeps.
//!
//! Exit codes: 0 success, 1 configuration, 2 validation, 3 numerical, 4 I/O.
//! Failures print a JSON object `{"error", "code", "message", "key"?}` to stderr.

pub mod commands;
pub mod config;
pub mod error;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::Artifact;
pub use config::{Command, Format, RunConfig};
pub use error::{CliError, ErrorKind};

#[derive(Debug, Parser)]
#[command(
    name = "sdquant",
    version,
    about = "Strictly-dissipative dynamics and its quantization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandArg>,

    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Artifact path; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Suppress the summary line.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Override a configuration value, e.g. `--set eta=2` or `--set sweep.count=8`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CommandArg {
    /// Integrate or sample a viscous trajectory.
    Trajectory,
    /// Run the strict-dissipation checks on a trajectory or on random draws.
    Classify,
    /// Compare the time and position forms of the dissipated work.
    TransformCheck,
    /// Finite-difference oscillator spectrum.
    Spectrum,
    /// Barrier transmission.
    Tunnel {
        /// paper_formula, paper_matching, numeric or baseline.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Sweep one parameter of a target command.
    Sweep,
}

impl CommandArg {
    fn command(&self) -> Command {
        match self {
            CommandArg::Trajectory => Command::Trajectory,
            CommandArg::Classify => Command::Classify,
            CommandArg::TransformCheck => Command::TransformCheck,
            CommandArg::Spectrum => Command::Spectrum,
            CommandArg::Tunnel { .. } => Command::Tunnel,
            CommandArg::Sweep => Command::Sweep,
        }
    }
}

fn default_format(command: Command) -> Format {
    match command {
        Command::Trajectory | Command::Sweep => Format::Csv,
        _ => Format::Json,
    }
}

fn format_from_extension(path: &Path) -> Option<Format> {
    match path.extension()?.to_str()? {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        _ => None,
    }
}

/// Resolved run: the command, its configuration and where its output goes.
pub struct Plan {
    pub command: Command,
    pub config: RunConfig,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Cli {
    pub fn plan(&self) -> Result<Plan, CliError> {
        let mut overrides = self.overrides.clone();
        if let Some(CommandArg::Tunnel { mode: Some(mode) }) = &self.command {
            overrides.push(format!("mode={mode:?}"));
        }
        if let Some(seed) = self.seed {
            overrides.push(format!("seed={seed}"));
        }
        let config = RunConfig::load(self.config.as_deref(), &overrides)?;

        let command = match (
            self.command.as_ref().map(CommandArg::command),
            config.command,
        ) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::config(format!(
                    "subcommand `{}` conflicts with command = \"{}\" in the config",
                    a.as_str(),
                    b.as_str()
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(CliError::config("no command given")),
        };
        config.check_params_for(command)?;

        let output = self.output.clone().or_else(|| config.output.path.clone());
        let format = self
            .format
            .or(config.output.format)
            .or_else(|| output.as_deref().and_then(format_from_extension))
            .unwrap_or_else(|| default_format(command));
        Ok(Plan {
            command,
            config,
            format,
            output,
        })
    }
}

pub fn execute(plan: &Plan) -> Result<Artifact, CliError> {
    let (cfg, f) = (&plan.config, plan.format);
    match plan.command {
        Command::Trajectory => commands::trajectory(cfg, f),
        Command::Classify => commands::classify(cfg, f),
        Command::TransformCheck => commands::transform_check(cfg, f),
        Command::Spectrum => commands::spectrum(cfg, f),
        Command::Tunnel => commands::tunnel(cfg, f),
        Command::Sweep => sweep::sweep(cfg, f),
    }
}

fn run_parsed(cli: &Cli) -> Result<(), CliError> {
    let plan = cli.plan()?;
    let artifact = execute(&plan)?;
    match &plan.output {
        Some(path) => {
            std::fs::write(path, &artifact.body)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            if !cli.quiet {
                println!("{}", artifact.summary);
            }
        }
        None => {
            std::io::stdout()
                .write_all(artifact.body.as_bytes())
                .map_err(|e| CliError::io(format!("cannot write to stdout: {e}")))?;
            if !cli.quiet {
                eprintln!("{}", artifact.summary);
            }
        }
    }
    Ok(())
}

/// Parse `args`, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            let err = CliError::config(first.trim_start_matches("error: "));
            eprintln!("{}", err.to_json());
            return err.code;
        }
    };
    match run_parsed(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.code
        }
    }
}
