//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use susy_sta::numerics::CouplingCache;

use crate::commands::{self, CommandOutput};
use crate::config::{ModeSelection, OutputFormat, Overrides, QslAngle, ScenarioConfig};
use crate::error::CliError;
use crate::output::emit;

#[derive(Debug, Parser)]
#[command(name = "susy-sta", version, about = "SUSY partner hierarchy of the expanding box")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON scenario file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub alpha: Option<u32>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Initial width.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub li: Option<f64>,
    /// Final over initial width.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub ratio: Option<f64>,
    /// Comma-separated ramp durations.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub tau: Option<Vec<f64>>,
    /// Instantaneous eigenbasis size.
    #[arg(long, global = true)]
    pub basis: Option<usize>,
    /// Gauss-Legendre nodes.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeSelection>,
    /// Bures angle entering the non-adiabatic speed limit.
    #[arg(long, global = true, value_enum)]
    pub qsl_angle: Option<QslAngle>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the SUSY identities and matrix invariants.
    Verify {
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
    /// Energy table; --alpha and --n are maxima (default 4 and 5).
    Spectrum,
    /// Width protocol for the first --tau.
    Ramp,
    /// Time series for each state, tau and mode; tau = 0 is a sudden quench.
    Evolve,
    /// Observables over states x taus x modes.
    Sweep,
    /// Ground-state and isospectral sets, bare dynamics.
    Fig2,
    /// Same rows as fig2; the cost and speed-limit columns.
    Fig3,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        let states = !matches!(self.command, Command::Spectrum);
        Overrides {
            alpha: self.alpha.filter(|_| states),
            n: self.n.filter(|_| states),
            li: self.li,
            ratio: self.ratio,
            taus: self.tau.clone(),
            basis: self.basis,
            nodes: self.nodes,
            rtol: self.rtol,
            mode: self.mode,
            qsl_angle: self.qsl_angle,
            out: self.out.clone(),
            format: self.format,
        }
    }

    pub fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::from_file(p)?,
            None => ScenarioConfig::default(),
        };
        cfg.apply(&self.overrides());
        cfg.validate(matches!(self.command, Command::Evolve))?;
        Ok(cfg)
    }
}

pub fn execute(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = cli.scenario()?;
    let cache = CouplingCache::new();
    let out = match &cli.command {
        Command::Verify { inject_sign_error } => commands::verify(&cfg, &cache, *inject_sign_error)?,
        Command::Spectrum => commands::spectrum(&cfg, cli.alpha.unwrap_or(4), cli.n.unwrap_or(5))?,
        Command::Ramp => commands::ramp(&cfg)?,
        Command::Evolve => commands::evolve(&cfg, &cache)?,
        Command::Sweep => commands::sweep(&cfg, &cache)?,
        Command::Fig2 => commands::fig2(&cfg, &cache)?,
        Command::Fig3 => commands::fig3(&cfg, &cache)?,
    };
    emit(&cfg, &out.text)?;
    Ok(out)
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if out.status != 0 {
                eprintln!("error: one or more checks or rows failed");
            }
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
