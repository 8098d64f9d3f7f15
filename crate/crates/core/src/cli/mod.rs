//! Command-line surface: argument parsing, output directories and the six
//! commands. Every command writes CSV into the output directory together
//! with `config.txt`, the echoed configuration it ran with.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
pub use config::RunConfig;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MOVING_WELL_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ModeFlag {
    Printed,
    Oracle,
    #[default]
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "moving-well", version, about = "Phases and spectra of a particle in a spherical trap with a moving wall")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $MOVING_WELL_OUT, else ./out]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// ħ = m = 1 (overrides the config)
    #[arg(long, global = true, conflicts_with = "si")]
    pub natural_units: bool,
    /// SI units with the electron mass (overrides the config)
    #[arg(long, global = true)]
    pub si: bool,
    /// Geometric phase variant used for derived quantities
    #[arg(long, global = true, value_enum, default_value_t = ModeFlag::Both)]
    pub mode: ModeFlag,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Table of spherical Bessel zeros `l,n,beta`
    Zeros {
        #[arg(long)]
        l_max: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Dynamical, geometric and total phases over a time span
    Phases,
    /// Printed closed forms against their oracles
    Validate,
    /// Sideband line spectrum of one dipole transition
    Spectrum,
    /// Numerical propagation and phase split
    Propagate,
    /// Analytic wavefunction samples
    FieldDump,
}

/// Settings shared by every command after flags and config are merged.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub mode: ModeFlag,
}

impl Context {
    pub fn new(global: &GlobalArgs) -> Result<Self> {
        let mut config = match &global.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if global.si {
            config.units = config::UnitSystem::Si;
        } else if global.natural_units {
            config.units = config::UnitSystem::Natural;
        }
        let out = global
            .out
            .clone()
            .or_else(|| config.out_dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok(Self { config, out, mode: global.mode })
    }

    /// Creates the output directory and echoes the configuration into it.
    pub fn prepare(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out)?;
        write_file(&self.out.join("config.txt"), &self.config.to_text())
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The oracles disagreed with each other.
    Inconsistent,
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let ctx = Context::new(&cli.global)?;
    ctx.prepare()?;
    match &cli.command {
        Command::Zeros { l_max, n_max } => commands::zeros(&ctx, l_max.unwrap_or(ctx.config.l_max), n_max.unwrap_or(ctx.config.n_max)),
        Command::Phases => commands::phases(&ctx),
        Command::Validate => commands::validate(&ctx),
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Propagate => commands::propagate(&ctx),
        Command::FieldDump => commands::field_dump(&ctx),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Inconsistent) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
