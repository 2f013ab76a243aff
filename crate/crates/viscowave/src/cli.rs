//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use viscowave_core::reference;

use crate::commands::{cmd_flux, cmd_recover, cmd_sweep, cmd_validate};
use crate::config::{
    parse_directions, parse_list, parse_vec3, ConfigFile, DirectionSpec, FrequencyGrid, Scale,
    SweepConfig,
};
use crate::mediumfile::MediumFile;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "viscowave", version, about = "Plane waves and energy flux in anisotropic viscoelastic media")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check ellipticity, Prony weights, causal positive definiteness and the Pick property of K_n.
    Validate(Common),
    /// Modal sweep: phase speeds, attenuations and matrix-wave spectra as CSV.
    Sweep(Common),
    /// Energy flux of collinear and tilted waves as CSV; checks the acute-angle property.
    Flux(Common),
    /// Recover the spectral measure of a scalar channel of K_n.
    Recover {
        #[command(flatten)]
        common: Common,
        /// Propagation direction `x,y,z`.
        #[arg(long, default_value = "1,0,0", value_parser = parse_vec3)]
        direction: [f64; 3],
        /// Channel index, 1-based, slowest first.
        #[arg(long, default_value_t = 1)]
        channel: usize,
        /// Interval `a,b` (default: the closed-form support, slightly widened).
        #[arg(long, value_parser = parse_interval)]
        interval: Option<(f64, f64)>,
    },
    /// Print a built-in medium as JSON.
    Medium {
        #[arg(value_enum)]
        name: BuiltinMedium,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuiltinMedium {
    Elastic,
    A,
    B,
    NegativeWeight,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// JSON medium file.
    #[arg(long)]
    pub medium: Option<PathBuf>,
    /// Output path for CSV (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Check tolerance: Pick test (validate), acute angle (flux), mass error (recover).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for randomized checks [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directions from a subdivided icosahedron [default: 0, i.e. 12 directions].
    #[arg(long, conflicts_with = "directions")]
    pub icosphere_level: Option<u32>,
    /// Explicit directions `x,y,z;x,y,z;...`, normalized on load.
    #[arg(long, value_parser = |s: &str| parse_directions(s).map(DirectionList))]
    pub directions: Option<DirectionList>,
    /// Attack angles in degrees, `0,15,30`.
    #[arg(long, value_parser = |s: &str| parse_list(s).map(AngleList))]
    pub angles: Option<AngleList>,
    /// Lowest angular frequency [default: 1e-2].
    #[arg(long)]
    pub omega_min: Option<f64>,
    /// Highest angular frequency [default: 1e4].
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Number of frequencies [default: 13].
    #[arg(long)]
    pub omega_count: Option<usize>,
    /// Frequency spacing [default: log].
    #[arg(long, value_enum)]
    pub omega_scale: Option<Scale>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionList(pub Vec<[f64; 3]>);

#[derive(Clone, Debug, PartialEq)]
pub struct AngleList(pub Vec<f64>);

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected `a,b`, got {s:?}")),
    }
}

impl Common {
    /// Merges the config file (if any) with the flags.
    pub fn resolve(&self) -> Result<SweepConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let medium = self
            .medium
            .clone()
            .or(file.medium)
            .ok_or_else(|| CliError::Usage("no medium given (--medium or config `medium`)".into()))?;
        let base = file.frequencies.unwrap_or_default();
        let frequencies = FrequencyGrid {
            min: self.omega_min.unwrap_or(base.min),
            max: self.omega_max.unwrap_or(base.max),
            count: self.omega_count.unwrap_or(base.count),
            scale: self.omega_scale.unwrap_or(base.scale),
        };
        let directions = match (&self.directions, self.icosphere_level) {
            (Some(d), _) => DirectionSpec::List(d.0.clone()),
            (None, Some(l)) => DirectionSpec::Icosphere(l),
            (None, None) => match (file.directions, file.icosphere_level) {
                (Some(d), _) => DirectionSpec::List(d),
                (None, l) => DirectionSpec::Icosphere(l.unwrap_or(0)),
            },
        };
        let mut cfg = SweepConfig::new(medium);
        cfg.frequencies = frequencies;
        cfg.directions = directions;
        cfg.output = self.output.clone().or(file.output);
        cfg.tol = self.tol.or(file.tol);
        cfg.seed = self.seed.or(file.seed).unwrap_or(cfg.seed);
        if let Some(a) = self.angles.clone().map(|a| a.0).or(file.angles) {
            cfg.angles_deg = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        0
    } else {
        1
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate(c) => {
            let cfg = c.resolve()?;
            let r = cmd_validate(&cfg)?;
            print!("{}", r.text);
            Ok(exit_for(r.pass))
        }
        Command::Sweep(c) => {
            let cfg = c.resolve()?;
            let csv = cmd_sweep(&cfg)?;
            emit(cfg.output.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Flux(c) => {
            let cfg = c.resolve()?;
            let out = cmd_flux(&cfg)?;
            emit(cfg.output.as_deref(), &out.csv)?;
            if cfg.output.is_some() {
                print!("{}", out.report.text);
            } else {
                eprint!("{}", out.report.text);
            }
            Ok(exit_for(out.report.pass))
        }
        Command::Recover {
            common,
            direction,
            channel,
            interval,
        } => {
            let cfg = common.resolve()?;
            let r = cmd_recover(&cfg, &direction, channel, interval)?;
            print!("{}", r.text);
            Ok(exit_for(r.pass))
        }
        Command::Medium { name, output } => {
            let model = match name {
                BuiltinMedium::Elastic => reference::elastic_isotropic(),
                BuiltinMedium::A => reference::medium_a(),
                BuiltinMedium::B => reference::medium_b(),
                BuiltinMedium::NegativeWeight => reference::negative_weight_medium(),
            };
            emit(output.as_deref(), &MediumFile::from_model(&model).to_json())?;
            Ok(0)
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
