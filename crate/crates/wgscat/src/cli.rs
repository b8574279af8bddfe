//! Command-line flags. Every config key is also a `--kebab-case` flag.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{read_config_file, Command, Overrides, RawValue, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "wgscat", version, about = "Two-body scattering in an anisotropic harmonic waveguide")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// T, R and elastic amplitudes of the (0,0), (2,0), (0,2) entrances vs a_perp/a_s.
    ScanRatio(Flags),
    /// The same quantities vs collision energy at fixed a_perp/a_s.
    ScanEnergy(Flags),
    /// Ratio minimizing the transmission of `--channel`, per collision energy.
    CirLocate(Flags),
    /// Minima of the population-weighted total transmission.
    Splitting(Flags),
    /// Bound and resonant states vs a_perp/a_s.
    Spectrum(Flags),
    /// Transition probabilities out of the ground manifold vs total energy.
    Transitions(Flags),
    /// Unitarity defects over a ratio x energy grid.
    CheckUnitarity(Flags),
    /// Depth calibration table.
    Calibrate(Flags),
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Anisotropy omega1/omega2 (>= 1).
    #[arg(long)]
    pub eta: Option<f64>,
    /// E_par / E_perp(0,0) for fixed-energy commands.
    #[arg(long)]
    pub epar: Option<f64>,
    #[arg(long)]
    pub epar_min: Option<f64>,
    #[arg(long)]
    pub epar_max: Option<f64>,
    #[arg(long)]
    pub epar_points: Option<usize>,
    /// a_perp / a_s for fixed-ratio commands.
    #[arg(long, allow_hyphen_values = true)]
    pub ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ratio_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ratio_max: Option<f64>,
    #[arg(long)]
    pub ratio_step: Option<f64>,
    /// Points per axis of the check-unitarity grid.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Total energy window (units of hbar omega2).
    #[arg(long)]
    pub energy_min: Option<f64>,
    #[arg(long)]
    pub energy_max: Option<f64>,
    #[arg(long)]
    pub energy_points: Option<usize>,
    /// Channel cutoff n1 + n2 <= n_cut.
    #[arg(long)]
    pub n_cut: Option<usize>,
    /// Gaussian range (units of a_perp).
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub z_max: Option<f64>,
    /// Fixed propagation step; never refined automatically.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub refinement: Option<usize>,
    #[arg(long)]
    pub w2_over_w0: Option<f64>,
    /// Entrance channel as "n1,n2".
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        let mut o = Overrides::default();
        let floats = [
            ("eta", self.eta),
            ("epar", self.epar),
            ("epar_min", self.epar_min),
            ("epar_max", self.epar_max),
            ("ratio", self.ratio),
            ("ratio_min", self.ratio_min),
            ("ratio_max", self.ratio_max),
            ("ratio_step", self.ratio_step),
            ("energy_min", self.energy_min),
            ("energy_max", self.energy_max),
            ("r0", self.r0),
            ("z_max", self.z_max),
            ("h", self.h),
            ("w2_over_w0", self.w2_over_w0),
        ];
        for (k, v) in floats {
            if let Some(v) = v {
                o.set(k, RawValue::Float(v));
            }
        }
        let ints = [
            ("epar_points", self.epar_points),
            ("grid_points", self.grid_points),
            ("energy_points", self.energy_points),
            ("n_cut", self.n_cut),
            ("refinement", self.refinement),
            ("workers", self.workers),
        ];
        for (k, v) in ints {
            if let Some(v) = v {
                o.set(k, RawValue::Int(v as i64));
            }
        }
        if let Some(c) = &self.channel {
            o.set("channel", RawValue::Str(c.clone()));
        }
        if let Some(p) = &self.output {
            o.set("output", RawValue::Str(p.display().to_string()));
        }
        o
    }
}

impl Sub {
    pub fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::ScanRatio(f) => (Command::ScanRatio, f),
            Sub::ScanEnergy(f) => (Command::ScanEnergy, f),
            Sub::CirLocate(f) => (Command::CirLocate, f),
            Sub::Splitting(f) => (Command::Splitting, f),
            Sub::Spectrum(f) => (Command::Spectrum, f),
            Sub::Transitions(f) => (Command::Transitions, f),
            Sub::CheckUnitarity(f) => (Command::CheckUnitarity, f),
            Sub::Calibrate(f) => (Command::Calibrate, f),
        }
    }
}

/// Resolves a parsed command line into a run configuration.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let (command, flags) = cli.command.split();
    let file = flags.config.as_deref().map(read_config_file).transpose()?;
    RunConfig::resolve(command, file.as_ref(), &flags.overrides())
}
