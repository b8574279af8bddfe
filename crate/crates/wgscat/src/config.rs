//! Run configuration: defaults, flat key-value files and command-line
//! overrides, in increasing precedence.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use wgscat_core::{Channel, ScanSettings, TrapConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ScanRatio,
    ScanEnergy,
    CirLocate,
    Splitting,
    Spectrum,
    Transitions,
    CheckUnitarity,
    Calibrate,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::ScanRatio,
        Command::ScanEnergy,
        Command::CirLocate,
        Command::Splitting,
        Command::Spectrum,
        Command::Transitions,
        Command::CheckUnitarity,
        Command::Calibrate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::ScanRatio => "scan-ratio",
            Command::ScanEnergy => "scan-energy",
            Command::CirLocate => "cir-locate",
            Command::Splitting => "splitting",
            Command::Spectrum => "spectrum",
            Command::Transitions => "transitions",
            Command::CheckUnitarity => "check-unitarity",
            Command::Calibrate => "calibrate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command `{s}`")))
    }
}

/// A configuration value before it is checked against its key.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

impl RawValue {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        match v {
            toml::Value::Float(x) => Some(RawValue::Float(*x)),
            toml::Value::Integer(i) => Some(RawValue::Int(*i)),
            toml::Value::String(s) => Some(RawValue::Str(s.clone())),
            toml::Value::Boolean(b) => Some(RawValue::Bool(*b)),
            _ => None,
        }
    }
}

/// Fully resolved run configuration. Energies along the collision axis are
/// given as `E_par / E_perp(0,0)`; total energies (transitions) in units of
/// `hbar omega2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub eta: f64,
    pub epar: f64,
    pub epar_min: f64,
    pub epar_max: f64,
    pub epar_points: usize,
    pub ratio: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_step: f64,
    pub grid_points: usize,
    pub energy_min: f64,
    pub energy_max: f64,
    pub energy_points: usize,
    pub n_cut: u32,
    pub r0: f64,
    pub z_max: f64,
    pub h: Option<f64>,
    pub refinement: u32,
    pub w2_over_w0: f64,
    pub channel: String,
    pub output: PathBuf,
    pub workers: usize,
}

/// Every key accepted in files and as `--flag` (underscores become dashes).
pub const KEYS: [&str; 22] = [
    "eta",
    "epar",
    "epar_min",
    "epar_max",
    "epar_points",
    "ratio",
    "ratio_min",
    "ratio_max",
    "ratio_step",
    "grid_points",
    "energy_min",
    "energy_max",
    "energy_points",
    "n_cut",
    "r0",
    "z_max",
    "h",
    "refinement",
    "w2_over_w0",
    "channel",
    "output",
    "workers",
];

/// Collected overrides, keyed by configuration key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides(pub BTreeMap<String, RawValue>);

impl Overrides {
    pub fn set(&mut self, key: &str, v: RawValue) {
        self.0.insert(key.to_string(), v);
    }
}

/// Reads a flat `key = value` file (TOML syntax without tables).
pub fn read_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Overrides, CliError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("config file: {}", e.message())))?;
    let mut out = Overrides::default();
    for (k, v) in &table {
        let key = k.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown config key `{k}`")));
        }
        let raw = RawValue::from_toml(v)
            .ok_or_else(|| CliError::Usage(format!("config key `{k}` must be a scalar value")))?;
        out.set(&key, raw);
    }
    Ok(out)
}

fn want_f64(key: &str, v: &RawValue) -> Result<f64, CliError> {
    match v {
        RawValue::Float(x) => Ok(*x),
        RawValue::Int(i) => Ok(*i as f64),
        RawValue::Str(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("`{key}` expects a number, got `{s}`"))),
        RawValue::Bool(_) => Err(CliError::Usage(format!("`{key}` expects a number"))),
    }
}

fn want_usize(key: &str, v: &RawValue) -> Result<usize, CliError> {
    let bad = || CliError::Usage(format!("`{key}` expects a non-negative integer"));
    match v {
        RawValue::Int(i) => usize::try_from(*i).map_err(|_| bad()),
        RawValue::Str(s) => s.trim().parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn want_string(key: &str, v: &RawValue) -> Result<String, CliError> {
    match v {
        RawValue::Str(s) => Ok(s.clone()),
        _ => Err(CliError::Usage(format!("`{key}` expects a string"))),
    }
}

impl RunConfig {
    /// Defaults for `command` with no file and no flags.
    pub fn defaults(command: Command) -> Self {
        let (ratio_min, ratio_max, ratio_step) = match command {
            Command::Splitting => (1.2, 1.8, 0.005),
            Command::Spectrum => (-2.0, 4.0, 0.5),
            _ => (0.8, 2.2, 0.025),
        };
        let eta = 1.0;
        let trap = TrapConfig::default();
        Self {
            command,
            eta,
            epar: 1e-3,
            epar_min: 1e-4,
            epar_max: 5e-2,
            epar_points: 10,
            ratio: 1.4603,
            ratio_min,
            ratio_max,
            ratio_step,
            grid_points: 5,
            energy_min: 0.0,
            energy_max: 0.0,
            energy_points: 41,
            n_cut: trap.n_cut,
            r0: trap.range,
            z_max: trap.z_max,
            h: None,
            refinement: trap.refinement,
            w2_over_w0: 0.05,
            channel: "0,0".into(),
            output: PathBuf::from(format!("{}.csv", command.name())),
            workers: 1,
        }
    }

    /// Defaults, then `file`, then `flags`.
    pub fn resolve(command: Command, file: Option<&Overrides>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(command);
        let mut energy_set = (false, false);
        for layer in file.into_iter().chain(std::iter::once(flags)) {
            for (k, v) in &layer.0 {
                cfg.apply(k, v)?;
                energy_set.0 |= k == "energy_min";
                energy_set.1 |= k == "energy_max";
            }
        }
        // transitions default to the window between the n = 0 and n = 4 thresholds
        let e0 = 0.5 * (cfg.eta + 1.0);
        let e4 = (cfg.eta * 4.5 + 0.5).min(cfg.eta * 0.5 + 4.5);
        if !energy_set.0 {
            cfg.energy_min = e0 + 0.01;
        }
        if !energy_set.1 {
            cfg.energy_max = e4 - 0.01;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, v: &RawValue) -> Result<(), CliError> {
        match key {
            "eta" => self.eta = want_f64(key, v)?,
            "epar" => self.epar = want_f64(key, v)?,
            "epar_min" => self.epar_min = want_f64(key, v)?,
            "epar_max" => self.epar_max = want_f64(key, v)?,
            "epar_points" => self.epar_points = want_usize(key, v)?,
            "ratio" => self.ratio = want_f64(key, v)?,
            "ratio_min" => self.ratio_min = want_f64(key, v)?,
            "ratio_max" => self.ratio_max = want_f64(key, v)?,
            "ratio_step" => self.ratio_step = want_f64(key, v)?,
            "grid_points" => self.grid_points = want_usize(key, v)?,
            "energy_min" => self.energy_min = want_f64(key, v)?,
            "energy_max" => self.energy_max = want_f64(key, v)?,
            "energy_points" => self.energy_points = want_usize(key, v)?,
            "n_cut" => {
                self.n_cut = u32::try_from(want_usize(key, v)?)
                    .map_err(|_| CliError::Usage("`n_cut` is too large".into()))?
            }
            "r0" => self.r0 = want_f64(key, v)?,
            "z_max" => self.z_max = want_f64(key, v)?,
            "h" => self.h = Some(want_f64(key, v)?),
            "refinement" => {
                self.refinement = u32::try_from(want_usize(key, v)?)
                    .map_err(|_| CliError::Usage("`refinement` is too large".into()))?
            }
            "w2_over_w0" => self.w2_over_w0 = want_f64(key, v)?,
            "channel" => self.channel = want_string(key, v)?,
            "output" => self.output = PathBuf::from(want_string(key, v)?),
            "workers" => self.workers = want_usize(key, v)?,
            _ => return Err(CliError::Usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: &str| Err(CliError::Usage(format!("`{key}` {why}")));
        let positive = [
            ("epar", self.epar),
            ("epar_min", self.epar_min),
            ("epar_max", self.epar_max),
            ("ratio_step", self.ratio_step),
            ("r0", self.r0),
            ("z_max", self.z_max),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(k, "must be a positive finite number");
            }
        }
        if !(self.eta >= 1.0) || !self.eta.is_finite() {
            return bad("eta", "must be >= 1");
        }
        if let Some(h) = self.h {
            if !(h > 0.0) || !h.is_finite() {
                return bad("h", "must be positive");
            }
        }
        if !(self.epar_min < self.epar_max) {
            return bad("epar_min", "must be below epar_max");
        }
        if !(self.ratio_min < self.ratio_max) || !self.ratio_min.is_finite() || !self.ratio_max.is_finite() {
            return bad("ratio_min", "must be below ratio_max");
        }
        if !(self.energy_min < self.energy_max) {
            return bad("energy_min", "must be below energy_max");
        }
        if !self.ratio.is_finite() {
            return bad("ratio", "must be finite");
        }
        if self.n_cut % 2 != 0 {
            return bad("n_cut", "must be even");
        }
        if self.refinement < 2 {
            return bad("refinement", "must be >= 2");
        }
        if !(0.0..=1e3).contains(&self.w2_over_w0) {
            return bad("w2_over_w0", "must be >= 0");
        }
        if self.workers == 0 {
            return bad("workers", "must be >= 1");
        }
        for (k, n) in [
            ("epar_points", self.epar_points),
            ("grid_points", self.grid_points),
            ("energy_points", self.energy_points),
        ] {
            if n < 2 {
                return bad(k, "must be >= 2");
            }
        }
        self.entrance()?;
        Ok(())
    }

    pub fn entrance(&self) -> Result<Channel, CliError> {
        self.channel
            .parse()
            .map_err(|e| CliError::Usage(format!("`channel`: {e}")))
    }

    pub fn trap(&self) -> TrapConfig {
        TrapConfig {
            eta: self.eta,
            range: self.r0,
            n_cut: self.n_cut,
            z_max: self.z_max,
            step: self.h,
            refinement: self.refinement,
            verify_step: true,
        }
    }

    pub fn scan_settings(&self) -> ScanSettings {
        let mut s = ScanSettings::default();
        if self.command == Command::Splitting {
            s.split_window = (self.ratio_min, self.ratio_max);
            s.split_step = self.ratio_step;
        }
        s
    }

    /// Ratio axis `ratio_min, ratio_min + step, ..., <= ratio_max`.
    pub fn ratio_axis(&self) -> Vec<f64> {
        let n = ((self.ratio_max - self.ratio_min) / self.ratio_step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.ratio_min + i as f64 * self.ratio_step).collect()
    }

    /// Log-spaced `E_par / E_perp(0,0)` axis.
    pub fn epar_axis(&self) -> Vec<f64> {
        log_axis(self.epar_min, self.epar_max, self.epar_points)
    }

    pub fn energy_axis(&self) -> Vec<f64> {
        let n = self.energy_points;
        (0..n)
            .map(|i| self.energy_min + (self.energy_max - self.energy_min) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn metadata_path(&self) -> PathBuf {
        let mut s = self.output.clone().into_os_string();
        s.push(".meta.json");
        PathBuf::from(s)
    }
}

pub fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
