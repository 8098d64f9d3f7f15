//! Plain-text `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored; every key is optional.
//! Unknown keys and malformed values are rejected with their line number.
//! [`RunConfig::to_text`] writes every key back in a fixed order, and
//! parsing that text gives the same configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::phases::GeometricMode;
use crate::spectra::PhaseReference;
use crate::wellmodel::{LevelIndex, Units, WallMotion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    Static,
    Linear,
    Oscillatory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldGrid {
    Gauss,
    Uniform,
}

/// Which `ε` enters the modified energies of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsChoice {
    Oracle,
    Printed,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units: UnitSystem,
    pub motion: MotionKind,
    pub a0: f64,
    pub v: f64,
    pub b: f64,
    pub omega: f64,
    /// `(n, l, m)` triples.
    pub levels: Vec<(u32, u32, i32)>,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub l_max: u32,
    pub n_max: u32,
    pub grid_points: usize,
    pub basis_size: usize,
    /// `None` lets the propagator choose.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub record_limit: usize,
    pub halving_tolerance: f64,
    pub richardson: bool,
    pub validate_tdse: bool,
    pub initial: (u32, u32, i32),
    pub final_: (u32, u32, i32),
    pub field_amplitude: f64,
    pub k_max: Option<usize>,
    pub sideband_samples: usize,
    pub reference: PhaseReference,
    pub eps: EpsChoice,
    pub linewidth: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub field_times: Vec<f64>,
    pub field_points: usize,
    pub field_grid: FieldGrid,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            units: UnitSystem::Natural,
            motion: MotionKind::Oscillatory,
            a0: 1.0,
            v: 0.005,
            b: 0.05,
            omega: 0.02,
            levels: vec![(1, 0, 0)],
            t_start: 0.0,
            t_end: 1000.0,
            samples: 201,
            l_max: 3,
            n_max: 5,
            grid_points: 2048,
            basis_size: 32,
            dt: None,
            t_final: 20.0,
            record_limit: 10_000,
            halving_tolerance: 0.1,
            richardson: true,
            validate_tdse: true,
            initial: (1, 0, 0),
            final_: (1, 1, 0),
            field_amplitude: 1.0,
            k_max: None,
            sideband_samples: 4096,
            reference: PhaseReference::Difference,
            eps: EpsChoice::Oracle,
            linewidth: 0.005,
            omega_min: 4.0,
            omega_max: 6.3,
            omega_points: 2001,
            field_times: vec![0.0],
            field_points: 2048,
            field_grid: FieldGrid::Gauss,
            out_dir: None,
        }
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn parse_f64(line: usize, key: &str, s: &str) -> Result<f64> {
    let x: f64 = s.parse().map_err(|_| bad(line, format!("{key}: `{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(line, format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_usize(line: usize, key: &str, s: &str) -> Result<usize> {
    s.parse().map_err(|_| bad(line, format!("{key}: `{s}` is not a non-negative integer")))
}

fn parse_bool(line: usize, key: &str, s: &str) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(line, format!("{key}: expected true or false, got `{s}`"))),
    }
}

fn parse_level(line: usize, key: &str, s: &str) -> Result<(u32, u32, i32)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad(line, format!("{key}: a level is written n,l,m (got `{s}`)")));
    }
    let n = parts[0].parse().map_err(|_| bad(line, format!("{key}: bad n `{}`", parts[0])))?;
    let l = parts[1].parse().map_err(|_| bad(line, format!("{key}: bad l `{}`", parts[1])))?;
    let m = parts[2].parse().map_err(|_| bad(line, format!("{key}: bad m `{}`", parts[2])))?;
    Ok((n, l, m))
}

fn optional<T>(s: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
    if s == "auto" {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| bad(line, format!("expected key = value, got `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "units" => {
                    c.units = match value {
                        "natural" => UnitSystem::Natural,
                        "si" => UnitSystem::Si,
                        _ => return Err(bad(line, format!("units: expected natural or si, got `{value}`"))),
                    }
                }
                "motion" => {
                    c.motion = match value {
                        "static" => MotionKind::Static,
                        "linear" => MotionKind::Linear,
                        "oscillatory" => MotionKind::Oscillatory,
                        _ => return Err(bad(line, format!("motion: expected static, linear or oscillatory, got `{value}`"))),
                    }
                }
                "a0" => c.a0 = parse_f64(line, key, value)?,
                "v" => c.v = parse_f64(line, key, value)?,
                "b" => c.b = parse_f64(line, key, value)?,
                "omega" => c.omega = parse_f64(line, key, value)?,
                "levels" => {
                    c.levels = value.split(';').map(|s| parse_level(line, key, s.trim())).collect::<Result<_>>()?;
                }
                "t_start" => c.t_start = parse_f64(line, key, value)?,
                "t_end" => c.t_end = parse_f64(line, key, value)?,
                "samples" => c.samples = parse_usize(line, key, value)?,
                "l_max" => c.l_max = parse_usize(line, key, value)? as u32,
                "n_max" => c.n_max = parse_usize(line, key, value)? as u32,
                "grid_points" => c.grid_points = parse_usize(line, key, value)?,
                "basis_size" => c.basis_size = parse_usize(line, key, value)?,
                "dt" => c.dt = optional(value, |s| parse_f64(line, key, s))?,
                "t_final" => c.t_final = parse_f64(line, key, value)?,
                "record_limit" => c.record_limit = parse_usize(line, key, value)?,
                "halving_tolerance" => c.halving_tolerance = parse_f64(line, key, value)?,
                "richardson" => c.richardson = parse_bool(line, key, value)?,
                "validate_tdse" => c.validate_tdse = parse_bool(line, key, value)?,
                "initial" => c.initial = parse_level(line, key, value)?,
                "final" => c.final_ = parse_level(line, key, value)?,
                "field_amplitude" => c.field_amplitude = parse_f64(line, key, value)?,
                "k_max" => c.k_max = optional(value, |s| parse_usize(line, key, s))?,
                "sideband_samples" => c.sideband_samples = parse_usize(line, key, value)?,
                "reference" => {
                    c.reference = match value {
                        "difference" => PhaseReference::Difference,
                        "final-only" => PhaseReference::FinalOnly,
                        _ => return Err(bad(line, format!("reference: expected difference or final-only, got `{value}`"))),
                    }
                }
                "eps" => {
                    c.eps = match value {
                        "oracle" => EpsChoice::Oracle,
                        "printed" => EpsChoice::Printed,
                        "off" => EpsChoice::Off,
                        _ => return Err(bad(line, format!("eps: expected oracle, printed or off, got `{value}`"))),
                    }
                }
                "linewidth" => c.linewidth = parse_f64(line, key, value)?,
                "omega_min" => c.omega_min = parse_f64(line, key, value)?,
                "omega_max" => c.omega_max = parse_f64(line, key, value)?,
                "omega_points" => c.omega_points = parse_usize(line, key, value)?,
                "field_times" => {
                    c.field_times = value.split(',').map(|s| parse_f64(line, key, s.trim())).collect::<Result<_>>()?;
                }
                "field_points" => c.field_points = parse_usize(line, key, value)?,
                "field_grid" => {
                    c.field_grid = match value {
                        "gauss" => FieldGrid::Gauss,
                        "uniform" => FieldGrid::Uniform,
                        _ => return Err(bad(line, format!("field_grid: expected gauss or uniform, got `{value}`"))),
                    }
                }
                "out_dir" => c.out_dir = Some(PathBuf::from(value)),
                _ => return Err(bad(line, format!("unknown key `{key}`"))),
            }
        }
        if c.levels.is_empty() {
            return Err(bad(0, "levels: at least one level is required"));
        }
        if c.samples < 2 {
            return Err(bad(0, "samples: at least two time samples are required"));
        }
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Every key in a fixed order; reparses to `self`.
    pub fn to_text(&self) -> String {
        let level = |(n, l, m): (u32, u32, i32)| format!("{n},{l},{m}");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("units", match self.units { UnitSystem::Natural => "natural", UnitSystem::Si => "si" }.into());
        kv(
            "motion",
            match self.motion {
                MotionKind::Static => "static",
                MotionKind::Linear => "linear",
                MotionKind::Oscillatory => "oscillatory",
            }
            .into(),
        );
        kv("a0", self.a0.to_string());
        kv("v", self.v.to_string());
        kv("b", self.b.to_string());
        kv("omega", self.omega.to_string());
        kv("levels", self.levels.iter().map(|&x| level(x)).collect::<Vec<_>>().join("; "));
        kv("t_start", self.t_start.to_string());
        kv("t_end", self.t_end.to_string());
        kv("samples", self.samples.to_string());
        kv("l_max", self.l_max.to_string());
        kv("n_max", self.n_max.to_string());
        kv("grid_points", self.grid_points.to_string());
        kv("basis_size", self.basis_size.to_string());
        kv("dt", self.dt.map_or("auto".into(), |x| x.to_string()));
        kv("t_final", self.t_final.to_string());
        kv("record_limit", self.record_limit.to_string());
        kv("halving_tolerance", self.halving_tolerance.to_string());
        kv("richardson", self.richardson.to_string());
        kv("validate_tdse", self.validate_tdse.to_string());
        kv("initial", level(self.initial));
        kv("final", level(self.final_));
        kv("field_amplitude", self.field_amplitude.to_string());
        kv("k_max", self.k_max.map_or("auto".into(), |x| x.to_string()));
        kv("sideband_samples", self.sideband_samples.to_string());
        kv(
            "reference",
            match self.reference {
                PhaseReference::Difference => "difference",
                PhaseReference::FinalOnly => "final-only",
            }
            .into(),
        );
        kv(
            "eps",
            match self.eps {
                EpsChoice::Oracle => "oracle",
                EpsChoice::Printed => "printed",
                EpsChoice::Off => "off",
            }
            .into(),
        );
        kv("linewidth", self.linewidth.to_string());
        kv("omega_min", self.omega_min.to_string());
        kv("omega_max", self.omega_max.to_string());
        kv("omega_points", self.omega_points.to_string());
        kv("field_times", self.field_times.iter().map(f64::to_string).collect::<Vec<_>>().join(", "));
        kv("field_points", self.field_points.to_string());
        kv("field_grid", match self.field_grid { FieldGrid::Gauss => "gauss", FieldGrid::Uniform => "uniform" }.into());
        if let Some(dir) = &self.out_dir {
            kv("out_dir", dir.display().to_string());
        }
        s
    }

    pub fn physical_units(&self) -> Units {
        match self.units {
            UnitSystem::Natural => Units::natural(),
            UnitSystem::Si => Units::si_electron(),
        }
    }

    pub fn wall_motion(&self) -> Result<WallMotion> {
        match self.motion {
            MotionKind::Static => WallMotion::fixed(self.a0),
            MotionKind::Linear => WallMotion::linear(self.a0, self.v),
            MotionKind::Oscillatory => WallMotion::oscillatory(self.a0, self.b, self.omega),
        }
    }

    pub fn level_list(&self) -> Result<Vec<LevelIndex>> {
        self.levels.iter().map(|&(n, l, m)| LevelIndex::new(n, l, m)).collect()
    }

    pub fn transition(&self) -> Result<(LevelIndex, LevelIndex)> {
        let (n, l, m) = self.initial;
        let (n2, l2, m2) = self.final_;
        Ok((LevelIndex::new(n, l, m)?, LevelIndex::new(n2, l2, m2)?))
    }

    /// `eps` as a spectrum option, with the geometric mode flag deciding
    /// between the variants when `eps` is not `off`.
    pub fn eps_mode(&self) -> Option<GeometricMode> {
        match self.eps {
            EpsChoice::Oracle => Some(GeometricMode::Oracle),
            EpsChoice::Printed => Some(GeometricMode::Printed),
            EpsChoice::Off => None,
        }
    }
}
