//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Keys and defaults:
//!
//! | key | default |
//! |---|---|
//! | `problem` | required: `alfven`, `vortex3d`, `brio_wu`, `orszag_tang`, `turbulence` |
//! | `resolution` | problem default, three integers |
//! | `scheme` | `cweno4` (`cweno4a`, `cweno4fb`, `tvd2`) |
//! | `gsi` | `mhd` (`density`, `individual`) |
//! | `weno.epsilon`, `weno.power` | `1e-6`, `2` |
//! | `eos` | problem default: `adiabatic`, isothermal for turbulence |
//! | `eos.gamma`, `eos.cs` | `5/3`, `0.1` |
//! | `cfl` | 1.95 in one and two dimensions, 1.55 in three |
//! | `flattener.enabled` | true for `cweno4fb` only |
//! | `flattener.tau_ho`, `flattener.tau_lo` | `1`, `2` |
//! | `fallback.enabled` | `true` |
//! | `t_end` | problem default |
//! | `snapshot.interval` | `0` (final snapshot only) |
//! | `ledger.every` | `1` step |
//! | `output` | `output` (overridden by `MHD4_OUTPUT_DIR`) |
//! | `threads` | `0` (all cores) |
//! | `precision` | `f64` (`f32`) |
//! | `seed` | `1` (turbulence) |
//! | `converge.reference` | none; reference resolution for problems without an exact solution |
//! | `alfven.amplitude`, `alfven.b0`, `alfven.p0` | `0.1`, `sqrt(2)`, `0.1` |
//! | `vortex3d.kappa`, `vortex3d.mu`, `vortex3d.q` | `1/(2 pi)`, `1/(2 pi)`, `1` |
//! | `brio_wu.left`, `brio_wu.right` | eight primitive values each |
//! | `turbulence.k0`, `.mach`, `.emag_over_ekin`, `.cutoff` | `4`, `2`, `1`, `16` |

use std::path::PathBuf;

use thiserror::Error;

use crate::eos::Eos;
use crate::problems::{ProblemError, ProblemSpec};
use crate::reconstruct::{GsiMode, WenoParams};
use crate::rhs::{Scheme, SchemeConfig};
use crate::shockguard::FlattenerParams;
use crate::timestep::default_cfl;
use crate::Real;

pub const OUTPUT_ENV: &str = "MHD4_OUTPUT_DIR";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read `{path}`: {message}")]
    Unreadable { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    F64,
    F32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub resolution: [usize; 3],
    pub scheme: Scheme,
    pub gsi: GsiMode,
    pub weno: WenoParams<f64>,
    pub eos: Eos<f64>,
    pub cfl: f64,
    pub flattener: FlattenerParams<f64>,
    pub fallback: bool,
    pub t_end: f64,
    /// Simulation-time spacing of intermediate snapshots; zero for none.
    pub snapshot_interval: f64,
    pub ledger_every: usize,
    pub output: PathBuf,
    pub threads: usize,
    pub precision: Precision,
    pub reference: Option<usize>,
}

impl RunConfig {
    /// Defaults for `problem` at its default resolution.
    pub fn for_problem(problem: ProblemSpec) -> Self {
        let n = problem.default_resolution();
        let dims = n.iter().filter(|&&x| x > 1).count();
        let scheme = Scheme::Cweno4;
        RunConfig {
            resolution: n,
            scheme,
            gsi: GsiMode::Mhd,
            weno: WenoParams::default(),
            eos: problem.default_eos(),
            cfl: default_cfl(dims),
            flattener: FlattenerParams::default(),
            fallback: true,
            t_end: problem.default_t_end(),
            snapshot_interval: 0.0,
            ledger_every: 1,
            output: PathBuf::from("output"),
            threads: 0,
            precision: Precision::F64,
            reference: None,
            problem,
        }
    }

    pub fn scheme_config<T: Real>(&self) -> SchemeConfig<T> {
        let eos = match self.eos {
            Eos::Adiabatic { gamma } => Eos::Adiabatic { gamma: T::lit(gamma) },
            Eos::Isothermal { cs } => Eos::Isothermal { cs: T::lit(cs) },
        };
        let mut c = SchemeConfig::new(self.scheme, eos);
        c.recon.gsi = self.gsi;
        c.recon.weno = WenoParams {
            epsilon: T::lit(self.weno.epsilon),
            power: self.weno.power,
            optimal: self.weno.optimal.map(T::lit),
        };
        c.flattener = FlattenerParams {
            enabled: self.flattener.enabled,
            tau_ho: T::lit(self.flattener.tau_ho),
            tau_lo: T::lit(self.flattener.tau_lo),
        };
        c.fallback = self.fallback;
        c
    }

    /// The output directory after the environment override.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ENV) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => self.output.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !self.flattener.is_valid() {
            return bad("flattener thresholds need 0 < tau_ho < tau_lo");
        }
        if !self.weno.is_valid() || self.weno.power < 1 {
            return bad("weno parameters out of range");
        }
        if self.eos.validate().is_err() {
            return bad("equation of state parameters out of range");
        }
        self.problem.validate()?;
        match (&self.problem, self.eos.is_isothermal()) {
            (ProblemSpec::Turbulence { .. }, false) => return bad("turbulence requires the isothermal equation of state"),
            (ProblemSpec::Turbulence { .. }, true) => {}
            (_, true) => return bad("only turbulence runs with the isothermal equation of state"),
            _ => {}
        }
        if self.resolution.contains(&0) {
            return bad("resolution entries must be positive");
        }
        if matches!(self.problem, ProblemSpec::BrioWu { .. }) && (self.resolution[1] > 1 || self.resolution[2] > 1) {
            return bad("brio_wu is one-dimensional");
        }
        if matches!(self.problem, ProblemSpec::AlfvenWave { .. } | ProblemSpec::OrszagTang) && self.resolution[2] > 1 {
            return bad("this problem is two-dimensional");
        }
        if !(self.cfl > 0.0) || !(self.t_end > 0.0) || self.snapshot_interval < 0.0 {
            return bad("cfl and t_end must be positive, snapshot.interval non-negative");
        }
        Ok(())
    }
}

fn num<V: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<V, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { line, key: key.to_string(), value: value.to_string() })
}

fn list<V: std::str::FromStr, const N: usize>(line: usize, key: &str, value: &str) -> Result<[V; N], ConfigError> {
    let err = || ConfigError::BadValue { line, key: key.to_string(), value: value.to_string() };
    let items: Vec<V> = value.split_whitespace().map(|s| s.parse().map_err(|_| err())).collect::<Result<_, _>>()?;
    items.try_into().map_err(|_| err())
}

fn boolean(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::BadValue { line, key: key.to_string(), value: value.to_string() }),
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, got `{body}`") });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line, message: "empty key".into() });
        }
        if entries.iter().any(|(_, key, _)| key == k) {
            return Err(ConfigError::Syntax { line, message: format!("duplicate key `{k}`") });
        }
        entries.push((line, k.to_string(), v.to_string()));
    }

    // the problem decides the defaults, so it is read first
    let problem = match entries.iter().find(|(_, k, _)| k == "problem") {
        Some((_, _, v)) => Some(ProblemSpec::by_name(v)?),
        None => None,
    };
    let mut cfg = RunConfig::for_problem(problem.clone().unwrap_or(ProblemSpec::OrszagTang));
    let (mut t_end, mut cfl, mut flat_enabled, mut eos_kind) = (None, None, None, None);
    let (mut gamma, mut cs) = (5.0 / 3.0, 0.1);
    let mut seed = None;

    for (line, key, value) in &entries {
        let (line, key, v) = (*line, key.as_str(), value.as_str());
        let p = &mut cfg.problem;
        match key {
            "problem" => {}
            "resolution" => cfg.resolution = list(line, key, v)?,
            "scheme" => cfg.scheme = Scheme::parse(v).ok_or_else(|| ConfigError::UnknownScheme(v.to_string()))?,
            "gsi" => {
                cfg.gsi = match v {
                    "mhd" => GsiMode::Mhd,
                    "density" => GsiMode::Density,
                    "individual" => GsiMode::Individual,
                    _ => return Err(ConfigError::BadValue { line, key: key.into(), value: v.into() }),
                }
            }
            "weno.epsilon" => cfg.weno.epsilon = num(line, key, v)?,
            "weno.power" => cfg.weno.power = num(line, key, v)?,
            "eos" => {
                eos_kind = Some(match v {
                    "adiabatic" => false,
                    "isothermal" => true,
                    _ => return Err(ConfigError::BadValue { line, key: key.into(), value: v.into() }),
                })
            }
            "eos.gamma" => gamma = num(line, key, v)?,
            "eos.cs" => cs = num(line, key, v)?,
            "cfl" => cfl = Some(num(line, key, v)?),
            "flattener.enabled" => flat_enabled = Some(boolean(line, key, v)?),
            "flattener.tau_ho" => cfg.flattener.tau_ho = num(line, key, v)?,
            "flattener.tau_lo" => cfg.flattener.tau_lo = num(line, key, v)?,
            "fallback.enabled" => cfg.fallback = boolean(line, key, v)?,
            "t_end" => t_end = Some(num(line, key, v)?),
            "snapshot.interval" => cfg.snapshot_interval = num(line, key, v)?,
            "ledger.every" => cfg.ledger_every = num(line, key, v)?,
            "output" => cfg.output = PathBuf::from(v),
            "threads" => cfg.threads = num(line, key, v)?,
            "precision" => {
                cfg.precision = match v {
                    "f64" => Precision::F64,
                    "f32" => Precision::F32,
                    _ => return Err(ConfigError::BadValue { line, key: key.into(), value: v.into() }),
                }
            }
            "seed" => seed = Some(num(line, key, v)?),
            "converge.reference" => cfg.reference = Some(num(line, key, v)?),
            _ => {
                let unknown = || ConfigError::UnknownKey { line, key: key.to_string() };
                match (p, key.split_once('.')) {
                    (ProblemSpec::AlfvenWave { amplitude, b0, p0 }, Some(("alfven", field))) => match field {
                        "amplitude" => *amplitude = num(line, key, v)?,
                        "b0" => *b0 = num(line, key, v)?,
                        "p0" => *p0 = num(line, key, v)?,
                        _ => return Err(unknown()),
                    },
                    (ProblemSpec::MhdVortex3d { kappa, mu, q }, Some(("vortex3d", field))) => match field {
                        "kappa" => *kappa = num(line, key, v)?,
                        "mu" => *mu = num(line, key, v)?,
                        "q" => *q = num(line, key, v)?,
                        _ => return Err(unknown()),
                    },
                    (ProblemSpec::BrioWu { left, right }, Some(("brio_wu", field))) => match field {
                        "left" => *left = list(line, key, v)?,
                        "right" => *right = list(line, key, v)?,
                        _ => return Err(unknown()),
                    },
                    (ProblemSpec::Turbulence { k0, mach_rms, emag_over_ekin, cutoff, .. }, Some(("turbulence", field))) => {
                        match field {
                            "k0" => *k0 = num(line, key, v)?,
                            "mach" => *mach_rms = num(line, key, v)?,
                            "emag_over_ekin" => *emag_over_ekin = num(line, key, v)?,
                            "cutoff" => *cutoff = num(line, key, v)?,
                            _ => return Err(unknown()),
                        }
                    }
                    _ => return Err(unknown()),
                }
            }
        }
    }

    if let (ProblemSpec::Turbulence { seed: s, .. }, Some(x)) = (&mut cfg.problem, seed) {
        *s = x;
    }
    if let Some(iso) = eos_kind {
        cfg.eos = if iso { Eos::Isothermal { cs } } else { Eos::Adiabatic { gamma } };
    } else {
        cfg.eos = match cfg.eos {
            Eos::Adiabatic { .. } => Eos::Adiabatic { gamma },
            Eos::Isothermal { .. } => Eos::Isothermal { cs },
        };
    }
    cfg.flattener.enabled = flat_enabled.unwrap_or(cfg.scheme == Scheme::Cweno4Fb);
    let dims = cfg.resolution.iter().filter(|&&x| x > 1).count();
    cfg.cfl = cfl.unwrap_or(default_cfl(dims));
    if let Some(t) = t_end {
        cfg.t_end = t;
    }
    cfg.validate()?;
    if problem.is_none() {
        return Err(ConfigError::Missing("problem"));
    }
    Ok(cfg)
}
