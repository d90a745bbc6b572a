//! Experiment configuration: a flat `key = value` text format with `#`
//! comments, frequency values carrying SI unit suffixes (`Hz`, `kHz`,
//! `MHz`, `GHz`, `THz`).
//!
//! All frequencies in a config are ordinary (`ν = ω/2π`) values; the
//! conversion to angular rates happens once, when the physical parameter
//! set is built. The metadata echo written into every result table is
//! itself a valid config reproducing the run.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qdc_core::evolve::EvolutionEngine;
use qdc_core::model::SystemParams;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Parse a frequency with an optional SI suffix into Hz.
pub fn parse_freq(s: &str) -> Result<f64, ConfigError> {
    let s = s.trim();
    let (num, mult) = match s.split_once(char::is_whitespace) {
        Some((n, u)) => (n, unit_multiplier(u.trim())?),
        None => {
            // tolerate glued suffixes like "7GHz"
            match s.find(|c: char| c.is_alphabetic()) {
                Some(pos) => (&s[..pos], unit_multiplier(s[pos..].trim())?),
                None => (s, 1.0),
            }
        }
    };
    match num.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v * mult),
        _ => err(format!("unparseable frequency {s:?}")),
    }
}

fn unit_multiplier(unit: &str) -> Result<f64, ConfigError> {
    match unit {
        "Hz" => Ok(1.0),
        "kHz" => Ok(1.0e3),
        "MHz" => Ok(1.0e6),
        "GHz" => Ok(1.0e9),
        "THz" => Ok(1.0e12),
        other => err(format!("unknown unit {other:?}")),
    }
}

/// Canonical rendering of a frequency in Hz: largest suffix that keeps the
/// mantissa at or above one, trailing zeros trimmed.
pub fn format_freq(hz: f64) -> String {
    let table: [(f64, &str); 5] = [
        (1.0e12, "THz"),
        (1.0e9, "GHz"),
        (1.0e6, "MHz"),
        (1.0e3, "kHz"),
        (1.0, "Hz"),
    ];
    if hz == 0.0 {
        return "0 Hz".into();
    }
    let mag = hz.abs();
    let (mult, unit) = table
        .iter()
        .find(|(m, _)| mag >= *m)
        .copied()
        .unwrap_or((1.0, "Hz"));
    let value = hz / mult;
    let mut s = format!("{value:.12}");
    while s.contains('.') && (s.ends_with('0') || s.ends_with('.')) {
        s.pop();
    }
    format!("{s} {unit}")
}

/// The six runnable experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    TransferCurve,
    IdealFidelity,
    DecaySweep,
    SuperconductingPoint,
    DisorderCoupling,
    DisorderFrequency,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TransferCurve => "transfer_curve",
            Self::IdealFidelity => "ideal_fidelity",
            Self::DecaySweep => "decay_sweep",
            Self::SuperconductingPoint => "superconducting_point",
            Self::DisorderCoupling => "disorder_coupling",
            Self::DisorderFrequency => "disorder_frequency",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "transfer_curve" => Ok(Self::TransferCurve),
            "ideal_fidelity" => Ok(Self::IdealFidelity),
            "decay_sweep" => Ok(Self::DecaySweep),
            "superconducting_point" => Ok(Self::SuperconductingPoint),
            "disorder_coupling" => Ok(Self::DisorderCoupling),
            "disorder_frequency" => Ok(Self::DisorderFrequency),
            other => err(format!("unknown experiment {other:?}")),
        }
    }
}

/// Sweep grid: `points` values spaced evenly from `start` to `stop`
/// inclusive. Units depend on the experiment (see the README schema).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n_cavities: usize,
    /// ν_J in Hz.
    pub j: f64,
    /// Cavity/qubit resonance as a multiple of J (kept as a ratio so the
    /// commensurability condition survives unit conversion exactly).
    pub omega_over_j: f64,
    pub omega_q3_over_j: f64,
    /// ν_g in Hz; engineered √(N+1)·J when absent.
    pub g: Option<f64>,
    /// ν_γ in Hz.
    pub gamma: f64,
    /// ν_κ in Hz (used by `superconducting_point`).
    pub kappa: f64,
    pub sweep: Sweep,
    pub realizations: usize,
    pub seed: u64,
    pub engine: EvolutionEngine,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Baseline the per-experiment keys get merged into.
    pub fn new(experiment: ExperimentKind) -> Self {
        let sweep = match experiment {
            ExperimentKind::TransferCurve | ExperimentKind::IdealFidelity => Sweep {
                start: 0.0,
                stop: std::f64::consts::PI,
                points: 201,
            },
            ExperimentKind::DecaySweep => Sweep {
                start: 0.0,
                stop: 70.0e6,
                points: 30,
            },
            ExperimentKind::SuperconductingPoint => Sweep {
                start: 0.0,
                stop: 0.0,
                points: 1,
            },
            ExperimentKind::DisorderCoupling => Sweep {
                start: 0.0,
                stop: 30.0,
                points: 7,
            },
            ExperimentKind::DisorderFrequency => Sweep {
                start: 0.0,
                stop: 1.0,
                points: 11,
            },
        };
        // the closed form is exact for the ideal experiments and much
        // cheaper; everything else needs the general engine
        let engine = match experiment {
            ExperimentKind::TransferCurve | ExperimentKind::IdealFidelity => {
                EvolutionEngine::ClosedForm
            }
            _ => EvolutionEngine::MatrixExp,
        };
        Self {
            experiment,
            n_cavities: 10,
            j: 1.0,
            omega_over_j: 989.0,
            omega_q3_over_j: 1000.0,
            g: None,
            gamma: 0.0,
            kappa: 0.0,
            sweep,
            realizations: 1000,
            seed: 1,
            engine,
            out: None,
        }
    }

    /// Apply `key = value` pairs on top of this config.
    pub fn apply(&mut self, pairs: &BTreeMap<String, String>) -> Result<(), ConfigError> {
        for (key, value) in pairs {
            match key.as_str() {
                "experiment" => self.experiment = value.parse()?,
                "n_cavities" => {
                    self.n_cavities = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad n_cavities {value:?}")))?
                }
                "j" => self.j = parse_freq(value)?,
                "omega" => self.omega_over_j = parse_freq(value)? / self.j,
                "omega_q3" => self.omega_q3_over_j = parse_freq(value)? / self.j,
                "omega_over_j" => {
                    self.omega_over_j = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad omega_over_j {value:?}")))?
                }
                "omega_q3_over_j" => {
                    self.omega_q3_over_j = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad omega_q3_over_j {value:?}")))?
                }
                "g" => self.g = Some(parse_freq(value)?),
                "gamma" => self.gamma = parse_freq(value)?,
                "kappa" => self.kappa = parse_freq(value)?,
                "sweep_start" => self.sweep.start = parse_freq(value)?,
                "sweep_stop" => self.sweep.stop = parse_freq(value)?,
                "sweep_points" => {
                    self.sweep.points = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad sweep_points {value:?}")))?
                }
                "realizations" => {
                    self.realizations = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad realizations {value:?}")))?
                }
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| ConfigError(format!("bad seed {value:?}")))?
                }
                "engine" => {
                    self.engine = match value.as_str() {
                        "closed_form" => EvolutionEngine::ClosedForm,
                        "matrix_exp" => EvolutionEngine::MatrixExp,
                        other => return err(format!("unknown engine {other:?}")),
                    }
                }
                "out" => self.out = Some(PathBuf::from(value)),
                other => return err(format!("unknown key {other:?}")),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_cavities == 0 {
            return err("n_cavities must be at least 1");
        }
        if self.j.is_nan() || self.j <= 0.0 {
            return err("j must be positive");
        }
        if self.sweep.points == 0 {
            return err("sweep grid is empty");
        }
        if self.realizations == 0 {
            return err("realizations must be at least 1");
        }
        if self.gamma < 0.0 || self.kappa < 0.0 {
            return err("decay rates must be non-negative");
        }
        Ok(())
    }

    /// Physical parameter set in angular units.
    pub fn system_params(&self) -> Result<SystemParams, ConfigError> {
        let j = TAU * self.j;
        let params = SystemParams::engineered(
            self.n_cavities,
            j,
            self.omega_over_j * j,
            self.omega_q3_over_j * j,
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        match self.g {
            Some(nu_g) => params
                .with_g(TAU * nu_g)
                .map_err(|e| ConfigError(e.to_string())),
            None => Ok(params),
        }
    }

    /// The effective settings as config lines; prefixing each with `# `
    /// yields the metadata block, stripping that prefix yields a config
    /// that reruns the experiment identically.
    pub fn echo(&self) -> Vec<String> {
        let mut lines = vec![
            format!("experiment = {}", self.experiment.name()),
            format!("n_cavities = {}", self.n_cavities),
            format!("j = {}", format_freq(self.j)),
            format!("omega_over_j = {}", self.omega_over_j),
            format!("omega_q3_over_j = {}", self.omega_q3_over_j),
        ];
        if let Some(g) = self.g {
            lines.push(format!("g = {}", format_freq(g)));
        }
        lines.push(format!("gamma = {}", format_freq(self.gamma)));
        lines.push(format!("kappa = {}", format_freq(self.kappa)));
        // dimensionless sweeps echo bare numbers, frequency sweeps echo units
        let sweep_unit = matches!(self.experiment, ExperimentKind::DecaySweep);
        let fmt_sweep = |v: f64| {
            if sweep_unit {
                format_freq(v)
            } else {
                format!("{v}")
            }
        };
        lines.push(format!("sweep_start = {}", fmt_sweep(self.sweep.start)));
        lines.push(format!("sweep_stop = {}", fmt_sweep(self.sweep.stop)));
        lines.push(format!("sweep_points = {}", self.sweep.points));
        lines.push(format!("realizations = {}", self.realizations));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!(
            "engine = {}",
            match self.engine {
                EvolutionEngine::ClosedForm => "closed_form",
                EvolutionEngine::MatrixExp => "matrix_exp",
            }
        ));
        lines
    }
}

/// Parse the `key = value` lines of a config file.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut pairs = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected `key = value`", lineno + 1));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return err(format!("line {}: empty key or value", lineno + 1));
        }
        if pairs.insert(key.clone(), value).is_some() {
            return err(format!("line {}: duplicate key {key:?}", lineno + 1));
        }
    }
    Ok(pairs)
}

/// Load a config file, optionally on top of a preset baseline.
pub fn load(base: Option<ExperimentConfig>, text: &str) -> Result<ExperimentConfig, ConfigError> {
    let pairs = parse_pairs(text)?;
    let mut config = match base {
        Some(c) => c,
        None => {
            let kind: ExperimentKind = pairs
                .get("experiment")
                .ok_or_else(|| ConfigError("missing `experiment` key".into()))?
                .parse()?;
            ExperimentConfig::new(kind)
        }
    };
    config.apply(&pairs)?;
    config.validate()?;
    Ok(config)
}
