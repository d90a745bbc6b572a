//! Built-in parameter sets for the two experimental platforms the
//! simulator targets. Resonance frequencies are pinned as exact multiples
//! of J (989 and 1000) so the free-phase commensurability condition holds;
//! in ordinary units they correspond to ν ≈ 6.923 THz / ν_q3 = 7 THz for
//! the photonic stack and ν ≈ 1.879 GHz / ν_q3 = 1.9 GHz for the
//! superconducting one.

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};

pub const PRESET_NAMES: [&str; 2] = ["photonic-crystal", "superconducting"];

/// Resolve a named preset to a full experiment configuration.
pub fn preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
    match name {
        // photonic-crystal cavities: N = 10, J/2π = 7 GHz, γ/2π = 3.5 MHz,
        // cavity decay swept over 0..70 MHz
        "photonic-crystal" => {
            let mut c = ExperimentConfig::new(ExperimentKind::DecaySweep);
            c.n_cavities = 10;
            c.j = 7.0e9;
            c.omega_over_j = 989.0;
            c.omega_q3_over_j = 1000.0;
            c.gamma = 3.5e6;
            c.seed = 42;
            Ok(c)
        }
        // superconducting resonators: N = 10, J/2π = 1.9 MHz,
        // κ/2π = 1.8 kHz, γ/2π = 1 kHz
        "superconducting" => {
            let mut c = ExperimentConfig::new(ExperimentKind::SuperconductingPoint);
            c.n_cavities = 10;
            c.j = 1.9e6;
            c.omega_over_j = 989.0;
            c.omega_q3_over_j = 1000.0;
            c.kappa = 1.8e3;
            c.gamma = 1.0e3;
            c.seed = 42;
            Ok(c)
        }
        other => Err(ConfigError(format!(
            "unknown preset {other:?} (available: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}
