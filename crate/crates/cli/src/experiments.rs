//! Map each experiment kind onto the library operations and collect the
//! result table.

use std::f64::consts::TAU;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use qdc_core::disorder::{average_fidelities, mean_coupling, DisorderKind, DisorderSpec};
use qdc_core::evolve::{transfer_probability, EvolutionEngine};
use qdc_core::open_system::{dissipative_fidelities, DecayRates};
use qdc_core::protocol::{fidelity_at, ClassicalBits};

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::table::ResultTable;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Core(qdc_core::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "{e}"),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<qdc_core::Error> for RunError {
    fn from(e: qdc_core::Error) -> Self {
        Self::Core(e)
    }
}

/// Execute the configured experiment and return the filled table.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable, RunError> {
    config.validate()?;
    let mut table = match config.experiment {
        ExperimentKind::TransferCurve => transfer_curve(config)?,
        ExperimentKind::IdealFidelity => ideal_fidelity(config)?,
        ExperimentKind::DecaySweep => decay_sweep(config)?,
        ExperimentKind::SuperconductingPoint => superconducting_point(config)?,
        ExperimentKind::DisorderCoupling => disorder(config, DisorderKind::Coupling)?,
        ExperimentKind::DisorderFrequency => disorder(config, DisorderKind::Frequency)?,
    };
    let mut metadata = vec![format!("qdc {}", env!("CARGO_PKG_VERSION"))];
    metadata.extend(config.echo());
    metadata.push(format!(
        "generated_unix = {}",
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    ));
    metadata.append(&mut table.metadata);
    table.metadata = metadata;
    Ok(table)
}

fn transfer_curve(config: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let mut table = ResultTable::new(vec!["jt", "p_transfer"]);
    for jt in config.sweep.values() {
        table.push_row(vec![jt, transfer_probability(config.n_cavities, jt)]);
    }
    Ok(table)
}

fn ideal_fidelity(config: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let params = config.system_params()?;
    let j = params.j_unit();
    let mut table = ResultTable::new(vec!["jt", "f1", "f2", "f3", "f4"]);
    for jt in config.sweep.values() {
        let mut row = vec![jt];
        for bits in ClassicalBits::ALL {
            row.push(fidelity_at(&params, bits, jt / j, config.engine)?);
        }
        table.push_row(row);
    }
    Ok(table)
}

fn decay_sweep(config: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let params = config.system_params()?;
    let gamma = TAU * config.gamma;
    let grid = config.sweep.values();
    let rows: Vec<Result<Vec<f64>, qdc_core::Error>> = grid
        .par_iter()
        .map(|&nu_k| {
            let rates = DecayRates::new(TAU * nu_k, gamma)?;
            let f = dissipative_fidelities(&params, rates)?;
            Ok(vec![nu_k, f[0], f[1], f[2], f[3]])
        })
        .collect();
    let mut table = ResultTable::new(vec!["kappa_hz", "f1", "f2", "f3", "f4"]);
    for row in rows {
        table.push_row(row?);
    }
    table
        .metadata
        .push(format!("transfer_time_s = {:e}", transfer_time_s(config.j)));
    Ok(table)
}

fn superconducting_point(config: &ExperimentConfig) -> Result<ResultTable, RunError> {
    let params = config.system_params()?;
    let rates = DecayRates::new(TAU * config.kappa, TAU * config.gamma)?;
    let f = dissipative_fidelities(&params, rates)?;
    let mut table = ResultTable::new(vec![
        "kappa_hz",
        "gamma_hz",
        "f1",
        "f2",
        "f3",
        "f4",
        "transfer_time_s",
    ]);
    table.push_row(vec![
        config.kappa,
        config.gamma,
        f[0],
        f[1],
        f[2],
        f[3],
        transfer_time_s(config.j),
    ]);
    Ok(table)
}

fn disorder(config: &ExperimentConfig, kind: DisorderKind) -> Result<ResultTable, RunError> {
    if config.engine == EvolutionEngine::ClosedForm {
        return Err(ConfigError(
            "disorder experiments need the matrix_exp engine (disordered \
             couplings are outside the closed form's domain)"
                .into(),
        )
        .into());
    }
    let base = config.system_params()?;
    let (first_col, width_of): (&str, Box<dyn Fn(f64) -> f64>) = match kind {
        DisorderKind::Coupling => {
            let mean_j = mean_coupling(&base);
            ("percent", Box::new(move |pct: f64| pct / 100.0 * mean_j))
        }
        DisorderKind::Frequency => {
            let j = base.j_unit();
            ("delta_omega_over_j", Box::new(move |ratio: f64| ratio * j))
        }
    };
    let mut table = ResultTable::new(vec![
        first_col,
        "f1",
        "f2",
        "f3",
        "f4",
        "se1",
        "se2",
        "se3",
        "se4",
        "resamples",
    ]);
    for x in config.sweep.values() {
        let spec = DisorderSpec {
            kind,
            width: width_of(x),
            realizations: config.realizations,
            seed: config.seed,
        };
        let r = average_fidelities(&base, &spec)?;
        table.push_row(vec![
            x,
            r.mean_fidelities[0],
            r.mean_fidelities[1],
            r.mean_fidelities[2],
            r.mean_fidelities[3],
            r.std_errors[0],
            r.std_errors[1],
            r.std_errors[2],
            r.std_errors[3],
            r.resamples as f64,
        ]);
    }
    Ok(table)
}

/// Transfer time in seconds in the per-cycle convention the platform
/// parameters are quoted in: `π/(2 ν_J)`.
pub fn transfer_time_s(nu_j: f64) -> f64 {
    std::f64::consts::PI / (2.0 * nu_j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_curve_peaks_at_half_period() {
        let mut c = ExperimentConfig::new(ExperimentKind::TransferCurve);
        c.n_cavities = 3;
        let t = run(&c).unwrap();
        // 201-point grid over [0, π] hits π/2 at row 100
        assert!((t.rows[100][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_fidelity_reaches_unity() {
        let mut c = ExperimentConfig::new(ExperimentKind::IdealFidelity);
        c.n_cavities = 4;
        c.omega_over_j = 9995.0;
        c.omega_q3_over_j = 10_000.0;
        let t = run(&c).unwrap();
        for col in 1..=4 {
            assert!((t.rows[100][col] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn disorder_rejects_closed_form() {
        let mut c = ExperimentConfig::new(ExperimentKind::DisorderCoupling);
        c.engine = EvolutionEngine::ClosedForm;
        c.realizations = 2;
        assert!(matches!(run(&c), Err(RunError::Config(_))));
    }
}
