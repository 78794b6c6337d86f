//! Versioned JSON run configuration. Unknown keys are rejected everywhere.

use crate::CliError;
use polarimetry::homodyne::LossMode;
use serde::Deserialize;
use serde_json::Value;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Schema version; must be 1.
    pub version: u32,
    /// Per-mode Fock dimension for state construction.
    pub cutoff: Option<usize>,
    /// RNG seed for the tomography pipeline.
    pub seed: Option<u64>,
    /// State specification (family tag + parameters).
    pub state: Option<Value>,
    pub grid: Option<GridConfig>,
    pub bright_beam: Option<BrightBeamConfig>,
    pub tomography: Option<TomoConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_theta: usize,
    pub n_phi: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipseConfig {
    pub v_min: f64,
    pub v_max: f64,
    /// Orientation of the squeezed quadrature, radians.
    pub axis: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrightBeamConfig {
    pub mean_photons: f64,
    pub h: EllipseConfig,
    pub v: EllipseConfig,
    /// Relative optical phase between the modes, radians (π/2 puts the mean
    /// Stokes vector on S_y).
    pub relative_phase: f64,
    /// Number of scan rows written by bright-scan (default 720).
    pub scan_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomoConfig {
    pub fock_dim: Option<usize>,
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    pub bin_width: Option<f64>,
    pub efficiency: Option<f64>,
    /// "simulate" (loss degrades the data, reconstruct as-is) or
    /// "compensate" (loss-adjusted projectors recover the pre-loss state).
    pub loss_mode: Option<LossModeConfig>,
    pub n_phases: Option<usize>,
    pub samples_per_phase: Option<usize>,
    /// Fock dimension of the simulated true state (default: fock_dim).
    pub sim_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossModeConfig {
    Simulate,
    Compensate,
}

impl From<LossModeConfig> for LossMode {
    fn from(value: LossModeConfig) -> Self {
        match value {
            LossModeConfig::Simulate => LossMode::SimulateBeforeSampling,
            LossModeConfig::Compensate => LossMode::CompensateInReconstruction,
        }
    }
}

/// Parsed state family.
#[derive(Debug, Clone, Copy)]
pub enum StateSpec {
    Vacuum,
    Number {
        n: usize,
        m: usize,
    },
    Coherent {
        alpha: (f64, f64),
        beta: (f64, f64),
    },
    Su2Coherent {
        photons: usize,
        theta: f64,
        phi: f64,
    },
    SqueezedVacuum {
        r: f64,
        phase: f64,
    },
    SqueezedThermal {
        r: f64,
        n_th: f64,
        phase: f64,
    },
    SqueezedThermalDb {
        squeezing_db: f64,
        antisqueezing_db: f64,
        phase: f64,
    },
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.version != 1 {
        return Err(CliError::Config(format!(
            "unsupported config version {} (expected 1)",
            cfg.version
        )));
    }
    Ok(cfg)
}

fn field_f64(map: &serde_json::Map<String, Value>, key: &str) -> Result<f64, CliError> {
    map.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| CliError::Config(format!("state.{key} must be a number")))
}

fn field_usize(map: &serde_json::Map<String, Value>, key: &str) -> Result<usize, CliError> {
    map.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| CliError::Config(format!("state.{key} must be a nonnegative integer")))
}

fn field_complex(map: &serde_json::Map<String, Value>, key: &str) -> Result<(f64, f64), CliError> {
    let arr = map
        .get(key)
        .and_then(Value::as_array)
        .filter(|a| a.len() == 2)
        .ok_or_else(|| CliError::Config(format!("state.{key} must be [re, im]")))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| CliError::Config(format!("state.{key}[0] must be a number")))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| CliError::Config(format!("state.{key}[1] must be a number")))?;
    Ok((re, im))
}

fn check_keys(
    map: &serde_json::Map<String, Value>,
    allowed: &[&str],
) -> Result<(), CliError> {
    for key in map.keys() {
        if key != "family" && !allowed.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key state.{key}")));
        }
    }
    Ok(())
}

/// Strict family-tagged state parse (serde's internally tagged enums do not
/// support `deny_unknown_fields`, so the keys are validated by hand).
pub fn parse_state(value: &Value) -> Result<StateSpec, CliError> {
    let map = value
        .as_object()
        .ok_or_else(|| CliError::Config("state must be an object".into()))?;
    let family = map
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Config("state.family must be a string".into()))?;
    match family {
        "vacuum" => {
            check_keys(map, &[])?;
            Ok(StateSpec::Vacuum)
        }
        "number" => {
            check_keys(map, &["n", "m"])?;
            Ok(StateSpec::Number {
                n: field_usize(map, "n")?,
                m: field_usize(map, "m")?,
            })
        }
        "coherent" => {
            check_keys(map, &["alpha", "beta"])?;
            Ok(StateSpec::Coherent {
                alpha: field_complex(map, "alpha")?,
                beta: field_complex(map, "beta")?,
            })
        }
        "su2_coherent" => {
            check_keys(map, &["photons", "theta", "phi"])?;
            Ok(StateSpec::Su2Coherent {
                photons: field_usize(map, "photons")?,
                theta: field_f64(map, "theta")?,
                phi: field_f64(map, "phi")?,
            })
        }
        "squeezed_vacuum" => {
            check_keys(map, &["r", "phase"])?;
            Ok(StateSpec::SqueezedVacuum {
                r: field_f64(map, "r")?,
                phase: field_f64(map, "phase")?,
            })
        }
        "squeezed_thermal" => {
            check_keys(map, &["r", "n_th", "phase"])?;
            Ok(StateSpec::SqueezedThermal {
                r: field_f64(map, "r")?,
                n_th: field_f64(map, "n_th")?,
                phase: field_f64(map, "phase")?,
            })
        }
        "squeezed_thermal_db" => {
            check_keys(map, &["squeezing_db", "antisqueezing_db", "phase"])?;
            Ok(StateSpec::SqueezedThermalDb {
                squeezing_db: field_f64(map, "squeezing_db")?,
                antisqueezing_db: field_f64(map, "antisqueezing_db")?,
                phase: field_f64(map, "phase")?,
            })
        }
        other => Err(CliError::Config(format!("unknown state family {other:?}"))),
    }
}
