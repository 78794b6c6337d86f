//! Command implementations on top of the core library.

use crate::config::{parse_state, RunConfig, StateSpec};
use crate::{numerical, CliError, OutputFormat};
use polarimetry::Complex64;
use polarimetry::degrees::degree_report;
use polarimetry::fock::{FockCutoff, Mode};
use polarimetry::homodyne::{run_experiment2_pipeline, PipelineConfig, ReconstructionConfig};
use polarimetry::poincare::{
    dark_plane_variance, export_map, find_dark_plane_minimum, variance_map, BrightBeamModel,
    MapFormat, QuadratureEllipse, SphereGrid,
};
use polarimetry::schema::{
    round_sig9, write_dataset_csv, DegreeReportJson, StateJson, TomoDiagnosticsJson,
};
use polarimetry::states::{
    single_mode_squeezed_vacuum, squeezed_thermal, su2_coherent, tensor_with_vacuum,
    two_mode_coherent, two_mode_number, two_mode_vacuum, SqueezedThermalSpec, Su2CoherentSpec,
};
use polarimetry::stokes::stokes_moments;
use polarimetry::TwoModeState64;
use std::fs;
use std::path::Path;

fn require_cutoff(cfg: &RunConfig) -> Result<FockCutoff, CliError> {
    let d = cfg
        .cutoff
        .ok_or_else(|| CliError::Config("missing `cutoff`".into()))?;
    FockCutoff::new(d).map_err(|e| CliError::Config(e.to_string()))
}

fn require_state(cfg: &RunConfig) -> Result<StateSpec, CliError> {
    let value = cfg
        .state
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `state` section".into()))?;
    parse_state(value)
}

/// Build the configured two-mode state; single-mode families get vacuum on V.
fn build_state(spec: StateSpec, cutoff: FockCutoff) -> Result<TwoModeState64, CliError> {
    match spec {
        StateSpec::Vacuum => Ok(two_mode_vacuum::<f64>(cutoff)),
        StateSpec::Number { n, m } => two_mode_number(n, m, cutoff).map_err(numerical),
        StateSpec::Coherent { alpha, beta } => two_mode_coherent(
            Complex64::new(alpha.0, alpha.1),
            Complex64::new(beta.0, beta.1),
            cutoff,
        )
        .map_err(numerical),
        StateSpec::Su2Coherent { photons, theta, phi } => {
            su2_coherent(Su2CoherentSpec { photons, theta, phi }, cutoff).map_err(numerical)
        }
        StateSpec::SqueezedVacuum { r, phase } => {
            let single = single_mode_squeezed_vacuum(r, phase, cutoff).map_err(numerical)?;
            tensor_with_vacuum(&single, Mode::H, cutoff).map_err(numerical)
        }
        StateSpec::SqueezedThermal { r, n_th, phase } => {
            let spec = SqueezedThermalSpec::new(r, n_th, phase).map_err(numerical)?;
            let single = squeezed_thermal(spec, cutoff).map_err(numerical)?;
            tensor_with_vacuum(&single, Mode::H, cutoff).map_err(numerical)
        }
        StateSpec::SqueezedThermalDb {
            squeezing_db,
            antisqueezing_db,
            phase,
        } => {
            let spec = SqueezedThermalSpec::from_db(squeezing_db, antisqueezing_db, phase)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let single = squeezed_thermal(spec, cutoff).map_err(numerical)?;
            tensor_with_vacuum(&single, Mode::H, cutoff).map_err(numerical)
        }
    }
}

fn squeezed_thermal_spec(spec: StateSpec) -> Result<SqueezedThermalSpec<f64>, CliError> {
    match spec {
        StateSpec::Vacuum => SqueezedThermalSpec::new(0.0, 0.0, 0.0).map_err(numerical),
        StateSpec::SqueezedVacuum { r, phase } => {
            SqueezedThermalSpec::new(r, 0.0, phase).map_err(numerical)
        }
        StateSpec::SqueezedThermal { r, n_th, phase } => {
            SqueezedThermalSpec::new(r, n_th, phase).map_err(numerical)
        }
        StateSpec::SqueezedThermalDb {
            squeezing_db,
            antisqueezing_db,
            phase,
        } => SqueezedThermalSpec::from_db(squeezing_db, antisqueezing_db, phase)
            .map_err(|e| CliError::Config(e.to_string())),
        _ => Err(CliError::Config(
            "tomo requires a vacuum / squeezed_vacuum / squeezed_thermal[_db] state".into(),
        )),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

/// Print to stdout; a closed pipe (e.g. `| head`) ends the stream quietly.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match writeln!(std::io::stdout(), "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::Io(e.to_string())),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn degrees(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let cutoff = require_cutoff(cfg)?;
    let spec = require_state(cfg)?;
    let state = build_state(spec, cutoff)?;
    let report = degree_report(&stokes_moments(&state)).map_err(numerical)?;
    let json = DegreeReportJson::from_report(&report).rounded();
    let text = serde_json::to_string_pretty(&json).map_err(|e| CliError::Io(e.to_string()))?;
    emit(&text)?;
    if let Some(dir) = out {
        ensure_out_dir(dir)?;
        write_json(&dir.join("degrees.json"), &json)?;
    }
    Ok(())
}

pub fn sphere_map(
    cfg: &RunConfig,
    out: &Path,
    format: Option<OutputFormat>,
) -> Result<(), CliError> {
    let cutoff = require_cutoff(cfg)?;
    let spec = require_state(cfg)?;
    let grid_cfg = cfg
        .grid
        .ok_or_else(|| CliError::Config("missing `grid` section".into()))?;
    let grid = SphereGrid::new(grid_cfg.n_theta, grid_cfg.n_phi)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let state = build_state(spec, cutoff)?;
    let map = variance_map(&stokes_moments(&state), grid);

    ensure_out_dir(out)?;
    let formats: Vec<MapFormat> = match format {
        Some(OutputFormat::Csv) => vec![MapFormat::Csv],
        Some(OutputFormat::Json) => vec![MapFormat::Json],
        Some(OutputFormat::Ppm) => vec![MapFormat::Ppm],
        None => vec![MapFormat::Csv, MapFormat::Json, MapFormat::Ppm],
    };
    for f in formats {
        let path = out.join(format!("map.{}", f.extension()));
        let mut file = fs::File::create(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        export_map(&map, f, &mut file).map_err(numerical)?;
    }

    let (min_idx, min_v) = map.min_node();
    let (max_idx, max_v) = map.max_node();
    let (min_t, min_p) = map.grid.node::<f64>(min_idx);
    let (max_t, max_p) = map.grid.node::<f64>(max_idx);
    emit(&format!(
        "variance min {:.8e} at (theta {:.8e}, phi {:.8e}); max {:.8e} at (theta {:.8e}, phi {:.8e})",
        min_v, min_t, min_p, max_v, max_t, max_p
    ))?;
    Ok(())
}

pub fn bright_scan(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let bb = cfg
        .bright_beam
        .ok_or_else(|| CliError::Config("missing `bright_beam` section".into()))?;
    let model = BrightBeamModel {
        mean_photons: bb.mean_photons,
        h: QuadratureEllipse {
            v_min: bb.h.v_min,
            v_max: bb.h.v_max,
            axis: bb.h.axis,
        },
        v: QuadratureEllipse {
            v_min: bb.v.v_min,
            v_max: bb.v.v_max,
            axis: bb.v.axis,
        },
        relative_phase: bb.relative_phase,
    };
    model
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let points = bb.scan_points.unwrap_or(720).max(2);

    let mut csv = String::from("theta,variance,variance_db\n");
    for i in 0..points {
        let theta = i as f64 * std::f64::consts::PI / points as f64;
        let v = dark_plane_variance(&model, theta);
        csv.push_str(&format!(
            "{:.8e},{:.8e},{:.8e}\n",
            theta,
            v,
            10.0 * v.log10()
        ));
    }
    let (theta_star, v_star) = find_dark_plane_minimum(&model);
    let summary = format!(
        "minimum variance {:.8e} ({:.8e} dB) at theta {:.8e} rad",
        round_sig9(v_star),
        round_sig9(10.0 * v_star.log10()),
        round_sig9(theta_star)
    );

    match out {
        Some(dir) => {
            ensure_out_dir(dir)?;
            let path = dir.join("scan.csv");
            fs::write(&path, csv)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            emit(&summary)?;
        }
        None => {
            emit(csv.trim_end())?;
            emit(&summary)?;
        }
    }
    Ok(())
}

pub fn tomo(cfg: &RunConfig, out: &Path, seed_flag: Option<u64>) -> Result<(), CliError> {
    let spec = squeezed_thermal_spec(require_state(cfg)?)?;
    let seed = seed_flag
        .or(cfg.seed)
        .ok_or_else(|| CliError::Config("tomo requires a seed (config `seed` or --seed)".into()))?;

    let defaults = ReconstructionConfig::<f64>::default();
    let tomo_cfg = cfg.tomography.as_ref();
    let reconstruction = ReconstructionConfig {
        fock_dim: tomo_cfg.and_then(|t| t.fock_dim).unwrap_or(defaults.fock_dim),
        max_iterations: tomo_cfg
            .and_then(|t| t.max_iterations)
            .unwrap_or(defaults.max_iterations),
        tolerance: tomo_cfg.and_then(|t| t.tolerance).unwrap_or(defaults.tolerance),
        bin_width: tomo_cfg.and_then(|t| t.bin_width).unwrap_or(defaults.bin_width),
        efficiency: tomo_cfg
            .and_then(|t| t.efficiency)
            .unwrap_or(defaults.efficiency),
        loss_mode: tomo_cfg
            .and_then(|t| t.loss_mode)
            .map(Into::into)
            .unwrap_or(defaults.loss_mode),
    };
    let pipeline = PipelineConfig {
        reconstruction,
        n_phases: tomo_cfg.and_then(|t| t.n_phases).unwrap_or(12),
        samples_per_phase: tomo_cfg.and_then(|t| t.samples_per_phase).unwrap_or(100_000),
        sim_dim: tomo_cfg
            .and_then(|t| t.sim_dim)
            .unwrap_or(reconstruction.fock_dim),
    };
    reconstruction
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let report = run_experiment2_pipeline(spec, &pipeline, seed).map_err(numerical)?;

    ensure_out_dir(out)?;
    let degrees_json = DegreeReportJson::from_report(&report.degrees).rounded();
    write_json(&out.join("tomo_degrees.json"), &degrees_json)?;
    write_json(
        &out.join("tomo_direct_degrees.json"),
        &DegreeReportJson::from_report(&report.direct_degrees).rounded(),
    )?;
    write_json(
        &out.join("tomo_state.json"),
        &StateJson::from_two_mode(&report.reconstructed),
    )?;
    write_json(
        &out.join("tomo_state_h.json"),
        &StateJson::from_single_mode(&report.reconstructed_h),
    )?;
    write_json(
        &out.join("tomo_state_v.json"),
        &StateJson::from_single_mode(&report.reconstructed_v),
    )?;
    write_json(
        &out.join("tomo_diagnostics.json"),
        &TomoDiagnosticsJson::from_parts(
            &report.diagnostics_h,
            &report.diagnostics_v,
            report.fidelity_h,
            report.fidelity_v,
            report.fidelity_two_mode,
        ),
    )?;
    let dataset_path = out.join("tomo_dataset.csv");
    let mut file = fs::File::create(&dataset_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", dataset_path.display())))?;
    write_dataset_csv(&report.dataset, &mut file).map_err(numerical)?;

    let text =
        serde_json::to_string_pretty(&degrees_json).map_err(|e| CliError::Io(e.to_string()))?;
    emit(&text)?;
    Ok(())
}
