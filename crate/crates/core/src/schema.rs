//! Serialization schemas for the external interfaces: the JSON state format,
//! the degree-report JSON, the homodyne dataset CSV, and tomography
//! diagnostics.
//!
//! State schema: `{"cutoff": d, "modes": 1|2, "kind": "pure"|"mixed",
//! "re": [...], "im": [...]}` with row-major flattening; a pure state stores
//! its amplitude vector, a mixed state its full density matrix. Values are
//! always written as `f64`.

use crate::degrees::DegreeReport;
use crate::error::{Error, Result};
use crate::fock::{FockCutoff, SingleModeState, StateData, TwoModeState};
use crate::homodyne::{HomodyneDataset, ModeDiagnostics, QuadratureSample};
use crate::linalg::CMatrix;
use crate::scalar::{real, Real};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// On-disk state representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub cutoff: usize,
    /// 1 for a single-mode state, 2 for a two-mode state.
    pub modes: usize,
    /// "pure" or "mixed".
    pub kind: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn complex_arrays<T: Real>(data: &[Complex<T>]) -> (Vec<f64>, Vec<f64>) {
    let re = data.iter().map(|z| z.re.to_f64().unwrap_or(f64::NAN)).collect();
    let im = data.iter().map(|z| z.im.to_f64().unwrap_or(f64::NAN)).collect();
    (re, im)
}

fn state_arrays<T: Real>(data: &StateData<T>) -> (&'static str, Vec<f64>, Vec<f64>) {
    match data {
        StateData::Pure(v) => {
            let (re, im) = complex_arrays(v);
            ("pure", re, im)
        }
        StateData::Mixed(rho) => {
            let (re, im) = complex_arrays(rho.data());
            ("mixed", re, im)
        }
    }
}

impl StateJson {
    pub fn from_two_mode<T: Real>(state: &TwoModeState<T>) -> Self {
        let (kind, re, im) = state_arrays(state.data());
        Self {
            cutoff: state.cutoff().per_mode_dim(),
            modes: 2,
            kind: kind.into(),
            re,
            im,
        }
    }

    pub fn from_single_mode<T: Real>(state: &SingleModeState<T>) -> Self {
        let (kind, re, im) = state_arrays(state.data());
        Self {
            cutoff: state.dim(),
            modes: 1,
            kind: kind.into(),
            re,
            im,
        }
    }

    fn complex_data<T: Real>(&self, expected_len: usize) -> Result<Vec<Complex<T>>> {
        if self.re.len() != expected_len || self.im.len() != expected_len {
            return Err(Error::InvalidParameter(format!(
                "state arrays have length {}/{}, expected {expected_len}",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex::new(real::<T>(r), real::<T>(i)))
            .collect())
    }

    pub fn to_two_mode<T: Real>(&self) -> Result<TwoModeState<T>> {
        if self.modes != 2 {
            return Err(Error::InvalidParameter(format!(
                "expected a two-mode state, file has modes={}",
                self.modes
            )));
        }
        let cutoff = FockCutoff::new(self.cutoff)?;
        let dim = cutoff.two_mode_dim();
        match self.kind.as_str() {
            "pure" => TwoModeState::pure(cutoff, self.complex_data(dim)?),
            "mixed" => {
                let data = self.complex_data::<T>(dim * dim)?;
                let mut rho = CMatrix::zeros(dim);
                for i in 0..dim {
                    for j in 0..dim {
                        rho[(i, j)] = data[i * dim + j];
                    }
                }
                TwoModeState::mixed(cutoff, rho)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown state kind {other:?}"
            ))),
        }
    }

    pub fn to_single_mode<T: Real>(&self) -> Result<SingleModeState<T>> {
        if self.modes != 1 {
            return Err(Error::InvalidParameter(format!(
                "expected a single-mode state, file has modes={}",
                self.modes
            )));
        }
        let dim = self.cutoff;
        match self.kind.as_str() {
            "pure" => SingleModeState::pure(self.complex_data(dim)?),
            "mixed" => {
                let data = self.complex_data::<T>(dim * dim)?;
                let mut rho = CMatrix::zeros(dim);
                for i in 0..dim {
                    for j in 0..dim {
                        rho[(i, j)] = data[i * dim + j];
                    }
                }
                SingleModeState::mixed(rho)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown state kind {other:?}"
            ))),
        }
    }
}

/// On-disk degree report (field names are the documented interface).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeReportJson {
    pub p1: f64,
    pub p2_prime: f64,
    pub p2: f64,
    pub min_variance_direction: [f64; 3],
    pub ellipsoid_semi_axes: [f64; 3],
    pub eigenvalues: [f64; 3],
    pub unpolarized: bool,
    pub degenerate_minimum: bool,
    pub s0_mean: f64,
    pub s_squared_mean: f64,
    pub total_variance: f64,
    pub mean_vector: [f64; 3],
    pub tail_probability: f64,
    pub tail_warning: bool,
}

fn vec3_f64<T: Real>(v: &[T; 3]) -> [f64; 3] {
    [
        v[0].to_f64().unwrap_or(f64::NAN),
        v[1].to_f64().unwrap_or(f64::NAN),
        v[2].to_f64().unwrap_or(f64::NAN),
    ]
}

impl DegreeReportJson {
    pub fn from_report<T: Real>(report: &DegreeReport<T>) -> Self {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        Self {
            p1: f(report.p1),
            p2_prime: f(report.p2_prime),
            p2: f(report.p2),
            min_variance_direction: vec3_f64(&report.min_variance_direction),
            ellipsoid_semi_axes: vec3_f64(&report.ellipsoid_semi_axes),
            eigenvalues: vec3_f64(&report.eigenvalues),
            unpolarized: report.unpolarized,
            degenerate_minimum: report.degenerate_minimum,
            s0_mean: f(report.s0_mean),
            s_squared_mean: f(report.s_squared_mean),
            total_variance: f(report.total_variance),
            mean_vector: vec3_f64(&report.mean_vector),
            tail_probability: f(report.tail_probability),
            tail_warning: report.tail_warning,
        }
    }

    /// Round every float to 9 significant digits for reproducible output.
    pub fn rounded(mut self) -> Self {
        let r = round_sig9;
        self.p1 = r(self.p1);
        self.p2_prime = r(self.p2_prime);
        self.p2 = r(self.p2);
        for arr in [
            &mut self.min_variance_direction,
            &mut self.ellipsoid_semi_axes,
            &mut self.eigenvalues,
            &mut self.mean_vector,
        ] {
            for x in arr.iter_mut() {
                *x = r(*x);
            }
        }
        self.s0_mean = r(self.s0_mean);
        self.s_squared_mean = r(self.s_squared_mean);
        self.total_variance = r(self.total_variance);
        self.tail_probability = r(self.tail_probability);
        self
    }
}

/// Round to 9 significant digits (identity for non-finite values).
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Tomography convergence diagnostics, serialized alongside the state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomoDiagnosticsJson {
    pub samples_h: usize,
    pub samples_v: usize,
    pub iterations_h: usize,
    pub iterations_v: usize,
    pub converged_h: bool,
    pub converged_v: bool,
    pub final_log_likelihood_h: f64,
    pub final_log_likelihood_v: f64,
    pub fidelity_h: f64,
    pub fidelity_v: f64,
    pub fidelity_two_mode: f64,
}

impl TomoDiagnosticsJson {
    pub fn from_parts<T: Real>(
        h: &ModeDiagnostics<T>,
        v: &ModeDiagnostics<T>,
        fidelity_h: T,
        fidelity_v: T,
        fidelity_two_mode: T,
    ) -> Self {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        Self {
            samples_h: h.samples,
            samples_v: v.samples,
            iterations_h: h.iterations,
            iterations_v: v.iterations,
            converged_h: h.converged,
            converged_v: v.converged,
            final_log_likelihood_h: round_sig9(f(h.final_log_likelihood)),
            final_log_likelihood_v: round_sig9(f(v.final_log_likelihood)),
            fidelity_h: round_sig9(f(fidelity_h)),
            fidelity_v: round_sig9(f(fidelity_v)),
            fidelity_two_mode: round_sig9(f(fidelity_two_mode)),
        }
    }
}

/// Write a homodyne dataset as CSV with columns `mode,lo_phase,value`.
pub fn write_dataset_csv<T: Real, W: Write>(
    dataset: &HomodyneDataset<T>,
    writer: &mut W,
) -> Result<()> {
    writeln!(writer, "mode,lo_phase,value")?;
    for (label, samples) in [("H", &dataset.h), ("V", &dataset.v)] {
        for s in samples {
            writeln!(
                writer,
                "{label},{:.8e},{:.8e}",
                s.lo_phase.to_f64().unwrap_or(f64::NAN),
                s.value.to_f64().unwrap_or(f64::NAN)
            )?;
        }
    }
    Ok(())
}

/// Read a homodyne dataset CSV (columns `mode,lo_phase,value`).
pub fn read_dataset_csv<T: Real, R: BufRead>(reader: R) -> Result<HomodyneDataset<T>> {
    let mut dataset = HomodyneDataset::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (lineno == 0 && trimmed.starts_with("mode")) {
            continue;
        }
        let mut fields = trimmed.split(',');
        let bad = |what: &str| {
            Error::InvalidParameter(format!("dataset line {}: {what}", lineno + 1))
        };
        let mode = fields.next().ok_or_else(|| bad("missing mode"))?;
        let phase: f64 = fields
            .next()
            .ok_or_else(|| bad("missing lo_phase"))?
            .parse()
            .map_err(|_| bad("unparseable lo_phase"))?;
        let value: f64 = fields
            .next()
            .ok_or_else(|| bad("missing value"))?
            .parse()
            .map_err(|_| bad("unparseable value"))?;
        let sample = QuadratureSample {
            lo_phase: real::<T>(phase),
            value: real::<T>(value),
        };
        match mode {
            "H" | "h" => dataset.h.push(sample),
            "V" | "v" => dataset.v.push(sample),
            other => return Err(bad(&format!("unknown mode {other:?}"))),
        }
    }
    dataset.validate()?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{two_mode_coherent, SqueezedThermalSpec};
    use num_complex::Complex64;

    #[test]
    fn state_json_roundtrip_pure() {
        let cutoff = FockCutoff::new(6).unwrap();
        let s = two_mode_coherent(
            Complex64::new(0.8, 0.1),
            Complex64::new(0.0, -0.4),
            cutoff,
        )
        .unwrap();
        let json = StateJson::from_two_mode(&s);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: StateJson = serde_json::from_str(&text).unwrap();
        let back: TwoModeState<f64> = parsed.to_two_mode().unwrap();
        for i in 0..s.dim() {
            assert!((back.population(i) - s.population(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn state_json_roundtrip_mixed_single_mode() {
        let spec = SqueezedThermalSpec::new(0.4, 0.2, 0.0).unwrap();
        let s = crate::states::squeezed_thermal(spec, FockCutoff::new(14).unwrap()).unwrap();
        let json = StateJson::from_single_mode(&s);
        let back: SingleModeState<f64> = json.to_single_mode().unwrap();
        let dev = back.density_matrix().sub(&s.density_matrix()).max_abs();
        assert!(dev < 1e-15);
    }

    #[test]
    fn state_json_rejects_unknown_fields_and_bad_shapes() {
        let err: std::result::Result<StateJson, _> =
            serde_json::from_str(r#"{"cutoff":2,"modes":2,"kind":"pure","re":[1,0,0,0],"im":[0,0,0,0],"extra":1}"#);
        assert!(err.is_err(), "unknown keys must be rejected");

        let short: StateJson = serde_json::from_str(
            r#"{"cutoff":2,"modes":2,"kind":"pure","re":[1.0],"im":[0.0]}"#,
        )
        .unwrap();
        assert!(short.to_two_mode::<f64>().is_err());
    }

    #[test]
    fn dataset_csv_roundtrip() {
        let mut ds = HomodyneDataset::<f64>::default();
        ds.h.push(QuadratureSample {
            lo_phase: 0.0,
            value: 0.123456789,
        });
        ds.v.push(QuadratureSample {
            lo_phase: 1.5,
            value: -2.5,
        });
        let mut buf = Vec::new();
        write_dataset_csv(&ds, &mut buf).unwrap();
        let back: HomodyneDataset<f64> = read_dataset_csv(&buf[..]).unwrap();
        assert_eq!(back.h.len(), 1);
        assert_eq!(back.v.len(), 1);
        assert!((back.h[0].value - 0.123456789).abs() < 1e-9);
        assert!((back.v[0].lo_phase - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rounding_gives_nine_significant_digits() {
        let x = std::f64::consts::PI;
        let r = round_sig9(x);
        assert!((r - 3.14159265).abs() < 1e-8);
        assert_eq!(round_sig9(0.5), 0.5);
        assert!(round_sig9(f64::NAN).is_nan());
    }
}
