//! Variance maps over the Poincaré sphere, dB scaling, CSV/JSON/PPM export,
//! and the linearized bright-beam dark-plane scan.
//!
//! Map nodes form an equirectangular lattice: θ runs inclusively from 0 to π
//! over `n_theta` rows (the pole rows repeat a single physical direction
//! across φ), φ runs over [0, 2π) in `n_phi` columns. Row-major iteration
//! starts at θ = 0, matching the PPM raster layout.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::stokes::{projected_variance, Direction, StokesMomentSet};
use std::io::Write;

/// Regular θ×φ lattice on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidParameter(
                "sphere grid dimensions must be positive".into(),
            ));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn node_count(&self) -> usize {
        self.n_theta * self.n_phi
    }

    /// Spherical angles of the node at flat index `idx` (row-major from θ=0).
    pub fn node<T: Real>(&self, idx: usize) -> (T, T) {
        let i = idx / self.n_phi;
        let j = idx % self.n_phi;
        let theta = if self.n_theta == 1 {
            real::<T>(std::f64::consts::FRAC_PI_2)
        } else {
            real::<T>(std::f64::consts::PI) * real::<T>(i as f64)
                / real::<T>((self.n_theta - 1) as f64)
        };
        let phi = real::<T>(2.0 * std::f64::consts::PI) * real::<T>(j as f64)
            / real::<T>(self.n_phi as f64);
        (theta, phi)
    }
}

/// Projected Stokes variance at every grid node, in photons² and in dB
/// relative to the shot-noise reference ⟨S₀⟩ (a coherent state sits at 0 dB
/// everywhere).
#[derive(Debug, Clone)]
pub struct VarianceMap<T> {
    pub grid: SphereGrid,
    /// nᵗΓn per node, row-major from θ = 0.
    pub values: Vec<T>,
    /// 10·log₁₀(value / shot_reference); −∞ for a vanishing variance and NaN
    /// when the reference itself vanishes (vacuum input).
    pub values_db: Vec<T>,
    /// ⟨S₀⟩ of the mapped state.
    pub shot_reference: T,
}

/// 10·log₁₀(variance/reference) with the conventions above.
pub fn variance_db<T: Real>(variance: T, reference: T) -> T {
    if reference <= T::zero() {
        return T::nan();
    }
    if variance <= T::zero() {
        return T::neg_infinity();
    }
    real::<T>(10.0) * (variance / reference).log10()
}

impl<T: Real> VarianceMap<T> {
    /// Node index and value of the smallest variance.
    pub fn min_node(&self) -> (usize, T) {
        self.extremum(|a, b| a < b)
    }

    /// Node index and value of the largest variance.
    pub fn max_node(&self) -> (usize, T) {
        self.extremum(|a, b| a > b)
    }

    fn extremum(&self, better: impl Fn(T, T) -> bool) -> (usize, T) {
        let mut best = (0usize, self.values[0]);
        for (i, &v) in self.values.iter().enumerate() {
            if better(v, best.1) {
                best = (i, v);
            }
        }
        best
    }
}

/// Evaluate nᵗΓn over the grid.
pub fn variance_map<T: Real>(moments: &StokesMomentSet<T>, grid: SphereGrid) -> VarianceMap<T> {
    let shot_reference = moments.s0_mean;
    let mut values = Vec::with_capacity(grid.node_count());
    let mut values_db = Vec::with_capacity(grid.node_count());
    for idx in 0..grid.node_count() {
        let (theta, phi) = grid.node::<T>(idx);
        let v = projected_variance(moments, &Direction::from_angles(theta, phi));
        values.push(v);
        values_db.push(variance_db(v, shot_reference));
    }
    VarianceMap {
        grid,
        values,
        values_db,
        shot_reference,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Csv,
    Json,
    Ppm,
}

impl MapFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            MapFormat::Csv => "csv",
            MapFormat::Json => "json",
            MapFormat::Ppm => "ppm",
        }
    }
}

/// Write a variance map in the chosen format.
///
/// CSV columns are `theta,phi,variance,variance_db` with 9 significant
/// digits. The PPM is a binary `P6`, 8-bit equirectangular raster (n_phi wide,
/// n_theta tall, row-major from θ=0) with a linear blue-to-red ramp between
/// the map minimum and maximum.
pub fn export_map<T: Real, W: Write>(
    map: &VarianceMap<T>,
    format: MapFormat,
    writer: &mut W,
) -> Result<()> {
    match format {
        MapFormat::Csv => {
            writeln!(writer, "theta,phi,variance,variance_db")?;
            for idx in 0..map.grid.node_count() {
                let (theta, phi) = map.grid.node::<T>(idx);
                writeln!(
                    writer,
                    "{:.8e},{:.8e},{:.8e},{:.8e}",
                    theta.to_f64().unwrap_or(f64::NAN),
                    phi.to_f64().unwrap_or(f64::NAN),
                    map.values[idx].to_f64().unwrap_or(f64::NAN),
                    map.values_db[idx].to_f64().unwrap_or(f64::NAN),
                )?;
            }
        }
        MapFormat::Json => {
            let nodes: Vec<serde_json::Value> = (0..map.grid.node_count())
                .map(|idx| {
                    let (theta, phi) = map.grid.node::<f64>(idx);
                    serde_json::json!({
                        "theta": theta,
                        "phi": phi,
                        "variance": map.values[idx].to_f64().unwrap_or(f64::NAN),
                        "variance_db": finite_or_null(map.values_db[idx]),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "n_theta": map.grid.n_theta,
                "n_phi": map.grid.n_phi,
                "shot_reference": map.shot_reference.to_f64().unwrap_or(f64::NAN),
                "nodes": nodes,
            });
            serde_json::to_writer_pretty(&mut *writer, &doc)?;
            writeln!(writer)?;
        }
        MapFormat::Ppm => {
            let (_, lo) = map.min_node();
            let (_, hi) = map.max_node();
            let span = hi - lo;
            // rounding-level anisotropy renders as a uniform color
            let flat = span <= real::<T>(1e-9) * hi.abs().max(T::one());
            writeln!(writer, "P6")?;
            writeln!(writer, "{} {}", map.grid.n_phi, map.grid.n_theta)?;
            writeln!(writer, "255")?;
            let mut pixels = Vec::with_capacity(3 * map.grid.node_count());
            for &v in &map.values {
                let t = if flat {
                    T::zero()
                } else {
                    ((v - lo) / span).max(T::zero()).min(T::one())
                };
                let r = (t * real::<T>(255.0)).round().to_u8().unwrap_or(0);
                pixels.extend_from_slice(&[r, 0, 255 - r]);
            }
            writer.write_all(&pixels)?;
        }
    }
    Ok(())
}

fn finite_or_null<T: Real>(x: T) -> serde_json::Value {
    match x.to_f64() {
        Some(v) if v.is_finite() => serde_json::json!(v),
        _ => serde_json::Value::Null,
    }
}

/// Quadrature noise ellipse of one mode: V_min at angle `axis`, V_max at
/// `axis` + π/2, in shot-noise units (vacuum = 1).
#[derive(Debug, Clone, Copy)]
pub struct QuadratureEllipse<T> {
    pub v_min: T,
    pub v_max: T,
    pub axis: T,
}

impl<T: Real> QuadratureEllipse<T> {
    /// Variance of the rotated quadrature X_θ.
    pub fn variance_at(&self, theta: T) -> T {
        let d = theta - self.axis;
        let (s, c) = (d.sin(), d.cos());
        self.v_min * c * c + self.v_max * s * s
    }

    pub fn vacuum() -> Self {
        Self {
            v_min: T::one(),
            v_max: T::one(),
            axis: T::zero(),
        }
    }
}

/// Linearized model of a bright two-mode beam: independent quadrature noise
/// ellipses on H and V riding on a large coherent amplitude, the mean Stokes
/// vector along S_y (relative phase π/2 between the modes).
#[derive(Debug, Clone, Copy)]
pub struct BrightBeamModel<T> {
    pub mean_photons: T,
    pub h: QuadratureEllipse<T>,
    pub v: QuadratureEllipse<T>,
    /// Optical phase between the mode amplitudes; π/2 puts ⟨**S**⟩ on S_y.
    pub relative_phase: T,
}

impl<T: Real> BrightBeamModel<T> {
    pub fn validate(&self) -> Result<()> {
        for (label, e) in [("H", &self.h), ("V", &self.v)] {
            if e.v_min <= T::zero() || e.v_min > e.v_max {
                return Err(Error::InvalidParameter(format!(
                    "mode {label}: need 0 < V_min ≤ V_max"
                )));
            }
            if e.v_min * e.v_max < T::one() - real::<T>(1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "mode {label}: V_min·V_max ≥ 1 violated"
                )));
            }
        }
        if self.mean_photons < T::zero() {
            return Err(Error::InvalidParameter("mean photons must be ≥ 0".into()));
        }
        Ok(())
    }
}

/// Normalized dark-plane variance of S_θ = cosθ·S_x + sinθ·S_z:
/// ½[V_H(θ) + V_V(θ)] in units where the shot noise of S_θ is 1.
///
/// This is the bright-field linearization: Stokes fluctuations reduce to the
/// rotated single-mode quadrature fluctuations.
pub fn dark_plane_variance<T: Real>(model: &BrightBeamModel<T>, theta: T) -> T {
    (model.h.variance_at(theta) + model.v.variance_at(theta)) * real::<T>(0.5)
}

/// Global minimum of the dark-plane variance over θ ∈ [0, π).
///
/// A 720-point coarse scan brackets the minimum, then golden-section search
/// refines it; the objective is a single harmonic in 2θ, so the bracket
/// around the best coarse node contains the global minimum.
pub fn find_dark_plane_minimum<T: Real>(model: &BrightBeamModel<T>) -> (T, T) {
    const COARSE: usize = 720;
    let pi = real::<T>(std::f64::consts::PI);
    let step = pi / real::<T>(COARSE as f64);

    let mut best_idx = 0usize;
    let mut best_val = T::infinity();
    for i in 0..COARSE {
        let theta = step * real::<T>(i as f64);
        let v = dark_plane_variance(model, theta);
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
    }

    // golden-section refinement on the bracketing interval
    let mut a = step * real::<T>(best_idx as f64) - step;
    let mut b = step * real::<T>(best_idx as f64) + step;
    let inv_phi = real::<T>(0.618_033_988_749_894_9);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = dark_plane_variance(model, c);
    let mut fd = dark_plane_variance(model, d);
    for _ in 0..200 {
        if (b - a).abs() < real::<T>(1e-14) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = dark_plane_variance(model, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = dark_plane_variance(model, d);
        }
    }
    let mut theta_star = (a + b) * real::<T>(0.5);
    // fold into [0, π)
    while theta_star < T::zero() {
        theta_star += pi;
    }
    while theta_star >= pi {
        theta_star -= pi;
    }
    (theta_star, dark_plane_variance(model, theta_star))
}
