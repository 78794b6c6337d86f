//! Constructors for the state families used throughout: two-mode number and
//! coherent states, SU(2) coherent states, squeezed vacuum and squeezed
//! thermal states, and single-mode ⊗ vacuum products.
//!
//! Constructors with infinite-support targets report the probability mass
//! lost to truncation via [`TwoModeState::tail_probability`]; downstream
//! reports surface a warning when it exceeds `fock::TAIL_WARN_THRESHOLD`.

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_matrix, pair_index, FockCutoff, Mode, SingleModeState, StateData, TwoModeState,
};
use crate::linalg::CMatrix;
use crate::scalar::{real, Real};
use crate::stokes::su2_block_unitary;
use num_complex::Complex;

/// Minimum extra dimensions when exponentiating the squeeze generator before
/// truncating back to the requested cutoff.
const SQUEEZE_PAD_MIN: usize = 8;

/// Hard cap on the padded dimension.
const SQUEEZE_DIM_CAP: usize = 320;

/// Padded dimension for building Gaussian states: large enough that the
/// population envelope λⁿ, λ = (V_max−1)/(V_max+1), has decayed below
/// amplitude 1e−12 at the boundary, so the exponential of the truncated
/// generator matches the infinite-dimensional operator to ~1e−12 on the kept
/// amplitudes. A fixed pad of 8 leaves boundary bias above 1e−10 already at
/// r = 0.5.
fn padded_dim<T: Real>(r: T, thermal_occupation: T, d: usize) -> usize {
    let v_max = ((r + r).exp() * ((thermal_occupation + thermal_occupation) + T::one()))
        .to_f64()
        .unwrap_or(1.0);
    let lambda = (v_max - 1.0) / (v_max + 1.0);
    let needed = if lambda <= 0.0 {
        0
    } else {
        // amplitude λ^{n/2} < 1e−12  ⇔  n > 2·ln(1e12)/(−ln λ)
        (55.3 / -lambda.ln()).ceil() as usize
    };
    needed.max(d + SQUEEZE_PAD_MIN).min(SQUEEZE_DIM_CAP.max(d + SQUEEZE_PAD_MIN))
}

/// Two-mode number state |n⟩_H |m⟩_V.
pub fn two_mode_number<T: Real>(n: usize, m: usize, cutoff: FockCutoff) -> Result<TwoModeState<T>> {
    let d = cutoff.per_mode_dim();
    if n >= d || m >= d {
        return Err(Error::OutOfRange(format!(
            "|{n}⟩_H|{m}⟩_V exceeds cutoff d={d}"
        )));
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff.two_mode_dim()];
    amps[pair_index(n, m, cutoff)] = Complex::new(T::one(), T::zero());
    TwoModeState::pure(cutoff, amps)
}

/// Two-mode vacuum |0⟩_H |0⟩_V.
pub fn two_mode_vacuum<T: Real>(cutoff: FockCutoff) -> TwoModeState<T> {
    two_mode_number(0, 0, cutoff).expect("vacuum always fits")
}

/// Poisson-amplitude expansion of a single-mode coherent state, unnormalized
/// tail included: c_n = e^{−|α|²/2} αⁿ/√n!.
fn coherent_amplitudes<T: Real>(alpha: Complex<T>, dim: usize) -> Vec<Complex<T>> {
    let mut amps = Vec::with_capacity(dim);
    let half = real::<T>(0.5);
    let c0 = Complex::from_polar((-alpha.norm_sqr() * half).exp(), T::zero());
    let mut c = c0;
    amps.push(c);
    for n in 1..dim {
        c *= alpha.unscale(real::<T>(n as f64).sqrt());
        amps.push(c);
    }
    amps
}

/// Two-mode quadrature coherent state |α⟩_H |β⟩_V, renormalized on the
/// truncated space. The truncated-tail probability is recorded on the state.
pub fn two_mode_coherent<T: Real>(
    alpha: Complex<T>,
    beta: Complex<T>,
    cutoff: FockCutoff,
) -> Result<TwoModeState<T>> {
    let d = cutoff.per_mode_dim();
    let ca = coherent_amplitudes(alpha, d);
    let cb = coherent_amplitudes(beta, d);
    let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff.two_mode_dim()];
    let mut mass = T::zero();
    for (n, &a) in ca.iter().enumerate() {
        for (m, &b) in cb.iter().enumerate() {
            let c = a * b;
            mass += c.norm_sqr();
            amps[pair_index(n, m, cutoff)] = c;
        }
    }
    let tail = (T::one() - mass).max(T::zero());
    let inv = T::one() / mass.sqrt();
    for a in amps.iter_mut() {
        *a = a.scale(inv);
    }
    TwoModeState::pure_with_tail(cutoff, amps, tail)
}

/// Parameters of an SU(2) coherent state |θ,φ⟩ = D(θ,φ)|N, k=0⟩.
///
/// θ is the polar angle the state is displaced to (measured from the
/// |N,k=0⟩ pole) and φ the azimuth; the mean Stokes vector comes out as
/// N·(sinθ cosφ, sinθ sinφ, −cosθ).
#[derive(Debug, Clone, Copy)]
pub struct Su2CoherentSpec<T> {
    pub photons: usize,
    pub theta: T,
    pub phi: T,
}

/// SU(2) coherent state: the N-photon block displaced from |N,k=0⟩.
///
/// These are the unique states saturating the Stokes uncertainty bound
/// (Δ**S**)² = 2⟨S₀⟩, and the only fully second-order-polarized ones.
pub fn su2_coherent<T: Real>(
    spec: Su2CoherentSpec<T>,
    cutoff: FockCutoff,
) -> Result<TwoModeState<T>> {
    let n = spec.photons;
    if n > cutoff.max_complete_block() {
        return Err(Error::OutOfRange(format!(
            "SU(2) coherent state with N={n} exceeds cutoff d={}",
            cutoff.per_mode_dim()
        )));
    }
    let u = su2_block_unitary(n, spec.theta, spec.phi);
    let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff.two_mode_dim()];
    for k in 0..=n {
        amps[pair_index(k, n - k, cutoff)] = u[(k, 0)];
    }
    TwoModeState::pure(cutoff, amps)
}

/// Squeeze operator S(r, φ) = exp[(r/2)(e^{−2iφ}a² − e^{2iφ}a†²)] on a
/// `dim`-dimensional space. For φ = 0 this squeezes the x-quadrature:
/// S†(a)S = a·cosh r − a†·sinh r.
fn squeeze_operator<T: Real>(r: T, axis_phase: T, dim: usize) -> CMatrix<T> {
    let cutoff = FockCutoff::new(dim).expect("padded dim ≥ 1");
    let a = annihilation_matrix::<T>(cutoff).into_matrix();
    let a2 = a.mul(&a);
    let adag2 = a2.dagger();
    let half_r = r * real::<T>(0.5);
    let two_phi = axis_phase + axis_phase;
    let gen = a2
        .scale(Complex::from_polar(half_r, -two_phi))
        .sub(&adag2.scale(Complex::from_polar(half_r, two_phi)));
    gen.expm()
}

/// Single-mode squeezed vacuum S(r, φ)|0⟩ on a d-dimensional space.
///
/// Built by exponentiating the squeeze generator on a padded space and
/// truncating; only even photon numbers are populated and the quadrature
/// variances are e^{∓2r} in shot-noise units (vacuum = 1).
pub fn single_mode_squeezed_vacuum<T: Real>(
    r: T,
    axis_phase: T,
    cutoff: FockCutoff,
) -> Result<SingleModeState<T>> {
    if r < T::zero() {
        return Err(Error::InvalidParameter("squeezing r must be ≥ 0".into()));
    }
    let d = cutoff.per_mode_dim();
    let padded = padded_dim(r, T::zero(), d);
    let s = squeeze_operator(r, axis_phase, padded);
    let mut vac = vec![Complex::new(T::zero(), T::zero()); padded];
    vac[0] = Complex::new(T::one(), T::zero());
    let full = s.matvec(&vac);
    let mut amps: Vec<Complex<T>> = full[..d].to_vec();
    let mass: T = amps.iter().map(|c| c.norm_sqr()).sum();
    let tail = (T::one() - mass).max(T::zero());
    let inv = T::one() / mass.sqrt();
    for a in amps.iter_mut() {
        *a = a.scale(inv);
    }
    SingleModeState::pure_with_tail(amps, tail)
}

/// Closed-form squeezed-vacuum amplitudes
/// c_{2n} = (−tanh r)ⁿ √((2n)!) / (2ⁿ n! √cosh r), odd amplitudes zero.
///
/// Test oracle for the matrix-exponential construction.
pub fn squeezed_vacuum_amplitude_closed_form<T: Real>(r: T, n: usize) -> T {
    if n % 2 == 1 {
        return T::zero();
    }
    let half_n = n / 2;
    let mut c = T::one() / r.cosh().sqrt();
    let t = -r.tanh();
    // accumulate (−tanh r)^m √((2m)!)/(2^m m!) incrementally
    for m in 1..=half_n {
        let m2 = real::<T>((2 * m) as f64);
        let ratio = (m2 * (m2 - T::one())).sqrt() / (real::<T>(2.0) * real::<T>(m as f64));
        c = c * t * ratio;
    }
    c
}

/// Squeezed thermal state spec: S(r, φ)·ρ_th(n_th)·S†(r, φ).
///
/// Quadrature variances in shot-noise units are V_min = e^{−2r}(2n_th+1) and
/// V_max = e^{2r}(2n_th+1), so V_min·V_max = (2n_th+1)².
#[derive(Debug, Clone, Copy)]
pub struct SqueezedThermalSpec<T> {
    pub squeezing: T,
    pub thermal_occupation: T,
    pub axis_phase: T,
}

impl<T: Real> SqueezedThermalSpec<T> {
    pub fn new(squeezing: T, thermal_occupation: T, axis_phase: T) -> Result<Self> {
        if squeezing < T::zero() {
            return Err(Error::InvalidParameter("squeezing r must be ≥ 0".into()));
        }
        if thermal_occupation < T::zero() {
            return Err(Error::InvalidParameter(
                "thermal occupation must be ≥ 0".into(),
            ));
        }
        Ok(Self {
            squeezing,
            thermal_occupation,
            axis_phase,
        })
    }

    /// Build from measured noise powers in dB relative to shot noise
    /// (V = 10^{dB/10}, vacuum = 1): e.g. −3.8 dB squeezing, 8.6 dB
    /// antisqueezing.
    pub fn from_db(squeezing_db: T, antisqueezing_db: T, axis_phase: T) -> Result<Self> {
        let ten = real::<T>(10.0);
        let v_min = ten.powf(squeezing_db / ten);
        let v_max = ten.powf(antisqueezing_db / ten);
        if v_min > v_max {
            return Err(Error::InvalidParameter(
                "squeezing dB must not exceed antisqueezing dB".into(),
            ));
        }
        let purity_factor = (v_min * v_max).sqrt(); // 2n_th + 1
        if purity_factor < T::one() - real::<T>(1e-12) {
            return Err(Error::InvalidParameter(
                "V_min·V_max < 1 violates the uncertainty relation".into(),
            ));
        }
        let n_th = ((purity_factor - T::one()) * real::<T>(0.5)).max(T::zero());
        let r = (v_max / v_min).ln() * real::<T>(0.25);
        Self::new(r, n_th, axis_phase)
    }

    /// (V_min, V_max) in shot-noise units.
    pub fn quadrature_variances(&self) -> (T, T) {
        let width = (self.thermal_occupation + self.thermal_occupation) + T::one();
        let two_r = self.squeezing + self.squeezing;
        (width * (-two_r).exp(), width * two_r.exp())
    }

    /// Mean photon number, (V_min + V_max − 2)/4.
    pub fn mean_photons(&self) -> T {
        let (v_min, v_max) = self.quadrature_variances();
        (v_min + v_max - real::<T>(2.0)) * real::<T>(0.25)
    }

    /// Photon-number variance of the zero-mean Gaussian state,
    /// (V_min² + V_max² − 2)/8.
    pub fn photon_variance(&self) -> T {
        let (v_min, v_max) = self.quadrature_variances();
        (v_min * v_min + v_max * v_max - real::<T>(2.0)) * real::<T>(0.125)
    }
}

/// Squeezed thermal state on the truncated space (mixed).
pub fn squeezed_thermal<T: Real>(
    spec: SqueezedThermalSpec<T>,
    cutoff: FockCutoff,
) -> Result<SingleModeState<T>> {
    let d = cutoff.per_mode_dim();
    let padded = padded_dim(spec.squeezing, spec.thermal_occupation, d);
    let s = squeeze_operator(spec.squeezing, spec.axis_phase, padded);

    // thermal weights with their exact infinite-support values, so the final
    // trace deficit accounts for both the thermal and the squeeze truncation
    let n_th = spec.thermal_occupation;
    let mut thermal = CMatrix::zeros(padded);
    let ratio = n_th / (n_th + T::one());
    let mut w = T::one() / (n_th + T::one());
    for n in 0..padded {
        thermal[(n, n)] = Complex::new(w, T::zero());
        w *= ratio;
    }

    let rho_padded = s.mul(&thermal).mul(&s.dagger());
    let mut rho = CMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            rho[(i, j)] = rho_padded[(i, j)];
        }
    }
    let trace = rho.trace().re;
    let tail = (T::one() - trace).max(T::zero());
    let rho = rho.scale_re(T::one() / trace).hermitize();
    SingleModeState::mixed_with_tail(rho, tail)
}

/// Product state: the given single-mode state on `mode`, vacuum on the other.
pub fn tensor_with_vacuum<T: Real>(
    state: &SingleModeState<T>,
    mode: Mode,
    cutoff: FockCutoff,
) -> Result<TwoModeState<T>> {
    let d = cutoff.per_mode_dim();
    if state.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "tensor_with_vacuum single-mode state",
            expected: d,
            got: state.dim(),
        });
    }
    match state.data() {
        StateData::Pure(v) => {
            let mut amps = vec![Complex::new(T::zero(), T::zero()); cutoff.two_mode_dim()];
            for (n, &c) in v.iter().enumerate() {
                let idx = match mode {
                    Mode::H => pair_index(n, 0, cutoff),
                    Mode::V => pair_index(0, n, cutoff),
                };
                amps[idx] = c;
            }
            TwoModeState::pure_with_tail(cutoff, amps, state.tail_probability())
        }
        StateData::Mixed(rho) => {
            let vac = SingleModeState::<T>::vacuum(d).density_matrix();
            let full = match mode {
                Mode::H => rho.kron(&vac),
                Mode::V => vac.kron(rho),
            };
            TwoModeState::mixed_with_tail(cutoff, full, state.tail_probability())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::quadrature_matrix;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cutoff(d: usize) -> FockCutoff {
        FockCutoff::new(d).unwrap()
    }

    #[test]
    fn number_state_exceeding_cutoff_rejected() {
        assert!(two_mode_number::<f64>(3, 0, cutoff(3)).is_err());
        assert!(two_mode_number::<f64>(2, 2, cutoff(3)).is_ok());
    }

    #[test]
    fn coherent_zero_amplitudes_is_vacuum() {
        let s = two_mode_coherent(c(0.0, 0.0), c(0.0, 0.0), cutoff(4)).unwrap();
        assert!((s.population(0) - 1.0).abs() < 1e-15);
        assert_eq!(s.tail_probability(), 0.0);
    }

    #[test]
    fn coherent_total_photon_number_matches_poisson_oracle() {
        // ⟨n_H + n_V⟩ for |α|²=2, |β|²=1 → 3, brute-force sum over the
        // closed-form Poisson weights as the independent oracle
        let d = cutoff(25);
        let alpha = c(2f64.sqrt(), 0.0);
        let beta = c(0.0, 1.0);
        let state = two_mode_coherent(alpha, beta, d).unwrap();

        let mut oracle = 0.0;
        for n in 0..d.per_mode_dim() {
            for m in 0..d.per_mode_dim() {
                let ln_pn = -2.0 + (n as f64) * 2f64.ln() - ln_factorial(n);
                let ln_pm = -1.0 + (m as f64) * 1f64.ln() - ln_factorial(m);
                oracle += ((n + m) as f64) * (ln_pn + ln_pm).exp();
            }
        }
        let num_h = crate::fock::number_matrix::<f64>(d);
        let nh = crate::fock::embed_on_mode(num_h.matrix(), Mode::H, d).unwrap();
        let nv = crate::fock::embed_on_mode(num_h.matrix(), Mode::V, d).unwrap();
        let total = state.expectation(&nh.add(&nv)).unwrap().re;
        assert!((total - oracle).abs() < 1e-9, "{total} vs oracle {oracle}");
        assert!((total - 3.0).abs() < 1e-6);
        assert!(state.tail_probability() < 1e-8);
    }

    fn ln_factorial(n: usize) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn coherent_sector_weights_are_poissonian() {
        // |α|²=1 on H, vacuum on V: weights p_N = e^{−1}/N!
        let d = cutoff(18);
        let state = two_mode_coherent(c(1.0, 0.0), c(0.0, 0.0), d).unwrap();
        let sector = crate::fock::project_polarization_sector(&state);
        for n in 0..6 {
            let expected = (-1f64).exp() / (1..=n).map(|k| k as f64).product::<f64>().max(1.0);
            let got = sector.blocks()[n].weight;
            assert!(
                (got - expected).abs() < 1e-10,
                "p_{n}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn su2_identity_displacement() {
        let spec = Su2CoherentSpec {
            photons: 1,
            theta: 0.0,
            phi: 0.0,
        };
        let s = su2_coherent::<f64>(spec, cutoff(3)).unwrap();
        // |N=1, k=0⟩ = |0⟩_H |1⟩_V
        assert!((s.population(pair_index(0, 1, cutoff(3))) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn su2_equatorial_amplitudes_match_wigner_oracle() {
        // N=2, θ=π/2, φ=0: |d^1_{m,−1}(π/2)| = (1/2, 1/√2, 1/2) over k=0,1,2
        let spec = Su2CoherentSpec {
            photons: 2,
            theta: PI / 2.0,
            phi: 0.0,
        };
        let s = su2_coherent::<f64>(spec, cutoff(3)).unwrap();
        let expected = [0.5, 1.0 / 2f64.sqrt(), 0.5];
        for (k, &e) in expected.iter().enumerate() {
            let p = s.population(pair_index(k, 2 - k, cutoff(3)));
            assert!((p.sqrt() - e).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn su2_confined_to_single_block() {
        let spec = Su2CoherentSpec {
            photons: 4,
            theta: 1.1,
            phi: 2.3,
        };
        let s = su2_coherent::<f64>(spec, cutoff(8)).unwrap();
        let sector = crate::fock::project_polarization_sector(&s);
        for block in sector.blocks() {
            if block.total_photons == 4 {
                assert!((block.weight - 1.0).abs() < 1e-12);
            } else {
                assert!(block.weight < 1e-14);
            }
        }
    }

    #[test]
    fn squeezed_vacuum_r_zero_is_vacuum() {
        let s = single_mode_squeezed_vacuum::<f64>(0.0, 0.0, cutoff(8)).unwrap();
        assert!((s.population(0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_photon_number() {
        // ⟨n⟩ = sinh²(0.5) ≈ 0.2715403
        let s = single_mode_squeezed_vacuum::<f64>(0.5, 0.0, cutoff(40)).unwrap();
        let (mean, _) = s.photon_statistics();
        let expected = 0.5f64.sinh().powi(2);
        assert!((mean - expected).abs() < 1e-10, "{mean} vs {expected}");
    }

    #[test]
    fn squeezed_vacuum_odd_amplitudes_vanish() {
        let s = single_mode_squeezed_vacuum::<f64>(0.8, 0.4, cutoff(24)).unwrap();
        for n in (1..24).step_by(2) {
            assert!(s.population(n) < 1e-24, "odd n={n}");
        }
    }

    #[test]
    fn squeezed_vacuum_matches_closed_form() {
        let r = 0.5;
        let s = single_mode_squeezed_vacuum::<f64>(r, 0.0, cutoff(30)).unwrap();
        let StateData::Pure(amps) = s.data() else {
            panic!("squeezed vacuum is pure");
        };
        for n in 0..30 {
            let expected = squeezed_vacuum_amplitude_closed_form(r, n);
            let got = amps[n].re;
            assert!(
                (got - expected).abs() < 1e-10,
                "n={n}: {got} vs {expected}"
            );
            assert!(amps[n].im.abs() < 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_quadrature_variances() {
        let r = 0.6;
        let d = cutoff(36);
        let s = single_mode_squeezed_vacuum::<f64>(r, 0.0, d).unwrap();
        let x = quadrature_matrix(d, 0.0);
        let p = quadrature_matrix(d, PI / 2.0);
        let vx = 2.0 * s.expectation(&x.mul(&x)).unwrap().re; // shot-noise units
        let vp = 2.0 * s.expectation(&p.mul(&p)).unwrap().re;
        assert!((vx - (-2.0 * r).exp()).abs() < 1e-8, "vx={vx}");
        assert!((vp - (2.0 * r).exp()).abs() < 1e-6, "vp={vp}");
    }

    #[test]
    fn squeezed_thermal_trivial_spec_is_vacuum() {
        let spec = SqueezedThermalSpec::<f64>::new(0.0, 0.0, 0.0).unwrap();
        let s = squeezed_thermal::<f64>(spec, cutoff(10)).unwrap();
        assert!((s.population(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeezed_thermal_from_db_reproduces_variances() {
        // −3.8 dB / 8.6 dB: the quadrature variances computed through the
        // quadrature operator matrices must match V_min, V_max
        let spec = SqueezedThermalSpec::<f64>::from_db(-3.8, 8.6, 0.0).unwrap();
        let (v_min, v_max) = spec.quadrature_variances();
        assert!((v_min - 10f64.powf(-0.38)).abs() < 1e-12);
        assert!((v_max - 10f64.powf(0.86)).abs() < 1e-12);

        // d = 80 pushes the truncated tail of the state itself below ~1e−6
        let d = cutoff(80);
        let s = squeezed_thermal(spec, d).unwrap();
        let x = quadrature_matrix(d, 0.0);
        let p = quadrature_matrix(d, PI / 2.0);
        let vx = 2.0 * s.expectation(&x.mul(&x)).unwrap().re;
        let vp = 2.0 * s.expectation(&p.mul(&p)).unwrap().re;
        assert!((vx - v_min).abs() < 1e-8, "vx={vx} vs {v_min}");
        assert!((vp - v_max).abs() < 1e-5, "vp={vp} vs {v_max}");
    }

    #[test]
    fn squeezed_thermal_photon_statistics_match_gaussian_identities() {
        // brute-force tr(ρn), tr(ρn²) against the Gaussian-moment identities
        // ⟨n⟩ = (V_min+V_max−2)/4 and (Δn)² = (V_min²+V_max²−2)/8
        let spec = SqueezedThermalSpec::<f64>::from_db(-3.8, 8.6, 0.0).unwrap();
        let s = squeezed_thermal(spec, cutoff(80)).unwrap();
        let (mean, var) = s.photon_statistics();
        assert!(
            (mean - spec.mean_photons()).abs() < 1e-6,
            "⟨n⟩ {mean} vs {}",
            spec.mean_photons()
        );
        assert!(
            (var - spec.photon_variance()).abs() < 1e-4,
            "(Δn)² {var} vs {}",
            spec.photon_variance()
        );
        // the −3.8/8.6 dB state sits near N̄ ≈ 1.415
        assert!((mean - 1.415307).abs() < 1e-3);
    }

    #[test]
    fn from_db_rejects_unphysical_pairs() {
        assert!(SqueezedThermalSpec::<f64>::from_db(-3.0, 1.0, 0.0).is_err());
        assert!(SqueezedThermalSpec::<f64>::from_db(-3.0, 3.0, 0.0).is_ok());
    }

    #[test]
    fn tensor_with_vacuum_products() {
        let d = cutoff(6);
        let vac = SingleModeState::<f64>::vacuum(6);
        let two = tensor_with_vacuum(&vac, Mode::H, d).unwrap();
        assert!((two.population(0) - 1.0).abs() < 1e-14);

        let sq = single_mode_squeezed_vacuum::<f64>(0.3, 0.0, d).unwrap();
        let two_h = tensor_with_vacuum(&sq, Mode::H, d).unwrap();
        // population pattern lives on (n, 0) indices only
        for n_v in 1..6 {
            assert!(two_h.population(pair_index(0, n_v, d)) < 1e-20);
        }

        let wrong = SingleModeState::<f64>::vacuum(5);
        assert!(tensor_with_vacuum(&wrong, Mode::H, d).is_err());
    }
}
