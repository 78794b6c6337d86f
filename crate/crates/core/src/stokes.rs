//! Stokes operator matrices, first and second moments, the covariance matrix,
//! projected variances, SU(2) transformations, and exact outcome
//! distributions of projected Stokes measurements.
//!
//! The operators are
//!   S_x = a_H a†_V + a†_H a_V,
//!   S_y = i(a_H a†_V − a†_H a_V),
//!   S_z = a†_H a_H − a†_V a_V,
//!   S₀ = a†_H a_H + a†_V a_V,
//! block diagonal in the total photon number with [S_x, S_y] = 2i S_z on
//! complete blocks.

use crate::fock::{
    annihilation_matrix, block_k_range, index_pair, pair_index, FockCutoff, PolarizationSector,
    StateData, TwoModeState,
};
use crate::linalg::{vec_dot, CMatrix};
use crate::scalar::{real, tolerance, Real};
use crate::sym3::{quadratic_form, Mat3, Vec3};
use num_complex::Complex;
use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// The four Stokes operator matrices on the two-mode space of a cutoff.
#[derive(Debug, Clone)]
pub struct StokesOperators<T> {
    pub s0: CMatrix<T>,
    pub sx: CMatrix<T>,
    pub sy: CMatrix<T>,
    pub sz: CMatrix<T>,
    cutoff: FockCutoff,
}

impl<T: Real> StokesOperators<T> {
    fn build(cutoff: FockCutoff) -> Self {
        let a = annihilation_matrix::<T>(cutoff).into_matrix();
        let adag = a.dagger();
        let eye = CMatrix::identity(cutoff.per_mode_dim());
        // a_H a†_V = a ⊗ a†, a†_H a_V = a† ⊗ a  (row-major H-major index map)
        let a_h_adag_v = a.kron(&adag);
        let adag_h_a_v = adag.kron(&a);
        let sx = a_h_adag_v.add(&adag_h_a_v);
        let i = Complex::new(T::zero(), T::one());
        let sy = a_h_adag_v.sub(&adag_h_a_v).scale(i);
        // exact integer diagonals for the number operators
        let n = crate::fock::number_matrix::<T>(cutoff).into_matrix();
        let n_h = n.kron(&eye);
        let n_v = eye.kron(&n);
        let sz = n_h.sub(&n_v);
        let s0 = n_h.add(&n_v);
        Self {
            s0,
            sx,
            sy,
            sz,
            cutoff,
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    /// The vector components in x, y, z order.
    pub fn vector(&self) -> [&CMatrix<T>; 3] {
        [&self.sx, &self.sy, &self.sz]
    }
}

type CacheMap = HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>;

static STOKES_CACHE: OnceLock<Mutex<CacheMap>> = OnceLock::new();

/// Stokes matrices for a cutoff, cached per (scalar type, cutoff) since sphere
/// scans and moment computations reuse them heavily. The cache is filled under
/// a single-writer lock and entries are immutable afterwards.
pub fn stokes_matrices<T: Real>(cutoff: FockCutoff) -> Arc<StokesOperators<T>> {
    let cache = STOKES_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (TypeId::of::<T>(), cutoff.per_mode_dim());
    let mut guard = cache.lock().expect("stokes cache lock");
    if let Some(hit) = guard.get(&key) {
        return hit
            .clone()
            .downcast::<StokesOperators<T>>()
            .expect("stokes cache entry type");
    }
    let built: Arc<StokesOperators<T>> = Arc::new(StokesOperators::build(cutoff));
    guard.insert(key, built.clone());
    built
}

/// A unit vector on the Poincaré sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T>(Vec3<T>);

impl<T: Real> Direction<T> {
    /// Validates |n| = 1 within 1e−12; out-of-tolerance inputs are rejected.
    pub fn new(v: Vec3<T>) -> crate::Result<Self> {
        let norm = crate::sym3::norm(&v);
        if (norm - T::one()).abs() > tolerance::<T>(1e-12) {
            return Err(crate::Error::InvalidParameter(format!(
                "direction must be a unit vector, |n| = {}",
                norm.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self(v))
    }

    /// Unit vector at spherical angles (θ from +z, azimuth φ).
    pub fn from_angles(theta: T, phi: T) -> Self {
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        Self([st * cp, st * sp, ct])
    }

    pub fn vector(&self) -> &Vec3<T> {
        &self.0
    }

    pub fn theta(&self) -> T {
        self.0[2].min(T::one()).max(-T::one()).acos()
    }

    pub fn phi(&self) -> T {
        self.0[1].atan2(self.0[0])
    }
}

/// First and second Stokes moments of a state.
#[derive(Debug, Clone, Copy)]
pub struct StokesMomentSet<T> {
    /// ⟨S₀⟩, the mean photon number.
    pub s0_mean: T,
    /// Mean Stokes vector (⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩).
    pub mean_vector: Vec3<T>,
    /// Symmetrized covariance Γ_kℓ = ½⟨{S_k,S_ℓ}⟩ − ⟨S_k⟩⟨S_ℓ⟩.
    pub covariance: Mat3<T>,
    /// ⟨**S**²⟩ = ⟨S₀(S₀+2)⟩.
    pub s_squared_mean: T,
    /// (Δ**S**)² = tr Γ.
    pub total_variance: T,
    /// Truncation tail of the underlying state, carried into reports.
    pub tail_probability: T,
}

impl<T: Real> StokesMomentSet<T> {
    pub fn mean_norm(&self) -> T {
        crate::sym3::norm(&self.mean_vector)
    }

    pub fn tail_warning(&self) -> bool {
        self.tail_probability > tolerance::<T>(crate::fock::TAIL_WARN_THRESHOLD)
    }

    /// (Δ**S**)² − 2⟨S₀⟩, nonnegative (up to rounding) by the uncertainty
    /// relation, zero exactly for SU(2) coherent states.
    pub fn uncertainty_excess(&self) -> T {
        self.total_variance - (self.s0_mean + self.s0_mean)
    }

    /// |⟨**S**²⟩ − (tr Γ + |⟨**S**⟩|²)|: the two algebraic routes to the total
    /// second moment must agree for states supported on complete blocks.
    pub fn s_squared_identity_deviation(&self) -> T {
        let mu2 = quadratic_form(
            &[
                [T::one(), T::zero(), T::zero()],
                [T::zero(), T::one(), T::zero()],
                [T::zero(), T::zero(), T::one()],
            ],
            &self.mean_vector,
        );
        (self.s_squared_mean - (self.total_variance + mu2)).abs()
    }
}

fn symmetrize3<T: Real>(m: &mut Mat3<T>) {
    let half = real::<T>(0.5);
    for i in 0..3 {
        for j in (i + 1)..3 {
            let s = (m[i][j] + m[j][i]) * half;
            m[i][j] = s;
            m[j][i] = s;
        }
    }
}

/// All first and second Stokes moments of a two-mode state.
pub fn stokes_moments<T: Real>(state: &TwoModeState<T>) -> StokesMomentSet<T> {
    let ops = stokes_matrices::<T>(state.cutoff());
    let vec_ops = ops.vector();

    let mut mean = [T::zero(); 3];
    let mut second = [[T::zero(); 3]; 3];
    let mut s0_mean = T::zero();
    let mut s_squared = T::zero();

    match state.data() {
        StateData::Pure(v) => {
            let images: Vec<Vec<Complex<T>>> = vec_ops.iter().map(|op| op.matvec(v)).collect();
            for k in 0..3 {
                mean[k] = vec_dot(v, &images[k]).re;
            }
            for k in 0..3 {
                for l in 0..3 {
                    // ⟨S_k S_ℓ⟩ = ⟨S_k ψ | S_ℓ ψ⟩ for Hermitian operators
                    second[k][l] = vec_dot(&images[k], &images[l]).re;
                }
            }
            for (idx, amp) in v.iter().enumerate() {
                let p = amp.norm_sqr();
                if p == T::zero() {
                    continue;
                }
                let n0 = ops.s0[(idx, idx)].re;
                s0_mean += p * n0;
                s_squared += p * n0 * (n0 + real::<T>(2.0));
            }
        }
        StateData::Mixed(rho) => {
            for (k, op) in vec_ops.iter().enumerate() {
                mean[k] = op.trace_product(rho).re;
            }
            for (l, op_l) in vec_ops.iter().enumerate() {
                let image = op_l.mul(rho); // S_ℓ ρ
                for (k, op_k) in vec_ops.iter().enumerate() {
                    second[k][l] = op_k.trace_product(&image).re; // tr(S_k S_ℓ ρ)
                }
            }
            for idx in 0..rho.dim() {
                let p = rho[(idx, idx)].re;
                let n0 = ops.s0[(idx, idx)].re;
                s0_mean += p * n0;
                s_squared += p * n0 * (n0 + real::<T>(2.0));
            }
        }
    }

    let mut covariance = [[T::zero(); 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            covariance[k][l] = second[k][l] - mean[k] * mean[l];
        }
    }
    symmetrize3(&mut covariance);
    let total_variance = covariance[0][0] + covariance[1][1] + covariance[2][2];

    StokesMomentSet {
        s0_mean,
        mean_vector: mean,
        covariance,
        s_squared_mean: s_squared,
        total_variance,
        tail_probability: state.tail_probability(),
    }
}

/// Stokes moments computed blockwise from a polarization sector. Agrees with
/// [`stokes_moments`] of the full state to rounding, since the operators are
/// block diagonal.
pub fn moments_from_sector<T: Real>(sector: &PolarizationSector<T>) -> StokesMomentSet<T> {
    let mut mean = [T::zero(); 3];
    let mut second = [[T::zero(); 3]; 3];
    let mut s0_mean = T::zero();
    let mut s_squared = T::zero();

    for block in sector.blocks() {
        if block.weight <= T::zero() {
            continue;
        }
        let n = block.total_photons;
        let ks: Vec<usize> = block_k_range(n, sector.cutoff()).collect();
        let len = ks.len();
        // J₊ within the representable k range; amplitudes as products of
        // square roots, matching the full-space kron construction bit for bit
        let mut jp = CMatrix::<T>::zeros(len);
        for (i, &k) in ks.iter().enumerate().take(len.saturating_sub(1)) {
            let amp = real::<T>((k + 1) as f64).sqrt() * real::<T>((n - k) as f64).sqrt();
            jp[(i + 1, i)] = Complex::new(amp, T::zero());
        }
        let jm = jp.dagger();
        let sx = jp.add(&jm);
        let sy = jp.sub(&jm).scale(Complex::new(T::zero(), -T::one()));
        let mut sz = CMatrix::<T>::zeros(len);
        for (i, &k) in ks.iter().enumerate() {
            sz[(i, i)] = Complex::new(real::<T>(2.0 * k as f64 - n as f64), T::zero());
        }
        let block_ops = [&sx, &sy, &sz];

        let w = block.weight;
        for (k, op) in block_ops.iter().enumerate() {
            mean[k] += w * op.trace_product(&block.matrix).re;
        }
        for (l, op_l) in block_ops.iter().enumerate() {
            let image = op_l.mul(&block.matrix);
            for (k, op_k) in block_ops.iter().enumerate() {
                second[k][l] += w * op_k.trace_product(&image).re;
            }
        }
        let n_val = real::<T>(n as f64);
        s0_mean += w * n_val;
        s_squared += w * n_val * (n_val + real::<T>(2.0));
    }

    let mut covariance = [[T::zero(); 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            covariance[k][l] = second[k][l] - mean[k] * mean[l];
        }
    }
    symmetrize3(&mut covariance);
    let total_variance = covariance[0][0] + covariance[1][1] + covariance[2][2];

    StokesMomentSet {
        s0_mean,
        mean_vector: mean,
        covariance,
        s_squared_mean: s_squared,
        total_variance,
        tail_probability: sector.tail_probability(),
    }
}

/// Projected Stokes variance (ΔS_n)² = nᵗ Γ n, clamped at zero against
/// rounding (negative values can only come from rounding since Γ is PSD).
pub fn projected_variance<T: Real>(moments: &StokesMomentSet<T>, n: &Direction<T>) -> T {
    quadratic_form(&moments.covariance, n.vector()).max(T::zero())
}

/// Unitary block of the sphere displacement D(θ,φ) on the N-photon subspace:
/// exp[(θ/2)(e^{−iφ}J₊ − e^{iφ}J₋)] with J₊ = a†_H a_V restricted to the
/// block, in the |N,k⟩ basis. θ is the polar displacement angle: the mean
/// Stokes vector of D(θ,φ)|N,0⟩ is N·(sinθ cosφ, sinθ sinφ, −cosθ).
pub fn su2_block_unitary<T: Real>(total: usize, theta: T, phi: T) -> CMatrix<T> {
    let dim = total + 1;
    let mut gen = CMatrix::<T>::zeros(dim);
    let half_theta = theta * real::<T>(0.5);
    for k in 0..total {
        let amp = (real::<T>((k + 1) as f64) * real::<T>((total - k) as f64)).sqrt();
        gen[(k + 1, k)] = Complex::from_polar(half_theta * amp, -phi);
        gen[(k, k + 1)] = -Complex::from_polar(half_theta * amp, phi);
    }
    gen.expm()
}

/// Apply the SU(2) polarization transformation D(θ,φ) blockwise.
///
/// Complete blocks (N ≤ d−1) transform unitarily; any residual amplitude in
/// incomplete blocks — part of the reported truncation tail — is left
/// untouched. Photon-number distribution and ⟨S₀⟩ are preserved exactly.
pub fn apply_su2<T: Real>(state: &TwoModeState<T>, theta: T, phi: T) -> TwoModeState<T> {
    let cutoff = state.cutoff();
    match state.data() {
        StateData::Pure(v) => {
            let mut out = v.clone();
            for total in 0..=cutoff.max_complete_block() {
                let u = su2_block_unitary::<T>(total, theta, phi);
                let idx: Vec<usize> = (0..=total)
                    .map(|k| pair_index(k, total - k, cutoff))
                    .collect();
                let block: Vec<Complex<T>> = idx.iter().map(|&i| v[i]).collect();
                let rotated = u.matvec(&block);
                for (slot, val) in idx.iter().zip(rotated) {
                    out[*slot] = val;
                }
            }
            TwoModeState::from_valid_parts(cutoff, StateData::Pure(out), state.tail_probability())
        }
        StateData::Mixed(rho) => {
            let n = cutoff.two_mode_dim();
            let mut u = CMatrix::<T>::identity(n);
            for total in 0..=cutoff.max_complete_block() {
                let ub = su2_block_unitary::<T>(total, theta, phi);
                let idx: Vec<usize> = (0..=total)
                    .map(|k| pair_index(k, total - k, cutoff))
                    .collect();
                for (bi, &row) in idx.iter().enumerate() {
                    for (bj, &col) in idx.iter().enumerate() {
                        u[(row, col)] = ub[(bi, bj)];
                    }
                }
            }
            // UρU† = (U (Uρ)†)†, using the structured-zero skip of U twice
            let b = u.mul(rho);
            let rotated = u.mul(&b.dagger()).dagger().hermitize();
            TwoModeState::from_valid_parts(
                cutoff,
                StateData::Mixed(rotated),
                state.tail_probability(),
            )
        }
    }
}

/// Exact outcome distribution of the projected Stokes observable S_n.
///
/// Outcomes within the N-photon block are {N−2k : k = 0..N}; the state is
/// rotated so that n maps onto the z axis and the S_z populations are read
/// off the diagonal.
#[derive(Debug, Clone)]
pub struct StokesPmf<T> {
    /// Sorted (outcome, probability) pairs with nonzero probability.
    pub outcomes: Vec<(i64, T)>,
}

impl<T: Real> StokesPmf<T> {
    pub fn mean(&self) -> T {
        self.outcomes
            .iter()
            .map(|&(m, p)| real::<T>(m as f64) * p)
            .fold(T::zero(), T::add)
    }

    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.outcomes
            .iter()
            .map(|&(m, p)| {
                let d = real::<T>(m as f64) - mean;
                d * d * p
            })
            .fold(T::zero(), T::add)
    }

    pub fn total(&self) -> T {
        self.outcomes.iter().map(|&(_, p)| p).fold(T::zero(), T::add)
    }
}

/// Distribution of S_n outcomes for a state.
pub fn stokes_distribution<T: Real>(state: &TwoModeState<T>, n: &Direction<T>) -> StokesPmf<T> {
    // D(θ_n, φ_n)† S_z D(θ_n, φ_n) = n·S, so rotating the state by D(θ_n, φ_n)
    // maps the S_n statistics onto S_z.
    let rotated = apply_su2(state, n.theta(), n.phi());
    let cutoff = state.cutoff();
    let mut acc: HashMap<i64, T> = HashMap::new();
    for idx in 0..cutoff.two_mode_dim() {
        let p = rotated.population(idx);
        if p <= T::zero() {
            continue;
        }
        let (n_h, n_v) = index_pair(idx, cutoff);
        let outcome = n_h as i64 - n_v as i64;
        *acc.entry(outcome).or_insert_with(T::zero) += p;
    }
    let mut outcomes: Vec<(i64, T)> = acc.into_iter().collect();
    outcomes.sort_by_key(|&(m, _)| m);
    StokesPmf { outcomes }
}

/// Diagonal projector onto the complete blocks N ≤ d−1 (test support for
/// block-exactness claims).
pub fn complete_block_projector<T: Real>(cutoff: FockCutoff) -> CMatrix<T> {
    let n = cutoff.two_mode_dim();
    let mut p = CMatrix::zeros(n);
    for idx in 0..n {
        let (n_h, n_v) = index_pair(idx, cutoff);
        if n_h + n_v <= cutoff.max_complete_block() {
            p[(idx, idx)] = Complex::new(T::one(), T::zero());
        }
    }
    p
}
