//! Truncated two-mode Fock space: states, mode operators, expectation values
//! and the total-photon-number block decomposition.
//!
//! Basis conventions, fixed once and tested:
//! - per-mode photon numbers run 0..d−1 for a cutoff of dimension d;
//! - the two-mode flat index is row-major with n_H major, `(n_H, n_V) ↦ n_H·d + n_V`;
//! - the block relabeling is `|N,k⟩ = |k⟩_H |N−k⟩_V`, so blocks with
//!   N ≤ d−1 are complete while larger N are only partially representable.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, outer, vec_norm, CMatrix};
use crate::scalar::{real, tolerance, Real};
use num_complex::Complex;

/// Unit-norm tolerance for pure states.
pub const PURE_NORM_TOL: f64 = 1e-12;
/// Entry-wise hermiticity tolerance for density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace-one tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Density-matrix eigenvalues must be ≥ −PSD_TOL.
pub const PSD_TOL: f64 = 1e-10;
/// Sector weights must sum to the state trace within this tolerance.
pub const SECTOR_WEIGHT_TOL: f64 = 1e-10;
/// Truncated-tail probability above which downstream results carry a warning.
pub const TAIL_WARN_THRESHOLD: f64 = 1e-6;

/// Truncation of each mode to photon numbers 0..d−1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockCutoff {
    per_mode_dim: usize,
}

impl FockCutoff {
    pub fn new(per_mode_dim: usize) -> Result<Self> {
        if per_mode_dim == 0 {
            return Err(Error::InvalidParameter(
                "cutoff dimension must be at least 1".into(),
            ));
        }
        Ok(Self { per_mode_dim })
    }

    pub fn per_mode_dim(&self) -> usize {
        self.per_mode_dim
    }

    /// Dimension of the two-mode space, d².
    pub fn two_mode_dim(&self) -> usize {
        self.per_mode_dim * self.per_mode_dim
    }

    /// Largest total photon number with a complete |N,k⟩ block.
    pub fn max_complete_block(&self) -> usize {
        self.per_mode_dim - 1
    }

    /// Largest total photon number representable at all.
    pub fn max_total_photons(&self) -> usize {
        2 * (self.per_mode_dim - 1)
    }
}

/// Which of the two polarization modes an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    H,
    V,
}

/// Flat two-mode index of the basis state |n_H⟩|n_V⟩.
#[inline]
pub fn pair_index(n_h: usize, n_v: usize, cutoff: FockCutoff) -> usize {
    n_h * cutoff.per_mode_dim + n_v
}

/// Mode occupations of a flat two-mode index.
#[inline]
pub fn index_pair(idx: usize, cutoff: FockCutoff) -> (usize, usize) {
    (idx / cutoff.per_mode_dim, idx % cutoff.per_mode_dim)
}

/// Mode occupations (n_H, n_V) of the block-basis state |N,k⟩ = |k⟩_H|N−k⟩_V.
pub fn basis_index(total: usize, k: usize, cutoff: FockCutoff) -> Result<(usize, usize)> {
    if k > total || total > cutoff.max_complete_block() {
        return Err(Error::OutOfRange(format!(
            "|N,k⟩ with N={total}, k={k} not in a complete block at cutoff d={}",
            cutoff.per_mode_dim
        )));
    }
    Ok((k, total - k))
}

/// Range of representable k for the N-photon block at a given cutoff.
pub fn block_k_range(total: usize, cutoff: FockCutoff) -> std::ops::RangeInclusive<usize> {
    let d = cutoff.per_mode_dim;
    let lo = total.saturating_sub(d - 1);
    let hi = total.min(d - 1);
    lo..=hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    Annihilation,
    Creation,
    Number,
}

/// A labeled single-mode ladder/number operator on the truncated space.
#[derive(Debug, Clone)]
pub struct ModeOperatorMatrix<T> {
    label: OperatorLabel,
    matrix: CMatrix<T>,
}

impl<T: Real> ModeOperatorMatrix<T> {
    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }
}

/// Annihilation operator, a|n⟩ = √n |n−1⟩: entries a[n−1, n] = √n.
pub fn annihilation_matrix<T: Real>(cutoff: FockCutoff) -> ModeOperatorMatrix<T> {
    let d = cutoff.per_mode_dim;
    let mut m = CMatrix::zeros(d);
    for n in 1..d {
        m[(n - 1, n)] = Complex::new(real::<T>(n as f64).sqrt(), T::zero());
    }
    ModeOperatorMatrix {
        label: OperatorLabel::Annihilation,
        matrix: m,
    }
}

/// Creation operator, the conjugate transpose of annihilation.
pub fn creation_matrix<T: Real>(cutoff: FockCutoff) -> ModeOperatorMatrix<T> {
    ModeOperatorMatrix {
        label: OperatorLabel::Creation,
        matrix: annihilation_matrix::<T>(cutoff).matrix.dagger(),
    }
}

/// Number operator, diagonal 0..d−1.
pub fn number_matrix<T: Real>(cutoff: FockCutoff) -> ModeOperatorMatrix<T> {
    let d = cutoff.per_mode_dim;
    let mut m = CMatrix::zeros(d);
    for n in 0..d {
        m[(n, n)] = Complex::new(real::<T>(n as f64), T::zero());
    }
    ModeOperatorMatrix {
        label: OperatorLabel::Number,
        matrix: m,
    }
}

/// Quadrature operator X_φ = (a·e^{−iφ} + a†·e^{iφ})/√2 (vacuum variance ½).
pub fn quadrature_matrix<T: Real>(cutoff: FockCutoff, lo_phase: T) -> CMatrix<T> {
    let a = annihilation_matrix::<T>(cutoff).into_matrix();
    let adag = a.dagger();
    let inv_sqrt2 = T::one() / real::<T>(2.0).sqrt();
    let em = Complex::from_polar(inv_sqrt2, -lo_phase);
    let ep = Complex::from_polar(inv_sqrt2, lo_phase);
    a.scale(em).add(&adag.scale(ep))
}

/// Embed a single-mode operator on one mode of the two-mode space:
/// op⊗𝟙 for H, 𝟙⊗op for V, matching the row-major index map.
pub fn embed_on_mode<T: Real>(
    op: &CMatrix<T>,
    mode: Mode,
    cutoff: FockCutoff,
) -> Result<CMatrix<T>> {
    check_dim("embed_on_mode operator", op, cutoff.per_mode_dim)?;
    let eye = CMatrix::identity(cutoff.per_mode_dim);
    Ok(match mode {
        Mode::H => op.kron(&eye),
        Mode::V => eye.kron(op),
    })
}

/// Pure amplitude vector or density matrix.
#[derive(Debug, Clone)]
pub enum StateData<T> {
    Pure(Vec<Complex<T>>),
    Mixed(CMatrix<T>),
}

/// A state of the two-mode field on the truncated Fock space.
///
/// Immutable after construction; constructors validate the invariants and
/// reject out-of-tolerance inputs instead of repairing them.
#[derive(Debug, Clone)]
pub struct TwoModeState<T> {
    cutoff: FockCutoff,
    data: StateData<T>,
    tail_probability: T,
}

impl<T: Real> TwoModeState<T> {
    pub fn pure(cutoff: FockCutoff, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        Self::pure_with_tail(cutoff, amplitudes, T::zero())
    }

    pub fn pure_with_tail(
        cutoff: FockCutoff,
        amplitudes: Vec<Complex<T>>,
        tail_probability: T,
    ) -> Result<Self> {
        if amplitudes.len() != cutoff.two_mode_dim() {
            return Err(Error::DimensionMismatch {
                context: "pure two-mode amplitudes",
                expected: cutoff.two_mode_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - T::one()).abs() > tolerance::<T>(PURE_NORM_TOL) {
            return Err(Error::InvalidState(format!(
                "pure state norm deviates from 1 by {:e}",
                (norm - T::one()).abs().to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self {
            cutoff,
            data: StateData::Pure(amplitudes),
            tail_probability,
        })
    }

    pub fn mixed(cutoff: FockCutoff, rho: CMatrix<T>) -> Result<Self> {
        Self::mixed_with_tail(cutoff, rho, T::zero())
    }

    pub fn mixed_with_tail(cutoff: FockCutoff, rho: CMatrix<T>, tail_probability: T) -> Result<Self> {
        check_dim("two-mode density matrix", &rho, cutoff.two_mode_dim())?;
        validate_density(&rho)?;
        Ok(Self {
            cutoff,
            data: StateData::Mixed(rho),
            tail_probability,
        })
    }

    /// Constructor for transforms that preserve validity by construction
    /// (unitaries, exact reassembly); skips the validation pass.
    pub(crate) fn from_valid_parts(
        cutoff: FockCutoff,
        data: StateData<T>,
        tail_probability: T,
    ) -> Self {
        Self {
            cutoff,
            data,
            tail_probability,
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff.two_mode_dim()
    }

    pub fn data(&self) -> &StateData<T> {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    /// Probability mass lost to truncation when the state was constructed.
    pub fn tail_probability(&self) -> T {
        self.tail_probability
    }

    pub fn tail_warning(&self) -> bool {
        self.tail_probability > tolerance::<T>(TAIL_WARN_THRESHOLD)
    }

    /// Density-matrix view (materializes |ψ⟩⟨ψ| for pure states).
    pub fn density_matrix(&self) -> CMatrix<T> {
        match &self.data {
            StateData::Pure(v) => outer(v, v),
            StateData::Mixed(rho) => rho.clone(),
        }
    }

    /// ⟨ψ|O|ψ⟩ or tr(ρO).
    pub fn expectation(&self, op: &CMatrix<T>) -> Result<Complex<T>> {
        check_dim("expectation operator", op, self.dim())?;
        Ok(match &self.data {
            StateData::Pure(v) => crate::linalg::vec_dot(v, &op.matvec(v)),
            StateData::Mixed(rho) => rho.trace_product(op),
        })
    }

    /// Occupation probability of the flat basis index.
    pub fn population(&self, idx: usize) -> T {
        match &self.data {
            StateData::Pure(v) => v[idx].norm_sqr(),
            StateData::Mixed(rho) => rho[(idx, idx)].re,
        }
    }
}

fn validate_density<T: Real>(rho: &CMatrix<T>) -> Result<()> {
    let herm_dev = rho.hermiticity_deviation();
    if herm_dev > tolerance::<T>(HERMITICITY_TOL) {
        return Err(Error::InvalidState(format!(
            "density matrix hermiticity deviation {:e}",
            herm_dev.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > tolerance::<T>(TRACE_TOL)
        || tr.im.abs() > tolerance::<T>(TRACE_TOL)
    {
        return Err(Error::InvalidState(format!(
            "density matrix trace deviates from 1 by {:e}",
            ((tr.re - T::one()).abs() + tr.im.abs())
                .to_f64()
                .unwrap_or(f64::NAN)
        )));
    }
    if !rho.is_psd_within(tolerance::<T>(PSD_TOL)) {
        return Err(Error::InvalidState(
            "density matrix has an eigenvalue below the positivity tolerance".into(),
        ));
    }
    Ok(())
}

/// A state of a single mode on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct SingleModeState<T> {
    dim: usize,
    data: StateData<T>,
    tail_probability: T,
}

impl<T: Real> SingleModeState<T> {
    pub fn pure(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        Self::pure_with_tail(amplitudes, T::zero())
    }

    pub fn pure_with_tail(amplitudes: Vec<Complex<T>>, tail_probability: T) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude vector".into()));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - T::one()).abs() > tolerance::<T>(PURE_NORM_TOL) {
            return Err(Error::InvalidState(format!(
                "pure state norm deviates from 1 by {:e}",
                (norm - T::one()).abs().to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self {
            dim: amplitudes.len(),
            data: StateData::Pure(amplitudes),
            tail_probability,
        })
    }

    pub fn mixed(rho: CMatrix<T>) -> Result<Self> {
        Self::mixed_with_tail(rho, T::zero())
    }

    pub fn mixed_with_tail(rho: CMatrix<T>, tail_probability: T) -> Result<Self> {
        validate_density(&rho)?;
        Ok(Self {
            dim: rho.dim(),
            data: StateData::Mixed(rho),
            tail_probability,
        })
    }

    pub fn vacuum(dim: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[0] = Complex::new(T::one(), T::zero());
        Self {
            dim,
            data: StateData::Pure(amps),
            tail_probability: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &StateData<T> {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn tail_probability(&self) -> T {
        self.tail_probability
    }

    pub fn density_matrix(&self) -> CMatrix<T> {
        match &self.data {
            StateData::Pure(v) => outer(v, v),
            StateData::Mixed(rho) => rho.clone(),
        }
    }

    pub fn expectation(&self, op: &CMatrix<T>) -> Result<Complex<T>> {
        check_dim("expectation operator", op, self.dim)?;
        Ok(match &self.data {
            StateData::Pure(v) => crate::linalg::vec_dot(v, &op.matvec(v)),
            StateData::Mixed(rho) => rho.trace_product(op),
        })
    }

    pub fn population(&self, n: usize) -> T {
        match &self.data {
            StateData::Pure(v) => v[n].norm_sqr(),
            StateData::Mixed(rho) => rho[(n, n)].re,
        }
    }

    /// Mean and variance of the photon number.
    pub fn photon_statistics(&self) -> (T, T) {
        let mut mean = T::zero();
        let mut second = T::zero();
        for n in 0..self.dim {
            let p = self.population(n);
            let nn = real::<T>(n as f64);
            mean += p * nn;
            second += p * nn * nn;
        }
        (mean, second - mean * mean)
    }
}

/// One total-photon-number block of the polarization sector.
#[derive(Debug, Clone)]
pub struct SectorBlock<T> {
    /// Total photon number N of the block.
    pub total_photons: usize,
    /// Smallest representable k in the block (0 for complete blocks).
    pub k_offset: usize,
    /// Probability weight p_N = tr(1_N ρ 1_N).
    pub weight: T,
    /// Block matrix in the |N,k⟩ basis, normalized to trace 1 when p_N > 0.
    pub matrix: CMatrix<T>,
}

/// Block-diagonal restriction ρ_pol = Σ_N 1_N ρ 1_N of a state: the part that
/// determines every Stokes moment.
#[derive(Debug, Clone)]
pub struct PolarizationSector<T> {
    cutoff: FockCutoff,
    blocks: Vec<SectorBlock<T>>,
    tail_probability: T,
}

impl<T: Real> PolarizationSector<T> {
    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn blocks(&self) -> &[SectorBlock<T>] {
        &self.blocks
    }

    /// Truncation tail inherited from the projected state.
    pub fn tail_probability(&self) -> T {
        self.tail_probability
    }

    pub fn weight_sum(&self) -> T {
        self.blocks.iter().map(|b| b.weight).sum()
    }

    /// Rebuild the block-diagonal density matrix Σ_N p_N ρ_N on the full space.
    pub fn reassemble(&self) -> Result<TwoModeState<T>> {
        let n = self.cutoff.two_mode_dim();
        let mut rho = CMatrix::zeros(n);
        for block in &self.blocks {
            if block.weight <= T::zero() {
                continue;
            }
            let ks: Vec<usize> = block_k_range(block.total_photons, self.cutoff).collect();
            for (bi, &k) in ks.iter().enumerate() {
                let row = pair_index(k, block.total_photons - k, self.cutoff);
                for (bj, &kp) in ks.iter().enumerate() {
                    let col = pair_index(kp, block.total_photons - kp, self.cutoff);
                    rho[(row, col)] = block.matrix[(bi, bj)].scale(block.weight);
                }
            }
        }
        TwoModeState::mixed_with_tail(self.cutoff, rho, self.tail_probability)
    }
}

/// Project a state onto its polarization sector.
///
/// Weights sum to the full-state trace, and every Stokes moment computed from
/// the sector equals the full-state value (the Stokes operators are block
/// diagonal in total photon number).
pub fn project_polarization_sector<T: Real>(state: &TwoModeState<T>) -> PolarizationSector<T> {
    let cutoff = state.cutoff();
    let mut blocks = Vec::with_capacity(cutoff.max_total_photons() + 1);
    for total in 0..=cutoff.max_total_photons() {
        let ks: Vec<usize> = block_k_range(total, cutoff).collect();
        let len = ks.len();
        let mut m = CMatrix::zeros(len);
        match state.data() {
            StateData::Pure(v) => {
                for (bi, &k) in ks.iter().enumerate() {
                    let ai = v[pair_index(k, total - k, cutoff)];
                    for (bj, &kp) in ks.iter().enumerate() {
                        let aj = v[pair_index(kp, total - kp, cutoff)];
                        m[(bi, bj)] = ai * aj.conj();
                    }
                }
            }
            StateData::Mixed(rho) => {
                for (bi, &k) in ks.iter().enumerate() {
                    let row = pair_index(k, total - k, cutoff);
                    for (bj, &kp) in ks.iter().enumerate() {
                        let col = pair_index(kp, total - kp, cutoff);
                        m[(bi, bj)] = rho[(row, col)];
                    }
                }
            }
        }
        let weight = m.trace().re;
        let normalized = if weight > T::zero() {
            m.scale_re(T::one() / weight)
        } else {
            m
        };
        blocks.push(SectorBlock {
            total_photons: total,
            k_offset: ks[0],
            weight,
            matrix: normalized,
        });
    }
    PolarizationSector {
        cutoff,
        blocks,
        tail_probability: state.tail_probability(),
    }
}
