//! Dense complex matrices and the small set of decompositions the crate needs.
//!
//! Everything is dense and square: the truncated spaces of interest are small
//! (per-mode dimension ≲ 40), so simplicity and exactness win over sparse
//! machinery. Products skip structural zeros of the left factor, which makes
//! ladder-operator algebra cheap without changing a single bit of the result.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use num_complex::Complex;

/// Square dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitize(&self) -> Self {
        let half = real::<T>(0.5);
        Self::from_fn(self.dim, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }

    /// Largest entry-wise deviation from hermiticity, max |A_ij − conj(A_ji)|.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let dev = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|z| z.norm()).fold(T::zero(), T::add))
            .fold(T::zero(), T::max)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self[(i, i)]
        })
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Matrix product, skipping structural zeros of the left factor.
    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        let zero = T::zero();
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == zero && a.im == zero {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product, skipping structural zeros of the matrix.
    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(self.dim, v.len());
        let zero = T::zero();
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        for i in 0..self.dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, x) in self.row(i).iter().zip(v) {
                if a.re == zero && a.im == zero {
                    continue;
                }
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    /// tr(A·B) without materializing the product; skips zeros of `self`.
    pub fn trace_product(&self, rhs: &Self) -> Complex<T> {
        debug_assert_eq!(self.dim, rhs.dim);
        let zero = T::zero();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                if a.re == zero && a.im == zero {
                    continue;
                }
                acc += a * rhs[(j, i)];
            }
        }
        acc
    }

    /// Kronecker product; index map is row-major on (left, right) pairs,
    /// i.e. `(i_l, i_r) ↦ i_l·dim_r + i_r`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (na, nb) = (self.dim, rhs.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        let zero = T::zero();
        for ia in 0..na {
            for ja in 0..na {
                let a = self[(ia, ja)];
                if a.re == zero && a.im == zero {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        out[(ia * nb + ib, ja * nb + jb)] = a * rhs[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor series.
    ///
    /// Accurate to machine precision for the anti-Hermitian generators used
    /// throughout the crate; the scaled norm is kept ≤ 1/2.
    pub fn expm(&self) -> Self {
        let norm = self.norm_inf();
        let mut squarings = 0u32;
        let half = real::<T>(0.5);
        let mut scale = T::one();
        while norm * scale > half {
            scale *= half;
            squarings += 1;
        }
        let scaled = self.scale_re(scale);

        let mut sum = Self::identity(self.dim);
        let mut term = Self::identity(self.dim);
        for k in 1..=64usize {
            term = term.mul(&scaled).scale_re(T::one() / real::<T>(k as f64));
            sum = sum.add(&term);
            if term.norm_inf() <= T::epsilon() * sum.norm_inf() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Cholesky-based positive-semidefiniteness check: succeeds iff the
    /// Hermitian matrix has all eigenvalues ≥ −shift (up to rounding).
    pub fn is_psd_within(&self, shift: T) -> bool {
        let n = self.dim;
        let guard = T::epsilon() * self.max_abs().max(T::one()) * real::<T>(16.0);
        let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
        for j in 0..n {
            // diagonal pivot
            let mut d = self[(j, j)].re + shift + guard;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d < T::zero() {
                return false;
            }
            let dj = d.max(T::zero()).sqrt();
            l[j * n + j] = Complex::new(dj, T::zero());
            if dj == T::zero() {
                // zero pivot: the rest of the column must stay (near) zero
                for i in (j + 1)..n {
                    l[i * n + j] = Complex::new(T::zero(), T::zero());
                }
                continue;
            }
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s.unscale(dj);
            }
        }
        true
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Returns eigenvalues in ascending order and the matching
    /// orthonormal eigenvectors as columns.
    pub fn hermitian_eigen(&self) -> (Vec<T>, CMatrix<T>) {
        let n = self.dim;
        let mut a = self.hermitize();
        let mut v = Self::identity(n);
        let tol = T::epsilon() * a.max_abs().max(T::one());

        for _sweep in 0..64 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let w = apq.norm();
                    if w <= tol * real::<T>(1e-3) {
                        continue;
                    }
                    let phase = apq.unscale(w); // e^{iφ}
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta2 = (w + w).atan2(app - aqq);
                    let theta = theta2.scale_half();
                    let c = theta.cos();
                    let s = theta.sin();
                    let sp = phase.scale(s); // s·e^{iφ}
                    let spc = sp.conj();

                    // columns: A ← A·U, with U = [[c, −s·e^{iφ}],[s·e^{−iφ}, c]]
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip.scale(c) + aiq * spc;
                        a[(i, q)] = aiq.scale(c) - aip * sp;
                    }
                    // rows: A ← U†·A
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj.scale(c) + aqj * sp;
                        a[(q, j)] = aqj.scale(c) - apj * spc;
                    }
                    // accumulate eigenvectors: V ← V·U
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip.scale(c) + viq * spc;
                        v[(i, q)] = viq.scale(c) - vip * sp;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let evals: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
        let sorted_vals: Vec<T> = order.iter().map(|&i| evals[i]).collect();
        let sorted_vecs = Self::from_fn(n, |i, j| v[(i, order[j])]);
        (sorted_vals, sorted_vecs)
    }

    /// Principal square root of a Hermitian PSD matrix. Small negative
    /// eigenvalues from rounding are clamped to zero.
    pub fn sqrt_psd(&self) -> Self {
        let (vals, vecs) = self.hermitian_eigen();
        let n = self.dim;
        let mut out = Self::zeros(n);
        for k in 0..n {
            let lk = vals[k].max(T::zero()).sqrt();
            if lk == T::zero() {
                continue;
            }
            for i in 0..n {
                let vik = vecs[(i, k)].scale(lk);
                for j in 0..n {
                    out[(i, j)] += vik * vecs[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Uhlmann fidelity F(ρ,σ) = (tr √(√ρ σ √ρ))² of two density matrices.
pub fn fidelity<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> T {
    let sr = rho.sqrt_psd();
    let inner = sr.mul(sigma).mul(&sr);
    let (vals, _) = inner.hermitian_eigen();
    let s: T = vals
        .iter()
        .map(|&l| l.max(T::zero()).sqrt())
        .fold(T::zero(), T::add);
    (s * s).min(T::one() + T::epsilon().sqrt())
}

/// Conjugated inner product ⟨a|b⟩ = Σ conj(a_i)·b_i.
pub fn vec_dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), T::add)
        .sqrt()
}

/// Outer product |a⟩⟨b| as a matrix.
pub fn outer<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> CMatrix<T> {
    let n = a.len();
    CMatrix::from_fn(n, |i, j| a[i] * b[j].conj())
}

/// Require matching dimensions, with a static context string for diagnostics.
pub fn check_dim<T: Real>(context: &'static str, m: &CMatrix<T>, expected: usize) -> Result<()> {
    if m.dim() != expected {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            got: m.dim(),
        });
    }
    Ok(())
}

trait ScaleHalf {
    fn scale_half(self) -> Self;
}

impl<T: Real> ScaleHalf for T {
    #[inline]
    fn scale_half(self) -> Self {
        self * real::<T>(0.5)
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_matches_hand_computation() {
        let a = CMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64, 0.0));
        let b = CMatrix::from_fn(2, |i, j| c(1.0, 0.0) * c((i + j) as f64, 0.0));
        let p = a.mul(&b);
        // a = [[0,1],[2,3]], b = [[0,1],[1,2]]
        assert_eq!(p[(0, 0)], c(1.0, 0.0));
        assert_eq!(p[(0, 1)], c(2.0, 0.0));
        assert_eq!(p[(1, 0)], c(3.0, 0.0));
        assert_eq!(p[(1, 1)], c(8.0, 0.0));
    }

    #[test]
    fn expm_of_pauli_y_rotation() {
        // exp(i·θ·σ_y/... ): use G = θ·[[0,1],[-1,0]] → rotation matrix
        let theta = 0.7_f64;
        let mut g = CMatrix::zeros(2);
        g[(0, 1)] = c(theta, 0.0);
        g[(1, 0)] = c(-theta, 0.0);
        let u = g.expm();
        assert!((u[(0, 0)].re - theta.cos()).abs() < 1e-14);
        assert!((u[(0, 1)].re - theta.sin()).abs() < 1e-14);
        assert!((u[(1, 0)].re + theta.sin()).abs() < 1e-14);
        assert!((u[(1, 1)].re - theta.cos()).abs() < 1e-14);
    }

    #[test]
    fn expm_large_norm_unitary() {
        // anti-Hermitian generator with norm >> 1 must still exponentiate to a unitary
        let n = 12;
        let g = CMatrix::from_fn(n, |i, j| {
            if i == j {
                c(0.0, 0.0)
            } else {
                let x = ((i * 31 + j * 17) % 13) as f64 - 6.0;
                let y = ((i * 7 + j * 3) % 11) as f64 - 5.0;
                if i < j {
                    c(x, y)
                } else {
                    c(-x, y) // will be fixed below
                }
            }
        });
        // antisymmetrize into an anti-Hermitian matrix: (G - G†)/2
        let ah = g.sub(&g.dagger()).scale_re(0.5);
        let u = ah.expm();
        let should_be_identity = u.dagger().mul(&u);
        let dev = should_be_identity.sub(&CMatrix::identity(n)).max_abs();
        assert!(dev < 1e-12, "unitarity deviation {dev:.3e}");
    }

    #[test]
    fn hermitian_eigen_recovers_spectrum() {
        // H = U diag(1,2,5) U† for a known unitary built from a generator
        let mut g = CMatrix::zeros(3);
        g[(0, 1)] = c(0.3, 0.2);
        g[(1, 0)] = c(-0.3, 0.2);
        g[(0, 2)] = c(-0.1, 0.5);
        g[(2, 0)] = c(0.1, 0.5);
        g[(1, 2)] = c(0.7, -0.4);
        g[(2, 1)] = c(-0.7, -0.4);
        let u = g.expm();
        let mut d = CMatrix::zeros(3);
        d[(0, 0)] = c(1.0, 0.0);
        d[(1, 1)] = c(2.0, 0.0);
        d[(2, 2)] = c(5.0, 0.0);
        let h = u.mul(&d).mul(&u.dagger());
        let (vals, vecs) = h.hermitian_eigen();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 5.0).abs() < 1e-12);
        // residual ‖Hv − λv‖
        for k in 0..3 {
            let vk: Vec<Complex64> = (0..3).map(|i| vecs[(i, k)]).collect();
            let hv = h.matvec(&vk);
            for i in 0..3 {
                assert!((hv[i] - vk[i].scale(vals[k])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn psd_check_accepts_and_rejects() {
        let mut h = CMatrix::zeros(2);
        h[(0, 0)] = c(1.0, 0.0);
        h[(1, 1)] = c(0.0, 0.0);
        assert!(h.is_psd_within(1e-10));
        h[(1, 1)] = c(-1e-6, 0.0);
        assert!(!h.is_psd_within(1e-10));
        // off-diagonal coupling that makes it indefinite
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(0, 1)] = c(0.0, 2.0);
        m[(1, 0)] = c(0.0, -2.0);
        assert!(!m.is_psd_within(1e-10));
    }

    #[test]
    fn fidelity_of_pure_states() {
        let v0 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let plus = vec![c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)];
        let r0 = outer(&v0, &v0);
        let rp = outer(&plus, &plus);
        assert!((fidelity(&r0, &r0) - 1.0).abs() < 1e-12);
        assert!((fidelity(&r0, &rp) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kron_index_map_is_row_major() {
        let a = CMatrix::from_fn(2, |i, j| if i == j { c(i as f64 + 1.0, 0.0) } else { c(0.0, 0.0) });
        let b = CMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        // (i_l, i_r) ↦ i_l·3 + i_r
        assert_eq!(k[(0, 0)], c(1.0, 0.0));
        assert_eq!(k[(3, 3)], c(2.0, 0.0));
        assert_eq!(k[(5, 5)], c(2.0, 0.0));
    }
}
