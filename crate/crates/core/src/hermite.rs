//! Normalized harmonic-oscillator wavefunctions ψ_n(x) (Hermite functions),
//! in the convention where the vacuum quadrature variance is ½:
//! ψ_0(x) = π^{−1/4} e^{−x²/2}.
//!
//! Evaluated by the stable normalized upward recurrence
//! ψ_n = √(2/n)·x·ψ_{n−1} − √((n−1)/n)·ψ_{n−2}, which keeps every iterate at
//! unit normalization and avoids the overflow of raw Hermite polynomials up
//! to n ≈ 40 and beyond.

use crate::scalar::{real, Real};

/// ψ_0 .. ψ_{n_max} at a single point.
pub fn hermite_functions<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    let pi_quarter = real::<T>(std::f64::consts::PI).powf(real::<T>(-0.25));
    let psi0 = pi_quarter * (-x * x * real::<T>(0.5)).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    let sqrt2 = real::<T>(2.0).sqrt();
    out.push(sqrt2 * x * psi0);
    for n in 2..=n_max {
        let nf = real::<T>(n as f64);
        let a = (real::<T>(2.0) / nf).sqrt();
        let b = ((nf - T::one()) / nf).sqrt();
        let next = a * x * out[n - 1] - b * out[n - 2];
        out.push(next);
    }
    out
}
