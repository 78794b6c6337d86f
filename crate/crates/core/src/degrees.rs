//! Degrees of polarization P₁, P₂′ and P₂, the principal-frame analysis of
//! the Stokes covariance matrix, and the single-mode closed-form oracle.
//!
//! - P₁ = |⟨**S**⟩| / ⟨S₀⟩
//! - P₂′ = √(1 − (Δ**S**)² / ⟨**S**²⟩)
//! - P₂ = √(1 − γ₁ / (⅓⟨**S**²⟩)), with γ₁ the smallest eigenvalue of the
//!   covariance matrix Γ — the minimum projected variance over all
//!   Poincaré-sphere directions.
//!
//! All three degrees are defined as 0 for the two-mode vacuum.

use crate::error::{Error, Result};
use crate::scalar::{real, tolerance, Real};
use crate::stokes::{Direction, StokesMomentSet};
use crate::sym3::{eigen_sym3, max_abs_asymmetry, Mat3, Vec3};

/// Radicand deviations beyond this are escalated as logic errors instead of
/// being clamped away as rounding.
pub const CLAMP_ESCALATION: f64 = 1e-6;

/// Relative eigenvalue gap below which the minimum-variance direction is
/// reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Default isotropy/saturation tolerance for the unpolarized test.
pub const UNPOLARIZED_TOL: f64 = 1e-6;

/// Eigen-structure of the Stokes covariance matrix: the noise ellipsoid.
#[derive(Debug, Clone, Copy)]
pub struct PrincipalFrame<T> {
    /// Eigenvalues γ₁ ≤ γ₂ ≤ γ₃ (variance units, photons²).
    pub eigenvalues: Vec3<T>,
    /// Proper rotation (det = +1) whose rows are the eigenvectors; the
    /// rotated Stokes vector 𝒮 = R·**S** has diagonal covariance.
    pub rotation: Mat3<T>,
    /// True when γ₁ and γ₂ coincide within tolerance: the minimum-variance
    /// direction is then any unit vector in the degenerate eigenplane.
    pub degenerate: bool,
}

impl<T: Real> PrincipalFrame<T> {
    /// Direction of minimum projected variance (the γ₁ eigenvector), with a
    /// sign convention making the first nonzero component positive.
    pub fn min_variance_direction(&self) -> Direction<T> {
        let mut v = self.rotation[0];
        let flip = v
            .iter()
            .find(|c| c.abs() > tolerance::<T>(1e-12))
            .map(|c| *c < T::zero())
            .unwrap_or(false);
        if flip {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
        Direction::new(v).expect("eigenvector rows are unit vectors")
    }

    /// Semi-axes √γᵢ of the noise ellipsoid.
    pub fn ellipsoid_semi_axes(&self) -> Vec3<T> {
        [
            self.eigenvalues[0].max(T::zero()).sqrt(),
            self.eigenvalues[1].max(T::zero()).sqrt(),
            self.eigenvalues[2].max(T::zero()).sqrt(),
        ]
    }
}

/// Principal components of a symmetric PSD covariance matrix.
pub fn principal_frame<T: Real>(covariance: &Mat3<T>) -> Result<PrincipalFrame<T>> {
    let asym = max_abs_asymmetry(covariance);
    let scale = covariance
        .iter()
        .flatten()
        .fold(T::zero(), |acc, x| acc.max(x.abs()))
        .max(T::one());
    if asym > tolerance::<T>(1e-10) * scale {
        return Err(Error::NotSymmetric(asym.to_f64().unwrap_or(f64::NAN)));
    }
    let (eigenvalues, rotation) = eigen_sym3(covariance);
    let gap = eigenvalues[1] - eigenvalues[0];
    let degenerate = gap <= tolerance::<T>(DEGENERACY_TOL) * (T::one() + eigenvalues[2].abs());
    Ok(PrincipalFrame {
        eigenvalues,
        rotation,
        degenerate,
    })
}

/// Clamp a squared degree into [0,1]; deviations beyond the escalation slack
/// indicate an upstream logic bug and are reported as errors.
fn clamped_sqrt<T: Real>(radicand: T, context: &'static str) -> Result<T> {
    let slack = tolerance::<T>(CLAMP_ESCALATION);
    if radicand < -slack || radicand > T::one() + slack {
        return Err(Error::RadicandOvershoot {
            context,
            value: radicand.to_f64().unwrap_or(f64::NAN),
            slack: CLAMP_ESCALATION,
        });
    }
    Ok(radicand.max(T::zero()).min(T::one()).sqrt())
}

/// First-order degree P₁ = |⟨**S**⟩| / ⟨S₀⟩ (0 for the vacuum).
pub fn degree_p1<T: Real>(moments: &StokesMomentSet<T>) -> T {
    if moments.s0_mean <= T::zero() {
        return T::zero();
    }
    (moments.mean_norm() / moments.s0_mean).min(T::one())
}

/// Second-order degree P₂′ = √(1 − (Δ**S**)²/⟨**S**²⟩) (0 for the vacuum).
pub fn degree_p2_prime<T: Real>(moments: &StokesMomentSet<T>) -> Result<T> {
    if moments.s_squared_mean <= T::zero() {
        return Ok(T::zero());
    }
    clamped_sqrt(
        T::one() - moments.total_variance / moments.s_squared_mean,
        "p2_prime",
    )
}

/// Second-order degree P₂ = √(1 − γ₁/(⅓⟨**S**²⟩)) (0 for the vacuum).
///
/// γ₁ ≥ 0 since Γ is PSD, and 3γ₁ ≤ tr Γ = (Δ**S**)² ≤ ⟨**S**²⟩, so the
/// radicand lies in \[0,1\] up to rounding.
pub fn degree_p2<T: Real>(moments: &StokesMomentSet<T>) -> Result<T> {
    if moments.s_squared_mean <= T::zero() {
        return Ok(T::zero());
    }
    let frame = principal_frame(&moments.covariance)?;
    degree_p2_from_frame(moments, &frame)
}

fn degree_p2_from_frame<T: Real>(
    moments: &StokesMomentSet<T>,
    frame: &PrincipalFrame<T>,
) -> Result<T> {
    if moments.s_squared_mean <= T::zero() {
        return Ok(T::zero());
    }
    // γ₁ is kept unclamped here so that anything beyond rounding-level
    // negativity trips the escalation instead of being silently absorbed
    let gamma1 = frame.eigenvalues[0];
    let third = moments.s_squared_mean / real::<T>(3.0);
    clamped_sqrt(T::one() - gamma1 / third, "p2")
}

/// Closed form for single-mode states |Ψ⟩_H|0⟩_V:
/// P₂ = √(1 − 3·min[(ΔN)², N̄] / ((ΔN)² + N̄(N̄+2))); 0 when both moments
/// vanish.
pub fn oracle_p2_single_mode<T: Real>(mean_photons: T, photon_variance: T) -> T {
    if mean_photons <= T::zero() && photon_variance <= T::zero() {
        return T::zero();
    }
    let denom = photon_variance + mean_photons * (mean_photons + real::<T>(2.0));
    let min_term = photon_variance.min(mean_photons);
    (T::one() - real::<T>(3.0) * min_term / denom)
        .max(T::zero())
        .sqrt()
}

/// Second-order unpolarized test: fluctuations isotropic *and* saturating the
/// total-variance bound (γᵢ = ⅓⟨**S**²⟩ for all i), with vanishing mean.
pub fn is_unpolarized_second_order<T: Real>(moments: &StokesMomentSet<T>, tol: T) -> bool {
    if moments.s_squared_mean <= T::zero() {
        // vacuum: no fluctuations, trivially unpolarized
        return moments.mean_norm() <= tol;
    }
    let third = moments.s_squared_mean / real::<T>(3.0);
    let Ok(frame) = principal_frame(&moments.covariance) else {
        return false;
    };
    let scale = moments.s_squared_mean;
    if moments.mean_norm() > tol * scale.sqrt().max(T::one()) {
        return false;
    }
    frame
        .eigenvalues
        .iter()
        .all(|&g| (g - third).abs() < tol * scale)
}

/// Full second-order report: the three degrees, the noise ellipsoid and the
/// minimum-variance direction, plus truncation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct DegreeReport<T> {
    pub p1: T,
    pub p2_prime: T,
    pub p2: T,
    /// Direction realizing the minimum projected variance (γ₁ eigenvector).
    pub min_variance_direction: Vec3<T>,
    /// Noise-ellipsoid semi-axes √γ₁ ≤ √γ₂ ≤ √γ₃.
    pub ellipsoid_semi_axes: Vec3<T>,
    /// Covariance eigenvalues γ₁ ≤ γ₂ ≤ γ₃.
    pub eigenvalues: Vec3<T>,
    pub unpolarized: bool,
    /// γ₁ ≈ γ₂: the reported direction is one of many minimizers.
    pub degenerate_minimum: bool,
    pub s0_mean: T,
    pub s_squared_mean: T,
    pub total_variance: T,
    pub mean_vector: Vec3<T>,
    /// Truncated-tail probability of the underlying state.
    pub tail_probability: T,
    /// True when the tail exceeds the warning threshold; degree values may
    /// then be biased by truncation.
    pub tail_warning: bool,
}

/// Assemble the full report from a moment set.
pub fn degree_report<T: Real>(moments: &StokesMomentSet<T>) -> Result<DegreeReport<T>> {
    let frame = principal_frame(&moments.covariance)?;
    let p2 = degree_p2_from_frame(moments, &frame)?;
    Ok(DegreeReport {
        p1: degree_p1(moments),
        p2_prime: degree_p2_prime(moments)?,
        p2,
        min_variance_direction: *frame.min_variance_direction().vector(),
        ellipsoid_semi_axes: frame.ellipsoid_semi_axes(),
        eigenvalues: frame.eigenvalues,
        unpolarized: is_unpolarized_second_order(moments, tolerance::<T>(UNPOLARIZED_TOL)),
        degenerate_minimum: frame.degenerate,
        s0_mean: moments.s0_mean,
        s_squared_mean: moments.s_squared_mean,
        total_variance: moments.total_variance,
        mean_vector: moments.mean_vector,
        tail_probability: moments.tail_probability,
        tail_warning: moments.tail_warning(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockCutoff;
    use crate::states::{
        su2_coherent, two_mode_coherent, two_mode_number, two_mode_vacuum, Su2CoherentSpec,
    };
    use crate::stokes::stokes_moments;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cutoff(d: usize) -> FockCutoff {
        FockCutoff::new(d).unwrap()
    }

    #[test]
    fn principal_frame_identity() {
        let f = principal_frame::<f64>(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        for g in f.eigenvalues {
            assert!((g - 1.0).abs() < 1e-14);
        }
        assert!(f.degenerate);
    }

    #[test]
    fn principal_frame_sorted_min_direction() {
        let f = principal_frame::<f64>(&[[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(f.eigenvalues[0], 1.0);
        let dir = f.min_variance_direction();
        assert!((dir.vector()[1].abs() - 1.0).abs() < 1e-14);
        assert!(!f.degenerate);
    }

    #[test]
    fn principal_frame_rejects_asymmetric() {
        let err = principal_frame(&[[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(err, Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn p1_examples() {
        // |Ψ⟩_H|0⟩_V with ⟨N⟩ > 0 → P₁ = 1
        let s = two_mode_number::<f64>(2, 0, cutoff(4)).unwrap();
        let m = stokes_moments(&s);
        assert!((degree_p1(&m) - 1.0).abs() < 1e-12);

        // |n⟩_H|n⟩_V → P₁ = 0 (hidden polarization)
        let s = two_mode_number::<f64>(1, 1, cutoff(4)).unwrap();
        let m = stokes_moments(&s);
        assert!(degree_p1(&m) < 1e-12);

        // vacuum convention
        let m = stokes_moments(&two_mode_vacuum::<f64>(cutoff(2)));
        assert_eq!(degree_p1(&m), 0.0);
    }

    #[test]
    fn p2_of_number_states_is_one() {
        for (n, m_ph) in [(1usize, 1usize), (2, 0), (2, 1), (0, 3)] {
            let s = two_mode_number::<f64>(n, m_ph, cutoff(5)).unwrap();
            let m = stokes_moments(&s);
            let p2 = degree_p2(&m).unwrap();
            assert!((p2 - 1.0).abs() < 1e-10, "|{n},{m_ph}⟩: P₂ = {p2}");
        }
    }

    #[test]
    fn p2_of_coherent_states_closed_form() {
        for nbar in [0.1f64, 1.0, 5.0] {
            let alpha = c(nbar.sqrt(), 0.0);
            let s = two_mode_coherent(alpha, c(0.0, 0.0), cutoff(30)).unwrap();
            let m = stokes_moments(&s);
            let p2 = degree_p2(&m).unwrap();
            let expected = (nbar / (nbar + 3.0)).sqrt();
            assert!(
                (p2 - expected).abs() < 1e-6,
                "N̄={nbar}: {p2} vs {expected}"
            );
        }
    }

    #[test]
    fn p2_of_su2_coherent_is_one() {
        let s = su2_coherent::<f64>(
            Su2CoherentSpec {
                photons: 3,
                theta: 0.8,
                phi: 1.9,
            },
            cutoff(6),
        )
        .unwrap();
        let m = stokes_moments(&s);
        assert!((degree_p2(&m).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn p2_prime_of_su2_coherent_n5() {
        // √(1 − 2N/(N(N+2))) = √(5/7) for N = 5
        let s = su2_coherent::<f64>(
            Su2CoherentSpec {
                photons: 5,
                theta: 0.3,
                phi: 0.0,
            },
            cutoff(8),
        )
        .unwrap();
        let m = stokes_moments(&s);
        let p2p = degree_p2_prime(&m).unwrap();
        assert!((p2p - (5f64 / 7.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn vacuum_degrees_are_zero() {
        let m = stokes_moments(&two_mode_vacuum::<f64>(cutoff(3)));
        assert_eq!(degree_p1(&m), 0.0);
        assert_eq!(degree_p2_prime(&m).unwrap(), 0.0);
        assert_eq!(degree_p2(&m).unwrap(), 0.0);
    }

    #[test]
    fn oracle_single_mode_limits() {
        // Poissonian: varN = N̄ reduces to the coherent formula
        for nbar in [0.2f64, 1.0, 4.0] {
            let o = oracle_p2_single_mode(nbar, nbar);
            assert!((o - (nbar / (nbar + 3.0)).sqrt()).abs() < 1e-14);
        }
        // number state: varN = 0 → 1
        assert_eq!(oracle_p2_single_mode::<f64>(3.0, 0.0), 1.0);
        // empty field
        assert_eq!(oracle_p2_single_mode::<f64>(0.0, 0.0), 0.0);
    }

    #[test]
    fn unpolarized_detection() {
        // coherent state: isotropic but below the saturation bound
        let s = two_mode_coherent(c(1.0, 0.0), c(1.0, 0.0), cutoff(22)).unwrap();
        let m = stokes_moments(&s);
        assert!(!is_unpolarized_second_order(&m, 1e-6));

        // maximally mixed single-photon block: isotropic and saturating
        let d = cutoff(3);
        let mut rho = crate::linalg::CMatrix::<f64>::zeros(9);
        let i01 = crate::fock::pair_index(0, 1, d);
        let i10 = crate::fock::pair_index(1, 0, d);
        rho[(i01, i01)] = c(0.5, 0.0);
        rho[(i10, i10)] = c(0.5, 0.0);
        let s = crate::fock::TwoModeState::mixed(d, rho).unwrap();
        let m = stokes_moments(&s);
        assert!(is_unpolarized_second_order(&m, 1e-6));

        // hidden polarization: |1⟩_H|1⟩_V is anisotropic
        let s = two_mode_number::<f64>(1, 1, cutoff(4)).unwrap();
        let m = stokes_moments(&s);
        assert!(!is_unpolarized_second_order(&m, 1e-6));
    }

    #[test]
    fn report_assembles_consistently() {
        let s = two_mode_number::<f64>(1, 0, cutoff(3)).unwrap();
        let report = degree_report(&stokes_moments(&s)).unwrap();
        assert!((report.p1 - 1.0).abs() < 1e-12);
        assert!((report.p2 - 1.0).abs() < 1e-12);
        // Γ = diag(1,1,0): minimum along z
        assert!((report.min_variance_direction[2].abs() - 1.0).abs() < 1e-10);
        assert!(!report.degenerate_minimum);
        assert_eq!(report.eigenvalues[0], 0.0);
        assert!(!report.tail_warning);
    }

    #[test]
    fn aggressive_truncation_raises_tail_warning() {
        // coherent N̄ = 4 crammed into d = 4: a large truncated tail must
        // surface in the report
        let s = two_mode_coherent(c(2.0, 0.0), c(0.0, 0.0), cutoff(4)).unwrap();
        assert!(s.tail_probability() > 1e-3);
        let report = degree_report(&stokes_moments(&s)).unwrap();
        assert!(report.tail_warning);
        assert!(report.tail_probability > 1e-3);
    }

    #[test]
    fn radicand_overshoot_escalates() {
        let s = two_mode_number::<f64>(1, 0, cutoff(3)).unwrap();
        let mut m = stokes_moments(&s);
        // corrupt the covariance into an impossible regime
        m.covariance = [[-0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, -0.5]];
        assert!(matches!(
            degree_p2(&m),
            Err(Error::RadicandOvershoot { .. })
        ));
    }
}
