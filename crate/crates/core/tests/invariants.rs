//! Property-based invariants of the Stokes algebra and the degrees:
//! uncertainty bound, SU(2) invariance, sector equality, eigen-vs-grid
//! minimality, and range constraints, over randomized states.

use num_complex::Complex64;
use polarimetry::degrees::{degree_p1, degree_p2, degree_p2_prime};
use polarimetry::fock::{
    pair_index, project_polarization_sector, FockCutoff, TwoModeState,
};
use polarimetry::states::{su2_coherent, two_mode_number, Su2CoherentSpec};
use polarimetry::stokes::{
    apply_su2, projected_variance, stokes_distribution, stokes_moments, Direction,
};
use proptest::prelude::*;

/// Random pure state supported on the complete blocks (N ≤ d−1) of a cutoff,
/// so SU(2) transformations act exactly.
fn complete_block_state(d: usize, re_im: &[(f64, f64)]) -> Option<TwoModeState<f64>> {
    let cutoff = FockCutoff::new(d).unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff.two_mode_dim()];
    let mut slot = 0;
    for n_h in 0..d {
        for n_v in 0..d {
            if n_h + n_v <= d - 1 {
                let (re, im) = re_im[slot];
                amps[pair_index(n_h, n_v, cutoff)] = Complex64::new(re, im);
                slot += 1;
            }
        }
    }
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-3 {
        return None;
    }
    for a in amps.iter_mut() {
        *a = *a / norm;
    }
    Some(TwoModeState::pure(cutoff, amps).unwrap())
}

fn n_complete_indices(d: usize) -> usize {
    d * (d + 1) / 2
}

prop_compose! {
    fn arb_state()(d in 3usize..6)(
        d in Just(d),
        re_im in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n_complete_indices(d)),
    ) -> Option<TwoModeState<f64>> {
        complete_block_state(d, &re_im)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uncertainty_bound_holds(state in arb_state()) {
        prop_assume!(state.is_some());
        let m = stokes_moments(&state.unwrap());
        prop_assert!(m.total_variance + 1e-8 >= 2.0 * m.s0_mean,
            "(ΔS)² = {} < 2⟨S₀⟩ = {}", m.total_variance, 2.0 * m.s0_mean);
    }

    #[test]
    fn degrees_lie_in_unit_interval(state in arb_state()) {
        prop_assume!(state.is_some());
        let m = stokes_moments(&state.unwrap());
        let p1 = degree_p1(&m);
        let p2p = degree_p2_prime(&m).unwrap();
        let p2 = degree_p2(&m).unwrap();
        for (name, p) in [("p1", p1), ("p2_prime", p2p), ("p2", p2)] {
            prop_assert!((0.0..=1.0).contains(&p), "{name} = {p}");
        }
    }

    #[test]
    fn p2_invariant_under_su2(state in arb_state(), theta in 0.0f64..3.0, phi in -3.0f64..3.0) {
        prop_assume!(state.is_some());
        let state = state.unwrap();
        let before = degree_p2(&stokes_moments(&state)).unwrap();
        let after = degree_p2(&stokes_moments(&apply_su2(&state, theta, phi))).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    #[test]
    fn trace_of_covariance_invariant_under_su2(
        state in arb_state(), theta in 0.0f64..3.0, phi in -3.0f64..3.0
    ) {
        prop_assume!(state.is_some());
        let state = state.unwrap();
        let before = stokes_moments(&state);
        let after = stokes_moments(&apply_su2(&state, theta, phi));
        prop_assert!((before.total_variance - after.total_variance).abs() < 1e-9);
        prop_assert!((before.mean_norm() - after.mean_norm()).abs() < 1e-9);
    }

    #[test]
    fn p2_equals_p2_of_polarization_sector(state in arb_state()) {
        prop_assume!(state.is_some());
        let state = state.unwrap();
        let p2 = degree_p2(&stokes_moments(&state)).unwrap();
        let reassembled = project_polarization_sector(&state).reassemble().unwrap();
        let p2_pol = degree_p2(&stokes_moments(&reassembled)).unwrap();
        prop_assert!((p2 - p2_pol).abs() < 1e-12, "{p2} vs {p2_pol}");
    }

    #[test]
    fn eigen_minimum_bounds_grid_minimum(state in arb_state()) {
        prop_assume!(state.is_some());
        let m = stokes_moments(&state.unwrap());
        let frame = polarimetry::degrees::principal_frame(&m.covariance).unwrap();
        let mut grid_min = f64::INFINITY;
        for i in 0..100 {
            let theta = (i as f64 + 0.5) * std::f64::consts::PI / 100.0;
            for j in 0..100 {
                let phi = j as f64 * 2.0 * std::f64::consts::PI / 100.0;
                let v = projected_variance(&m, &Direction::from_angles(theta, phi));
                grid_min = grid_min.min(v);
            }
        }
        prop_assert!(frame.eigenvalues[0] <= grid_min + 1e-6,
            "γ₁ = {} > grid min {}", frame.eigenvalues[0], grid_min);
    }

    #[test]
    fn pmf_matches_projected_moments(
        state in arb_state(), theta in 0.05f64..3.1, phi in 0.0f64..6.28
    ) {
        prop_assume!(state.is_some());
        let state = state.unwrap();
        let m = stokes_moments(&state);
        let n = Direction::from_angles(theta, phi);
        let pmf = stokes_distribution(&state, &n);
        let mean = polarimetry::sym3::dot(&m.mean_vector, n.vector());
        prop_assert!((pmf.mean() - mean).abs() < 1e-8);
        prop_assert!((pmf.variance() - projected_variance(&m, &n)).abs() < 1e-8);
        prop_assert!((pmf.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn su2_coherent_states_saturate_and_polarize(
        photons in 1usize..7, theta in 0.0f64..3.14, phi in -3.0f64..3.0
    ) {
        let cutoff = FockCutoff::new(photons + 1).unwrap();
        let s = su2_coherent(Su2CoherentSpec { photons, theta, phi }, cutoff).unwrap();
        let m = stokes_moments(&s);
        // (ΔS)² = 2⟨S₀⟩ exactly, and P₂ = 1
        prop_assert!(m.uncertainty_excess().abs() < 1e-8,
            "excess {}", m.uncertainty_excess());
        let p2 = degree_p2(&m).unwrap();
        prop_assert!((p2 - 1.0).abs() < 1e-8, "P₂ = {p2}");
        // P₁ = 1 as well for these states
        prop_assert!((degree_p1(&m) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn number_states_fully_second_order_polarized(n in 0usize..4, m_v in 0usize..4) {
        prop_assume!(n + m_v >= 1);
        let s = two_mode_number::<f64>(n, m_v, FockCutoff::new(5).unwrap()).unwrap();
        let p2 = degree_p2(&stokes_moments(&s)).unwrap();
        prop_assert!((p2 - 1.0).abs() < 1e-8, "P₂(|{n},{m_v}⟩) = {p2}");
    }

    #[test]
    fn sector_weights_sum_to_trace(state in arb_state()) {
        prop_assume!(state.is_some());
        let sector = project_polarization_sector(&state.unwrap());
        prop_assert!((sector.weight_sum() - 1.0).abs() < 1e-10);
    }
}
