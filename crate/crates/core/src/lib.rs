//! Quantum polarization analysis for two-mode light fields.
//!
//! The crate models a two-mode (H/V) quantum field on a truncated Fock space
//! and computes degrees of polarization from the moments of the Stokes
//! operators:
//!
//! - `P1` — length of the mean Stokes vector over the mean photon number,
//! - `P2'` — a total-variance refinement of `P1`,
//! - `P2` — one minus the minimum projected Stokes variance over all
//!   Poincaré-sphere directions (an eigenvalue problem for the 3×3 Stokes
//!   covariance matrix), under a square root.
//!
//! On top of the state/operator layer sit variance maps over the Poincaré
//! sphere, a linearized bright-beam dark-plane scan, and a homodyne
//! simulation + maximum-likelihood reconstruction pipeline.
//!
//! All numerics are generic over the real scalar type via [`scalar::Real`]
//! (`f32` or `f64`); concrete `f64` aliases are exported at the crate root.

// index loops read better than iterator chains in the matrix kernels
#![allow(clippy::needless_range_loop)]

pub mod degrees;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod homodyne;
pub mod linalg;
pub mod poincare;
pub mod scalar;
pub mod schema;
pub mod states;
pub mod stokes;
pub mod sym3;

pub use error::{Error, Result};
pub use num_complex::{Complex, Complex64};

/// Two-mode state over `f64`.
pub type TwoModeState64 = fock::TwoModeState<f64>;
/// Single-mode state over `f64`.
pub type SingleModeState64 = fock::SingleModeState<f64>;
/// Polarization sector over `f64`.
pub type PolarizationSector64 = fock::PolarizationSector<f64>;
/// Stokes moment set over `f64`.
pub type StokesMomentSet64 = stokes::StokesMomentSet<f64>;
/// Degree report over `f64`.
pub type DegreeReport64 = degrees::DegreeReport<f64>;
/// Principal frame over `f64`.
pub type PrincipalFrame64 = degrees::PrincipalFrame<f64>;
/// Variance map over `f64`.
pub type VarianceMap64 = poincare::VarianceMap<f64>;
/// Complex dense matrix over `f64`.
pub type CMatrix64 = linalg::CMatrix<f64>;
