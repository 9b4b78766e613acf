//! Geodesic flows on diffeomorphism groups.
//!
//! The Euler equation `du/dt = -ad(u)^T u` describes geodesics of right
//! invariant metrics on Lie groups. This crate realizes it at two levels:
//!
//! * [`algebra`] - exactly testable finite-dimensional Lie algebras with
//!   inertia operators and the extension machinery (semidirect, central,
//!   Abelian, general) that adds cocycle terms to the geodesic equation.
//! * [`spectral1d`] / [`spectral2d`] - truncated-Fourier calculus on the
//!   circle and the flat 2-torus, with the right-hand sides of the full
//!   hydrodynamical catalog: Burgers, KdV, Camassa-Holm, Hunter-Saxton,
//!   two-component circle systems, 2D Euler vorticity, quasigeostrophic
//!   beta-plane, stratified Boussinesq, passive scalar, in-plane ideal MHD,
//!   charged ideal fluid, template matching, EPDiff and LAE-alpha.
//!
//! [`integrate`] supplies a deterministic RK4 stepper with CFL step
//! selection, [`diagnostics`] evaluates the conserved quantities the
//! geometry predicts, and [`oracle`] holds independent brute-force checks
//! (full-bracket adjoints on extension algebras, exact Parseval adjoint
//! identities, finite-difference cross-checks of every 2D right-hand side).

pub mod algebra;
pub mod config;
pub mod diagnostics;
pub mod error;
mod fft;
pub mod integrate;
pub mod models;
pub mod oracle;
mod par;
pub mod spectral1d;
pub mod spectral2d;
pub mod verify;

pub use error::{Error, Result};

/// Domain period; every spatial domain is `[0, 2π)` per coordinate.
pub const TWO_PI: f64 = std::f64::consts::TAU;
