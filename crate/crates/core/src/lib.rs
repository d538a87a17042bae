//! Simulation and analysis of mixed orbital-angular-momentum (OAM) electron
//! states.
//!
//! Two generation routes share one description of the target state,
//! `Ψ(k, ξ) = G(k)(β₀e^{iγ}e^{imξ} + e^{−inξ})`:
//!
//! * holographic amplitude masks whose far-field sidebands carry the state
//!   ([`mask`], [`diffraction`]);
//! * bichromatic counter-rotating circularly polarized multiphoton
//!   ionization ([`mpi`]).
//!
//! The [`topology`] module measures probability currents, `⟨L_z⟩`,
//! topological charge and petal symmetry; [`tomography`] forward-projects
//! 3D momentum densities and reconstructs them slice by slice.

// Range checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffraction;
pub mod error;
pub mod fields;
pub mod io;
pub mod mask;
pub mod mpi;
pub mod specfun;
pub mod tomography;
pub mod topology;

pub use error::{Error, Result};
pub use fields::{
    ComplexField2D, Grid2D, Grid3D, PhysicalConstants, RadialProfile, ScalarField2D,
    ScalarField3D, Space, SuperpositionSpec, Unit,
};

/// Wraps an angle to the half-open interval `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    wrap_to_period(a, std::f64::consts::TAU)
}

/// Wraps `a` into `(−period/2, period/2]`.
pub fn wrap_to_period(a: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    let mut w = (a + half).rem_euclid(period) - half;
    if w <= -half {
        w += period;
    }
    w
}
