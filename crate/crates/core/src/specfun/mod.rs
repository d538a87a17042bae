//! Special functions: Bessel `J_n`, aperture Hankel integrals, associated
//! Legendre functions, inverse Hankel transforms and the quadrature they
//! rest on. Everything here is pure and safe to call concurrently.

mod bessel;
mod hankel;
mod legendre;
pub mod quad;

pub use bessel::{bessel_j, jn, jn_sequence, zeros_below as bessel_zeros_below};
pub use hankel::{
    aperture_hankel_integral, aperture_hankel_integral_with, aperture_hankel_series,
    find_k_eq, inverse_hankel_transform, inverse_hankel_transform_complex, primitive_series,
    ApertureHankelTable, CubicSpline, HankelIntegralParams, MAX_DOCUMENTED_ORDER,
};
#[allow(unused_imports)]
pub(crate) use hankel::find_root;
pub use legendre::assoc_legendre;
pub use quad::QuadOptions;

/// First positive zero of `J₁`; sets the width of the central far-field lobe
/// of a circular aperture (`k ≈ 3.8317/R`).
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;
