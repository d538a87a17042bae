//! Bichromatic counter-rotating circularly polarized (CRCP) fields and the
//! two-channel multiphoton-ionization photoelectron wavefunction.
//!
//! Labels: the red arm oscillates at `nω` and ionizes with `m` photons, the
//! blue arm at `mω` with `n` photons, so both channels reach the same
//! continuum energy. The `m`-photon channel carries `e^{+imξ}`, the
//! `n`-photon channel `e^{−inξ}`. All quantities are in atomic units.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fields::{
    to_polar, ComplexField2D, Grid2D, Grid3D, PhysicalConstants, RadialProfile, ScalarField3D, Space,
    SuperpositionSpec, FS_IN_AU,
};
use crate::specfun::assoc_legendre;
use crate::wrap_angle;

/// Temporal envelope shared by both colours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// Gaussian with the given intensity FWHM.
    Gaussian { fwhm: f64 },
    /// Constant amplitude (continuous wave), for trace geometry.
    Continuous,
}

impl Envelope {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Envelope::Gaussian { fwhm } => {
                // field envelope of an intensity profile with this FWHM
                (-2.0 * std::f64::consts::LN_2 * t * t / (fwhm * fwhm)).exp()
            }
            Envelope::Continuous => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpiSpec {
    /// Photonicity of the red arm (frequency `nω`); channel `e^{imξ}`.
    pub m: u32,
    /// Photonicity of the blue arm (frequency `mω`); channel `e^{−inξ}`.
    pub n: u32,
    /// Fundamental frequency `ω`.
    pub omega: f64,
    pub phi_r: f64,
    pub phi_b: f64,
    pub phi_ce: f64,
    /// Rotation of the whole field in the polarization plane.
    pub zeta: f64,
    /// Delay of the blue pulse.
    pub tau: f64,
    pub envelope: Envelope,
    pub field_amplitude: f64,
    /// Radial profile `R(k)`, shared by both channels.
    pub radial: RadialProfile,
    /// Weight of the `e^{imξ}` channel relative to `e^{−inξ}` (β₀).
    pub amplitude_ratio: f64,
}

/// Photon energy of 880 nm light divided by 3: the fundamental of a
/// 880/660 nm bichromatic pair.
pub const SODIUM_FUNDAMENTAL: f64 = 0.017_257;
/// Final-state momentum for the 0.497 eV window above the sodium 3s
/// threshold.
pub const SODIUM_K_CENTER: f64 = 0.191;
pub const SODIUM_K_WIDTH: f64 = 0.025;

impl MpiSpec {
    /// The sodium (3, 4) scheme: 25 fs pulses, all phases zero.
    pub fn sodium(m: u32, n: u32) -> Self {
        Self {
            m,
            n,
            omega: SODIUM_FUNDAMENTAL,
            phi_r: 0.0,
            phi_b: 0.0,
            phi_ce: 0.0,
            zeta: 0.0,
            tau: 0.0,
            envelope: Envelope::Gaussian { fwhm: 25.0 * FS_IN_AU },
            field_amplitude: 1.0,
            radial: RadialProfile::Gaussian { center: SODIUM_K_CENTER, sigma: SODIUM_K_WIDTH },
            amplitude_ratio: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.n < 1 {
            return invalid("MPI photonicities must be >= 1");
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return invalid("omega must be positive");
        }
        if !(self.amplitude_ratio.is_finite() && self.amplitude_ratio > 0.0) {
            return invalid("amplitude ratio must be positive");
        }
        for (name, v) in [
            ("phi_r", self.phi_r),
            ("phi_b", self.phi_b),
            ("phi_ce", self.phi_ce),
            ("zeta", self.zeta),
            ("tau", self.tau),
            ("field amplitude", self.field_amplitude),
        ] {
            if !v.is_finite() {
                return invalid(format!("{name} must be finite"));
            }
        }
        if let Envelope::Gaussian { fwhm } = self.envelope {
            if !(fwhm.is_finite() && fwhm > 0.0) {
                return invalid("envelope FWHM must be positive");
            }
        }
        self.radial.validate()
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(n + m)/gcd(n, m)`.
pub fn field_symmetry_order(n: u32, m: u32) -> Result<u32> {
    if n < 1 || m < 1 {
        return invalid("field symmetry needs n, m >= 1");
    }
    Ok((n + m) / gcd(n, m))
}

/// Real CRCP field: `Re{e₊E_r(t)e^{−i(nωt+φ_r+φ_ce)}e^{−iζ} +
/// e₋E_b(t−τ)e^{−i(mω(t−τ)+φ_b+φ_ce)}e^{iζ}}` with `e± = (1, ±i)/√2`.
pub fn electric_field(spec: &MpiSpec, t: f64) -> (f64, f64) {
    let (n, m) = (spec.n as f64, spec.m as f64);
    let red = spec.field_amplitude
        * spec.envelope.at(t)
        * Complex64::from_polar(1.0, -(n * spec.omega * t + spec.phi_r + spec.phi_ce) - spec.zeta);
    let tb = t - spec.tau;
    let blue = spec.field_amplitude
        * spec.envelope.at(tb)
        * Complex64::from_polar(1.0, -(m * spec.omega * tb + spec.phi_b + spec.phi_ce) + spec.zeta);
    let i = Complex64::new(0.0, 1.0);
    let ex = FRAC_1_SQRT_2 * (red + blue);
    let ey = FRAC_1_SQRT_2 * (i * red - i * blue);
    (ex.re, ey.re)
}

/// `(t, E_x, E_y)` samples on `[t0, t1)`.
pub fn field_trace(spec: &MpiSpec, t0: f64, t1: f64, samples: usize) -> Vec<(f64, f64, f64)> {
    (0..samples)
        .map(|s| {
            let t = t0 + (t1 - t0) * s as f64 / samples as f64;
            let (ex, ey) = electric_field(spec, t);
            (t, ex, ey)
        })
        .collect()
}

/// Equal-envelope closed form `√2E₀cos((n+m)ωt/2)·(cos((n−m)ωt/2), sin((n−m)ωt/2))`.
pub fn electric_field_closed_form(spec: &MpiSpec, t: f64) -> (f64, f64) {
    let (n, m, w) = (spec.n as f64, spec.m as f64, spec.omega);
    let a = SQRT_2 * spec.field_amplitude * spec.envelope.at(t) * ((n + m) * w * t / 2.0).cos();
    let phi = (n - m) * w * t / 2.0;
    (a * phi.cos(), a * phi.sin())
}

/// Slope of the unwrapped polarization angle `Φ = arctan(E_y/E_x)`
/// (period π) by least squares over `[t_center − half_window, t_center + half_window]`.
pub fn polarization_angle_slope(spec: &MpiSpec, t_center: f64, half_window: f64, samples: usize) -> f64 {
    let ts: Vec<f64> = (0..samples)
        .map(|s| t_center - half_window + 2.0 * half_window * s as f64 / (samples - 1) as f64)
        .collect();
    let mut phis = Vec::with_capacity(samples);
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for &t in &ts {
        let (ex, ey) = electric_field(spec, t);
        let raw = (ey / ex).atan();
        if let Some(p) = prev {
            let mut d = raw + offset - p;
            while d > PI / 2.0 {
                offset -= PI;
                d -= PI;
            }
            while d < -PI / 2.0 {
                offset += PI;
                d += PI;
            }
        }
        let unwrapped = raw + offset;
        phis.push(unwrapped);
        prev = Some(unwrapped);
    }
    let nf = samples as f64;
    let tm = ts.iter().sum::<f64>() / nf;
    let pm = phis.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, p) in ts.iter().zip(&phis) {
        sxy += (t - tm) * (p - pm);
        sxx += (t - tm) * (t - tm);
    }
    sxy / sxx
}

/// Hausdorff distance between the continuous-wave trace over one beat
/// period and its rotation by `2π/S_opt`. `per_sector` samples are taken
/// in each `1/S_opt` of the period so the rotated set maps onto samples.
pub fn trace_rotation_error(spec: &MpiSpec, per_sector: usize) -> Result<f64> {
    let s = field_symmetry_order(spec.n, spec.m)?;
    let cw = MpiSpec { envelope: Envelope::Continuous, tau: 0.0, ..spec.clone() };
    let period = TAU / (spec.omega * gcd(spec.n, spec.m) as f64);
    let pts: Vec<(f64, f64)> = field_trace(&cw, 0.0, period, per_sector * s as usize)
        .into_iter()
        .map(|(_, x, y)| (x, y))
        .collect();
    let (sn, cs) = (TAU / s as f64).sin_cos();
    let rotated: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (cs * x - sn * y, sn * x + cs * y)).collect();
    Ok(hausdorff(&pts, &rotated))
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let directed = |p: &[(f64, f64)], q: &[(f64, f64)]| {
        p.iter()
            .map(|&(x, y)| q.iter().map(|&(u, v)| (x - u).hypot(y - v)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// `κ = −mφ_r + nφ_b − (m−n)φ_ce + (m+n)ζ`, wrapped.
pub fn kappa_mpi(spec: &MpiSpec) -> f64 {
    let (m, n) = (spec.m as f64, spec.n as f64);
    wrap_angle(-m * spec.phi_r + n * spec.phi_b - (m - n) * spec.phi_ce + (m + n) * spec.zeta)
}

/// `γ = κ + (m−n)π/2 + mπ`, wrapped.
pub fn gamma_from_mpi(spec: &MpiSpec) -> f64 {
    let (m, n) = (spec.m as f64, spec.n as f64);
    wrap_angle(kappa_mpi(spec) + (m - n) * PI / 2.0 + m * PI)
}

/// `γ(k) = γ₀ + ħτk²/(2m_e)` (not wrapped, so the chirp stays visible).
pub fn time_delay_gamma(k: f64, tau: f64, gamma0: f64, constants: &PhysicalConstants) -> f64 {
    gamma0 + constants.hbar_over_mass() * tau * k * k / 2.0
}

fn i_pow(p: u32) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Per-channel factors evaluated once per spec.
struct Channels {
    m_weight: Complex64,
    n_weight: Complex64,
}

impl Channels {
    fn new(spec: &MpiSpec) -> Result<Self> {
        let (m, n) = (spec.m, spec.n);
        // normalize each channel by |P_{l,μ}(0)| so amplitude_ratio is the
        // equatorial β₀; signs and the i^{N_p} phases are kept
        let pm0 = assoc_legendre(m, m as i32, 0.0)?.abs();
        let pn0 = assoc_legendre(n, -(n as i32), 0.0)?.abs();
        let m_weight = i_pow(m) * Complex64::from_polar(spec.amplitude_ratio / pm0, kappa_mpi(spec));
        let n_weight = i_pow(n) / pn0;
        Ok(Self { m_weight, n_weight })
    }

    fn eval(&self, spec: &MpiSpec, k: f64, xi: f64, cos_theta: f64) -> Result<Complex64> {
        let r = spec.radial.eval(k);
        if r == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (m, n) = (spec.m, spec.n);
        let delay = PhysicalConstants::atomic().hbar_over_mass() * spec.tau * k * k / 2.0;
        let pm = assoc_legendre(m, m as i32, cos_theta)?;
        let pn = assoc_legendre(n, -(n as i32), cos_theta)?;
        let a = self.m_weight * Complex64::from_polar(pm, m as f64 * xi + delay);
        let b = self.n_weight * Complex64::from_polar(pn, -(n as f64) * xi);
        Ok((a + b) * r)
    }
}

/// `Ψ = β₀·ψ_{m,m}e^{iκ}e^{iτk²/2} + ψ_{n,−n}` with
/// `ψ_{l,μ} = i^l R(k) P_l^μ(cos θ) e^{iμξ}/|P_l^μ(0)|`.
pub fn photoelectron_wavefunction(spec: &MpiSpec, k: f64, xi: f64, theta: f64) -> Result<Complex64> {
    spec.validate()?;
    if !(k >= 0.0) || !(0.0..=PI).contains(&theta) {
        return invalid(format!("need k >= 0 and theta in [0, pi], got k={k}, theta={theta}"));
    }
    Channels::new(spec)?.eval(spec, k, xi, theta.cos().clamp(-1.0, 1.0))
}

/// The equatorial state as an abstract superposition (exact for `τ = 0`).
pub fn equatorial_superposition(spec: &MpiSpec) -> SuperpositionSpec {
    SuperpositionSpec {
        m: spec.m,
        n: spec.n,
        beta0: spec.amplitude_ratio,
        gamma: gamma_from_mpi(spec),
        radial: spec.radial.clone(),
    }
}

/// Wavefunction on the `θ = π/2` plane.
pub fn equatorial_slice(spec: &MpiSpec, grid: &Grid2D) -> Result<ComplexField2D> {
    spec.validate()?;
    if grid.space != Space::Momentum {
        return Err(crate::Error::InvalidGrid("MPI slices live on a momentum grid".into()));
    }
    let ch = Channels::new(spec)?;
    Ok(ComplexField2D::from_fn(*grid, |kx, ky| {
        let (k, xi) = to_polar(kx, ky);
        ch.eval(spec, k, xi, 0.0).unwrap_or_default()
    }))
}

/// `|Ψ|²` on a Cartesian momentum grid with the polar axis along `k_z`.
pub fn pmd_density_3d(spec: &MpiSpec, grid: &Grid3D) -> Result<ScalarField3D> {
    spec.validate()?;
    if grid.space != Space::Momentum {
        return Err(crate::Error::InvalidGrid("PMD sampling needs a momentum grid".into()));
    }
    let ch = Channels::new(spec)?;
    Ok(ScalarField3D::from_fn(*grid, |kx, ky, kz| {
        let k = (kx * kx + ky * ky + kz * kz).sqrt();
        if k == 0.0 {
            return ch.eval(spec, 0.0, 0.0, 1.0).map(|v| v.norm_sqr()).unwrap_or(0.0);
        }
        let (_, xi) = to_polar(kx, ky);
        let c = (kz / k).clamp(-1.0, 1.0);
        ch.eval(spec, k, xi, c).map(|v| v.norm_sqr()).unwrap_or(0.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_at_origin() {
        let s = MpiSpec::sodium(4, 3);
        let (ex, ey) = electric_field(&s, 0.0);
        assert!((ex - SQRT_2).abs() < 1e-15);
        assert!(ey.abs() < 1e-15);
    }

    #[test]
    fn symmetry_orders() {
        assert_eq!(field_symmetry_order(3, 4).unwrap(), 7);
        assert_eq!(field_symmetry_order(1, 1).unwrap(), 2);
        assert_eq!(field_symmetry_order(2, 4).unwrap(), 3);
        assert!(field_symmetry_order(0, 4).is_err());
    }

    #[test]
    fn kappa_and_gamma_examples() {
        let mut s = MpiSpec::sodium(4, 3);
        assert_eq!(kappa_mpi(&s), 0.0);
        assert!((gamma_from_mpi(&s) - PI / 2.0).abs() < 1e-12);
        s.phi_ce = PI;
        assert!((kappa_mpi(&s).abs() - PI).abs() < 1e-12);
        let mut s = MpiSpec::sodium(4, 3);
        s.phi_b = PI / 3.0;
        assert!((kappa_mpi(&s) - PI).abs() < 1e-12);
    }

    #[test]
    fn poles_vanish() {
        let s = MpiSpec::sodium(4, 3);
        for theta in [0.0, PI] {
            let v = photoelectron_wavefunction(&s, SODIUM_K_CENTER, 0.3, theta).unwrap();
            assert!(v.norm() < 1e-15);
        }
    }
}
