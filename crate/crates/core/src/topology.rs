//! Probability current, `⟨L_z⟩`, topological charge and petal analysis.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::fields::{ComplexField2D, Grid2D, PhysicalConstants, ScalarField2D};
use crate::wrap_to_period;

/// Per-pixel probability current `(ħ/m)·Im(Ψ*∇Ψ)`.
#[derive(Debug, Clone)]
pub struct CurrentField {
    pub grid: Grid2D,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
}

impl CurrentField {
    /// Radial and azimuthal components at pixel `(i, j)`.
    pub fn polar_components(&self, i: usize, j: usize) -> (f64, f64) {
        let (x, y) = (self.grid.x(i), self.grid.y(j));
        let r = x.hypot(y);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let idx = self.grid.index(i, j);
        let (jx, jy) = (self.jx[idx], self.jy[idx]);
        ((x * jx + y * jy) / r, (x * jy - y * jx) / r)
    }
}

/// Central differences in the interior, one-sided on the border.
pub fn probability_current(psi: &ComplexField2D, constants: &PhysicalConstants) -> CurrentField {
    let g = psi.grid;
    let scale = constants.hbar_over_mass();
    let (dx, dy) = (g.dx(), g.dy());
    let max_rho = psi.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let threshold = 0.01 * max_rho;
    let mut jx = vec![0.0; g.len()];
    let mut jy = vec![0.0; g.len()];
    let steep: usize = jx
        .par_chunks_mut(g.nx)
        .zip(jy.par_chunks_mut(g.nx))
        .enumerate()
        .map(|(j, (rx, ry))| {
            let mut steep = 0;
            for i in 0..g.nx {
                let v = psi.at(i, j);
                let (il, ir) = (i.saturating_sub(1), (i + 1).min(g.nx - 1));
                let (jd, ju) = (j.saturating_sub(1), (j + 1).min(g.ny - 1));
                let ddx = (psi.at(ir, j) - psi.at(il, j)) / ((ir - il) as f64 * dx);
                let ddy = (psi.at(i, ju) - psi.at(i, jd)) / ((ju - jd) as f64 * dy);
                rx[i] = scale * (v.conj() * ddx).im;
                ry[i] = scale * (v.conj() * ddy).im;
                if v.norm_sqr() > threshold && ir > i {
                    let step = (psi.at(ir, j) * v.conj()).arg().abs();
                    if step >= PI * 0.999 {
                        steep += 1;
                    }
                }
            }
            steep
        })
        .sum();
    if steep > 0 {
        log::warn!("{steep} pixel pairs have phase steps near pi; the current is under-resolved");
    }
    CurrentField { grid: g, jx, jy }
}

/// Statistics of the azimuthal flow inside an annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowStats {
    /// Mean of `k·j_ξ/(ρ·ħ/m)` over non-node pixels.
    pub mean_flow: f64,
    /// RMS of `j_r` over the same pixels.
    pub radial_rms: f64,
    /// RMS of `j_ξ` over the same pixels.
    pub azimuthal_rms: f64,
    pub pixels: usize,
}

/// Flow statistics over pixels with `k_lo ≤ k ≤ k_hi` and density above
/// `node_fraction·max ρ`.
pub fn ring_flow(
    psi: &ComplexField2D,
    current: &CurrentField,
    constants: &PhysicalConstants,
    k_lo: f64,
    k_hi: f64,
    node_fraction: f64,
) -> Result<FlowStats> {
    let g = psi.grid;
    let max_rho = psi.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let cut = node_fraction * max_rho;
    let scale = constants.hbar_over_mass();
    let (mut sum, mut sr, mut sa, mut count) = (0.0, 0.0, 0.0, 0usize);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.x(i).hypot(g.y(j));
            let rho = psi.at(i, j).norm_sqr();
            if k < k_lo || k > k_hi || rho <= cut || k == 0.0 {
                continue;
            }
            let (jr, jxi) = current.polar_components(i, j);
            sum += k * jxi / (rho * scale);
            sr += jr * jr;
            sa += jxi * jxi;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Numeric("no pixels above the node threshold in the annulus".into()));
    }
    let n = count as f64;
    Ok(FlowStats {
        mean_flow: sum / n,
        radial_rms: (sr / n).sqrt(),
        azimuthal_rms: (sa / n).sqrt(),
        pixels: count,
    })
}

/// `(β₀²m − n)/(1 + β₀²)` in units of ħ.
pub fn expectation_lz(m: u32, n: u32, beta0: f64) -> f64 {
    let b2 = beta0 * beta0;
    (b2 * m as f64 - n as f64) / (1.0 + b2)
}

/// `Re[∮Ψ*(−i∂_ξ)Ψ/∮|Ψ|²]` by spectral differentiation of equally spaced
/// ring samples.
pub fn expectation_lz_numeric(ring: &[Complex64]) -> Result<f64> {
    let n = ring.len();
    if n < 8 {
        return invalid("ring needs at least 8 samples");
    }
    let mut spec = ring.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut spec);
    let (mut num, mut den) = (0.0, 0.0);
    for (p, c) in spec.iter().enumerate() {
        let q = if p < n.div_ceil(2) { p as f64 } else { p as f64 - n as f64 };
        let w = c.norm_sqr();
        // the Nyquist bin is its own mirror and carries no net angular momentum
        if n.is_multiple_of(2) && p == n / 2 {
            den += w;
            continue;
        }
        num += q * w;
        den += w;
    }
    let total: f64 = ring.iter().map(|v| v.norm_sqr()).sum();
    if !(total > 1e-300) || den == 0.0 {
        return Err(Error::Numeric("ring norm vanishes".into()));
    }
    Ok(num / den)
}

/// Appendix-style piecewise charge: `m` if `β₀ < 1`, `(m−n)/2` at exactly
/// 1, `−n` above. Here `β₀` weights the `e^{−inξ}` arm
/// (`e^{imξ} + β₀e^{−inξ}`); for a state written as
/// `β₀e^{imξ} + e^{−inξ}` pass `1/β₀`.
pub fn topological_charge_closed_form(m: u32, n: u32, beta0: f64) -> f64 {
    if beta0 < 1.0 {
        m as f64
    } else if beta0 == 1.0 {
        (m as f64 - n as f64) / 2.0
    } else {
        -(n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingOptions {
    /// Initial number of contour samples.
    pub samples: usize,
    /// Refinement stops at this many samples.
    pub max_samples: usize,
    /// Replace persistent phase jumps at density nodes by the mean of the
    /// neighbouring increments instead of failing.
    pub skip_nodes: bool,
}

impl WindingOptions {
    pub fn for_charges(m: u32, n: u32) -> Self {
        let samples = (32 * (m + n).max(1) as usize).max(64);
        Self { samples, max_samples: samples << 10, skip_nodes: false }
    }
}

const SNAP: f64 = 1e-6;

/// Phase increments between neighbouring samples. An increment touching a
/// sample that sits on a node (relative magnitude below 1e-9) is reported
/// as NaN, since its phase is undefined.
fn increments(f: &dyn Fn(f64) -> Complex64, samples: usize) -> Vec<f64> {
    let vals: Vec<Complex64> = (0..samples).map(|s| f(TAU * s as f64 / samples as f64)).collect();
    let peak = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let node = |v: Complex64| v.norm() <= 1e-9 * peak;
    (0..samples)
        .map(|s| {
            let (a, b) = (vals[s], vals[(s + 1) % samples]);
            if node(a) || node(b) {
                f64::NAN
            } else {
                (b * a.conj()).arg()
            }
        })
        .collect()
}

/// Winding number of `f(ξ)` around the unit circle in `ξ`, by unwrapped
/// phase increments. Sampling doubles while any increment exceeds π/2.
pub fn winding_number<F>(f: F, opts: WindingOptions) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    if opts.samples < 8 {
        return invalid("contour needs at least 8 samples");
    }
    let mut samples = opts.samples;
    let mut inc = increments(&f, samples);
    let jump = |d: f64| !(d.abs() <= PI / 2.0);
    while inc.iter().any(|&d| jump(d)) && samples < opts.max_samples {
        samples *= 2;
        inc = increments(&f, samples);
    }
    let bad: Vec<usize> = (0..samples).filter(|&s| jump(inc[s])).collect();
    if !bad.is_empty() {
        if !opts.skip_nodes {
            return Err(Error::Numeric(format!(
                "{} phase jumps above pi/2 persist at {samples} samples (density node on the contour?)",
                bad.len()
            )));
        }
        if bad.len() == samples {
            return Err(Error::Numeric("field vanishes on the whole contour".into()));
        }
        let is_bad = |s: usize| jump(inc[s]);
        let patched: Vec<f64> = bad
            .iter()
            .map(|&s| {
                let (mut lo, mut hi) = ((s + samples - 1) % samples, (s + 1) % samples);
                while is_bad(lo) && lo != s {
                    lo = (lo + samples - 1) % samples;
                }
                while is_bad(hi) && hi != s {
                    hi = (hi + 1) % samples;
                }
                0.5 * (inc[lo] + inc[hi])
            })
            .collect();
        for (&s, v) in bad.iter().zip(patched) {
            inc[s] = v;
        }
    }
    let total: f64 = inc.iter().sum::<f64>() / TAU;
    Ok(if (total - total.round()).abs() < SNAP { total.round() } else { total })
}

/// Winding number of a sampled field along the circle of `contour_radius`
/// (bilinear interpolation).
pub fn topological_charge_numeric(psi: &ComplexField2D, contour_radius: f64, opts: WindingOptions) -> Result<f64> {
    check_ring(&psi.grid, contour_radius)?;
    winding_number(
        |xi| {
            psi.interpolate(contour_radius * xi.cos(), contour_radius * xi.sin())
                .unwrap_or(Complex64::new(0.0, 0.0))
        },
        opts,
    )
}

fn check_ring(grid: &Grid2D, k_ring: f64) -> Result<()> {
    if !(k_ring > 0.0) || k_ring > grid.max_inscribed_radius() {
        return Err(Error::OutOfDomain(format!(
            "ring of radius {k_ring} (grid allows up to {})",
            grid.max_inscribed_radius()
        )));
    }
    Ok(())
}

/// Bilinear samples of a field on a ring, equally spaced from `ξ = 0`.
pub fn sample_ring(psi: &ComplexField2D, k_ring: f64, samples: usize) -> Result<Vec<Complex64>> {
    check_ring(&psi.grid, k_ring)?;
    Ok((0..samples)
        .map(|s| {
            let xi = TAU * s as f64 / samples as f64;
            psi.interpolate(k_ring * xi.cos(), k_ring * xi.sin()).unwrap_or_default()
        })
        .collect())
}

/// Azimuthal Fourier coefficients `c_q = (1/2π)∮ρe^{−iqξ}dξ`, `q = 0..=q_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct AzimuthalSpectrum {
    pub k_ring: f64,
    pub coeffs: Vec<Complex64>,
}

impl AzimuthalSpectrum {
    /// From equally spaced ring samples starting at `ξ = 0`.
    pub fn from_ring(k_ring: f64, ring: &[f64], q_max: usize) -> Self {
        let n = ring.len() as f64;
        let coeffs = (0..=q_max)
            .map(|q| {
                ring.iter()
                    .enumerate()
                    .map(|(s, &rho)| Complex64::from_polar(rho, -(q as f64) * TAU * s as f64 / n))
                    .sum::<Complex64>()
                    / n
            })
            .collect();
        Self { k_ring, coeffs }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `2|c_q|/c₀` clamped to `[0, 1]`.
    pub fn contrast(&self, q: usize) -> Result<f64> {
        let c0 = self.mean();
        if !(c0 > 0.0) {
            return Err(Error::Numeric("ring mean density is zero".into()));
        }
        let c = self.coeffs.get(q).ok_or_else(|| Error::InvalidArgument(format!("order {q} not computed")))?;
        Ok((2.0 * c.norm() / c0).clamp(0.0, 1.0))
    }

    /// `arg(c_q)/q` wrapped to `(−π/q, π/q]`. For a density
    /// `1 + cos(qξ + γ)` this is `γ/q`; the petal maxima sit at `−γ/q`
    /// modulo `2π/q`, so the pattern turns by minus this amount.
    pub fn rotation(&self, q: usize) -> Result<f64> {
        if q == 0 {
            return invalid("rotation needs q >= 1");
        }
        let c0 = self.mean();
        let c = self.coeffs.get(q).ok_or_else(|| Error::InvalidArgument(format!("order {q} not computed")))?;
        if !(c.norm() > 0.05 * c0) {
            return Err(Error::Numeric(format!(
                "order-{q} modulation {:.3e} too weak for a rotation estimate",
                c.norm() / c0.max(f64::MIN_POSITIVE)
            )));
        }
        Ok(wrap_to_period(c.arg() / q as f64, TAU / q as f64))
    }
}

/// Ring sample count used by the density analyses.
fn ring_samples(q_max: usize) -> usize {
    (16 * q_max).max(2048)
}

pub fn azimuthal_spectrum(density: &ScalarField2D, k_ring: f64, q_max: usize) -> Result<AzimuthalSpectrum> {
    check_ring(&density.grid, k_ring)?;
    let n = ring_samples(q_max);
    let ring: Vec<f64> = (0..n)
        .map(|s| {
            let xi = TAU * s as f64 / n as f64;
            density.interpolate(k_ring * xi.cos(), k_ring * xi.sin()).unwrap_or(0.0)
        })
        .collect();
    Ok(AzimuthalSpectrum::from_ring(k_ring, &ring, q_max))
}

/// Spectrum of an analytic density `ρ(ξ)` on a ring.
pub fn azimuthal_spectrum_fn<F: Fn(f64) -> f64>(density: F, k_ring: f64, q_max: usize) -> AzimuthalSpectrum {
    let n = ring_samples(q_max);
    let ring: Vec<f64> = (0..n).map(|s| density(TAU * s as f64 / n as f64)).collect();
    AzimuthalSpectrum::from_ring(k_ring, &ring, q_max)
}

pub fn petal_rotation_angle(density: &ScalarField2D, q: usize, k_ring: f64) -> Result<f64> {
    azimuthal_spectrum(density, k_ring, q)?.rotation(q)
}

pub fn symmetry_contrast(density: &ScalarField2D, q: usize, k_ring: f64) -> Result<f64> {
    azimuthal_spectrum(density, k_ring, q)?.contrast(q)
}

/// Closed-form and numeric `⟨L_z⟩` and charge for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyReport {
    pub lz_closed_form: f64,
    pub lz_numeric: f64,
    pub charge_closed_form: f64,
    pub charge_numeric: f64,
    pub contour_radius: f64,
}

/// Report for `e^{imξ} + β₀e^{−inξ}` (the weighting used by the piecewise
/// charge law) evaluated analytically on a unit ring. `⟨L_z⟩` of this state
/// is `expectation_lz(m, n, 1/β₀)`.
pub fn analytic_report(m: u32, n: u32, beta0: f64) -> Result<TopologyReport> {
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return invalid("beta0 must be positive");
    }
    let state = |xi: f64| {
        Complex64::from_polar(1.0, m as f64 * xi) + Complex64::from_polar(beta0, -(n as f64) * xi)
    };
    let samples = (8 * (m + n) as usize).max(64);
    let ring: Vec<Complex64> = (0..samples).map(|s| state(TAU * s as f64 / samples as f64)).collect();
    let mut opts = WindingOptions::for_charges(m, n);
    opts.skip_nodes = true;
    Ok(TopologyReport {
        lz_closed_form: expectation_lz(m, n, 1.0 / beta0),
        lz_numeric: expectation_lz_numeric(&ring)?,
        charge_closed_form: topological_charge_closed_form(m, n, beta0),
        charge_numeric: winding_number(state, opts)?,
        contour_radius: 1.0,
    })
}
