//! Holographic amplitude masks and their analytic Fourier decomposition.
//!
//! A mask is the intensity of three interfering waves inside a circular
//! aperture: `e^{imφ}e^{iκ}` and `e^{−inφ}` carry the two OAM components,
//! `e^{ik₀x}` is the carrier that separates the first-order sidebands.
//!
//! Sideband convention: index `s ∈ {−1, +1}` labels the sideband centered at
//! `k_x = s·k₀`; its density is `1 + cos((m+n)ξ + γ)` with
//! `γ = κ + s(m−n)π/2` (see [`gamma_from_spm`]).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fields::{to_polar, ComplexField2D, Grid2D, ScalarField2D, Space, Unit};
use crate::specfun::{self, ApertureHankelTable, J1_FIRST_ZERO};
use crate::wrap_angle;

/// Chirped radial design: the `m` arm is multiplied by `e^{iCk²}` in the far
/// field and both arms get the envelope `e^{−C₂k²/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialModifier {
    /// µm²
    pub c: f64,
    /// µm², > 0
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskSpec {
    pub m: u32,
    pub n: u32,
    /// Relative phase imprinted on the `m` arm, radians.
    pub kappa: f64,
    /// Carrier wavenumber, µm⁻¹.
    pub k0: f64,
    /// Aperture radius, µm.
    pub radius: f64,
    pub radial: Option<RadialModifier>,
    pub binarize_threshold: f64,
}

impl MaskSpec {
    pub fn new(m: u32, n: u32, kappa: f64, k0: f64, radius: f64) -> Self {
        Self { m, n, kappa, k0, radius, radial: None, binarize_threshold: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k0.is_finite() && self.k0 >= 0.0) {
            return invalid(format!("carrier k0 must be >= 0, got {}", self.k0));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return invalid(format!("aperture radius must be positive, got {}", self.radius));
        }
        if !self.kappa.is_finite() {
            return invalid("kappa must be finite");
        }
        if !(self.binarize_threshold > 0.0 && self.binarize_threshold < 1.0) {
            return invalid(format!(
                "binarize threshold must lie in (0, 1), got {}",
                self.binarize_threshold
            ));
        }
        if let Some(r) = self.radial {
            if !(r.c2.is_finite() && r.c2 > 0.0) || !r.c.is_finite() {
                return invalid("radial modifier needs finite C and C2 > 0");
            }
        }
        let m = self.m.max(self.n);
        if m > specfun::MAX_DOCUMENTED_ORDER || self.m + self.n > specfun::MAX_DOCUMENTED_ORDER {
            return invalid(format!("OAM orders above {} are not supported", specfun::MAX_DOCUMENTED_ORDER));
        }
        if self.k0 < 2.0 * J1_FIRST_ZERO / self.radius {
            log::warn!(
                "k0 = {} is below 2·3.83/R = {:.3}; sidebands will overlap the central order",
                self.k0,
                2.0 * J1_FIRST_ZERO / self.radius
            );
        }
        Ok(())
    }

    /// Sideband width estimate used for the Nyquist warning.
    pub fn sideband_halfwidth(&self) -> f64 {
        2.0 * (J1_FIRST_ZERO + self.m.max(self.n) as f64) / self.radius
    }

    /// 2048² real-space grid with half-width `8π` µm (`dk = 0.125 µm⁻¹`, so
    /// integer multiples of 0.125 land on pixels), enlarged if the
    /// aperture does not fit.
    pub fn default_grid(&self) -> Result<Grid2D> {
        let extent = (8.0 * PI).max(2.0 * self.radius);
        Grid2D::square(2048, extent, Space::Real, Unit::Micrometers)
    }
}

fn check_real_grid(spec: &MaskSpec, grid: &Grid2D) -> Result<()> {
    if grid.space != Space::Real {
        return Err(Error::InvalidGrid("masks are synthesized on a real-space grid".into()));
    }
    if grid.extent_x < spec.radius || grid.extent_y < spec.radius {
        return Err(Error::InvalidGrid(format!(
            "grid half-width {}x{} clips the aperture of radius {}",
            grid.extent_x, grid.extent_y, spec.radius
        )));
    }
    let nyquist = PI / grid.dx().max(grid.dy());
    if nyquist <= spec.k0 + spec.sideband_halfwidth() {
        log::warn!(
            "grid Nyquist {nyquist:.2} does not exceed k0 + sideband width {:.2}",
            spec.k0 + spec.sideband_halfwidth()
        );
    }
    Ok(())
}

/// Direct three-wave form `circ_R·|e^{imφ}e^{iκ} + e^{−inφ} + e^{ik₀x}|²`.
pub fn mask_value(spec: &MaskSpec, x: f64, y: f64) -> f64 {
    let (r, phi) = to_polar(x, y);
    if r > spec.radius {
        return 0.0;
    }
    let sum = Complex64::from_polar(1.0, spec.m as f64 * phi + spec.kappa)
        + Complex64::from_polar(1.0, -(spec.n as f64) * phi)
        + Complex64::from_polar(1.0, spec.k0 * x);
    sum.norm_sqr()
}

/// Expanded cosine form of the same mask, used as an independent check.
pub fn mask_value_expanded(spec: &MaskSpec, x: f64, y: f64) -> f64 {
    let (r, phi) = to_polar(x, y);
    if r > spec.radius {
        return 0.0;
    }
    let (m, n, kappa) = (spec.m as f64, spec.n as f64, spec.kappa);
    let lobes = (n + m) * phi + kappa;
    3.0 + 2.0 * lobes.cos()
        + 4.0 * (((n - m) * phi - kappa + 2.0 * spec.k0 * x) / 2.0).cos() * (lobes / 2.0).cos()
}

pub fn synth_mask(spec: &MaskSpec, grid: &Grid2D) -> Result<ScalarField2D> {
    spec.validate()?;
    check_real_grid(spec, grid)?;
    Ok(ScalarField2D::from_fn(*grid, |x, y| mask_value(spec, x, y)))
}

/// Tabulated radial profiles of the two arms of a radially engineered mask.
#[derive(Debug, Clone)]
pub struct RadialTables {
    pub r: Vec<f64>,
    /// `H_m{e^{iCk²}e^{−C₂k²/2}}(r)`, max-abs normalized.
    pub m_arm: Vec<Complex64>,
    /// `H_n{e^{−C₂k²/2}}(r)`, max-abs normalized.
    pub n_arm: Vec<Complex64>,
}

impl RadialTables {
    /// Tables on `samples` radii covering `[0, r_max]`.
    pub fn compute(spec: &MaskSpec, r_max: f64, samples: usize) -> Result<Self> {
        let rad = spec
            .radial
            .ok_or_else(|| Error::InvalidArgument("mask has no radial modifier".into()))?;
        if samples < 3 || !(r_max > 0.0) {
            return invalid("radial tables need >= 3 samples over a positive radius");
        }
        // envelope down to 1e−8 of its peak
        let k_max = (2.0 * 18.5 / rad.c2).sqrt();
        let nk = 2001;
        let k: Vec<f64> = (0..nk).map(|i| k_max * i as f64 / (nk - 1) as f64).collect();
        let env = |v: f64| (-0.5 * rad.c2 * v * v).exp();
        let g_m: Vec<Complex64> = k.iter().map(|&v| Complex64::from_polar(env(v), rad.c * v * v)).collect();
        let g_n: Vec<Complex64> = k.iter().map(|&v| Complex64::new(env(v), 0.0)).collect();
        let r: Vec<f64> = (0..samples).map(|i| r_max * i as f64 / (samples - 1) as f64).collect();
        let m_arm = specfun::inverse_hankel_transform_complex(spec.m, &k, &g_m, &r)?;
        let n_arm = specfun::inverse_hankel_transform_complex(spec.n, &k, &g_n, &r)?;
        Ok(Self { r, m_arm, n_arm })
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    fn lookup(&self, table: &[Complex64], r: f64) -> Complex64 {
        let step = self.r[1] - self.r[0];
        let pos = r / step;
        let i = (pos.floor() as usize).min(self.r.len() - 2);
        let t = pos - i as f64;
        table[i] * (1.0 - t) + table[i + 1] * t
    }
}

/// `circ_R·|e^{imφ}e^{iκ}h_m(r) + e^{−inφ}h_n(r) + e^{ik₀x}|²` with the
/// radial profiles `h` obtained by inverse Hankel transforms.
pub fn synth_mask_radial(spec: &MaskSpec, grid: &Grid2D) -> Result<ScalarField2D> {
    spec.validate()?;
    check_real_grid(spec, grid)?;
    let samples = ((spec.radius / grid.dx().min(grid.dy())) * 4.0).ceil() as usize + 8;
    let tables = RadialTables::compute(spec, spec.radius, samples.max(64))?;
    synth_mask_radial_with(spec, grid, &tables)
}

pub fn synth_mask_radial_with(
    spec: &MaskSpec,
    grid: &Grid2D,
    tables: &RadialTables,
) -> Result<ScalarField2D> {
    spec.validate()?;
    check_real_grid(spec, grid)?;
    if spec.radial.is_none() {
        return invalid("synth_mask_radial needs a radial modifier");
    }
    if tables.r_max() < spec.radius {
        return Err(Error::OutOfDomain(format!(
            "radial table ends at r = {} but the aperture extends to {}",
            tables.r_max(),
            spec.radius
        )));
    }
    Ok(ScalarField2D::from_fn(*grid, |x, y| {
        let (r, phi) = to_polar(x, y);
        if r > spec.radius {
            return 0.0;
        }
        let a = Complex64::from_polar(1.0, spec.m as f64 * phi + spec.kappa) * tables.lookup(&tables.m_arm, r);
        let b = Complex64::from_polar(1.0, -(spec.n as f64) * phi) * tables.lookup(&tables.n_arm, r);
        let c = Complex64::from_polar(1.0, spec.k0 * x);
        (a + b + c).norm_sqr()
    }))
}

/// Binary mask: 1 where `value ≥ fraction·max`, else 0.
pub fn binarize(mask: &ScalarField2D, threshold_fraction: f64) -> Result<ScalarField2D> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return invalid(format!("threshold fraction {threshold_fraction} outside (0, 1)"));
    }
    if mask.values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return invalid("binarize expects a finite nonnegative mask");
    }
    let max = mask.max();
    if max <= 0.0 {
        return Err(Error::Numeric("cannot binarize an all-zero mask".into()));
    }
    let level = threshold_fraction * max;
    Ok(ScalarField2D {
        grid: mask.grid,
        values: mask.values.iter().map(|&v| if v >= level { 1.0 } else { 0.0 }).collect(),
    })
}

/// `γ = κ + s(m−n)π/2` wrapped to `(−π, π]`, for sideband `s = ±1`.
pub fn gamma_from_spm(kappa: f64, m: u32, n: u32, sideband: i32) -> Result<f64> {
    if sideband != 1 && sideband != -1 {
        return invalid(format!("sideband index must be -1 or +1, got {sideband}"));
    }
    Ok(wrap_angle(kappa + sideband as f64 * (m as f64 - n as f64) * PI / 2.0))
}

/// Which analytic far-field terms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermSelection {
    pub central: bool,
    pub mixing: bool,
    pub plus_sideband: bool,
    pub minus_sideband: bool,
}

impl TermSelection {
    pub const ALL: Self = Self { central: true, mixing: true, plus_sideband: true, minus_sideband: true };
}

/// Far-field amplitude split into the four analytic terms:
/// `central` (`6π·I₀`), `mixing` (the `2(m+n)`-fold term at `k = 0`),
/// and the two first-order sidebands at `±k₀`.
#[derive(Debug, Clone)]
pub struct AnalyticDiffraction {
    pub grid: Grid2D,
    pub central: Option<ComplexField2D>,
    pub mixing: Option<ComplexField2D>,
    /// Centered at `k_x = +k₀`.
    pub plus_sideband: Option<ComplexField2D>,
    /// Centered at `k_x = −k₀`.
    pub minus_sideband: Option<ComplexField2D>,
}

impl AnalyticDiffraction {
    fn terms(&self) -> impl Iterator<Item = &ComplexField2D> {
        [&self.central, &self.mixing, &self.plus_sideband, &self.minus_sideband]
            .into_iter()
            .flatten()
    }

    /// Coherent sum of the included terms.
    pub fn amplitude(&self) -> ComplexField2D {
        let mut out = ComplexField2D::zeros(self.grid);
        for t in self.terms() {
            for (o, v) in out.values.iter_mut().zip(&t.values) {
                *o += v;
            }
        }
        out
    }

    /// `Σ|M̃ⱼ|²`, the intensity with cross terms dropped.
    pub fn incoherent_intensity(&self) -> ScalarField2D {
        let mut out = ScalarField2D { grid: self.grid, values: vec![0.0; self.grid.len()] };
        for t in self.terms() {
            for (o, v) in out.values.iter_mut().zip(&t.values) {
                *o += v.norm_sqr();
            }
        }
        out
    }

    pub fn sideband(&self, sideband: i32) -> Option<&ComplexField2D> {
        match sideband {
            1 => self.plus_sideband.as_ref(),
            -1 => self.minus_sideband.as_ref(),
            _ => None,
        }
    }
}

/// `i^{−q}`
fn i_pow_neg(q: u32) -> Complex64 {
    match q % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Hankel table sized for `grid` and the carrier offset.
pub fn hankel_table_for(spec: &MaskSpec, grid: &Grid2D) -> Result<ApertureHankelTable> {
    hankel_table_reaching(spec, grid.extent_x.hypot(grid.extent_y))
}

fn hankel_table_reaching(spec: &MaskSpec, k_reach: f64) -> Result<ApertureHankelTable> {
    let k_reach = k_reach + spec.k0;
    ApertureHankelTable::new(&[0, spec.m, spec.n, spec.m + spec.n], k_reach * spec.radius + 1.0)
}

/// Analytic continuous Fourier transform (kernel `e^{−ik·r}`) of the
/// circ-apertured mask, term by term.
pub fn analytic_fourier(
    spec: &MaskSpec,
    grid: &Grid2D,
    select: TermSelection,
) -> Result<AnalyticDiffraction> {
    analytic_fourier_offset(spec, grid, 0.0, select)
}

/// As [`analytic_fourier`], on a grid whose origin sits at
/// `k_x = center_kx` (e.g. a sideband crop).
pub fn analytic_fourier_offset(
    spec: &MaskSpec,
    grid: &Grid2D,
    center_kx: f64,
    select: TermSelection,
) -> Result<AnalyticDiffraction> {
    spec.validate()?;
    if spec.radial.is_some() {
        return invalid("radially modified masks have no analytic transform; use far_field");
    }
    if grid.space != Space::Momentum {
        return Err(Error::InvalidGrid("analytic transform needs a momentum grid".into()));
    }
    let table = hankel_table_reaching(spec, grid.extent_x.hypot(grid.extent_y) + center_kx.abs())?;
    let table = &table;
    let c = center_kx;
    let (m, n, kappa, radius, k0) = (spec.m, spec.n, spec.kappa, spec.radius, spec.k0);
    let two_pi = 2.0 * PI;

    let central = select.central.then(|| {
        ComplexField2D::from_fn(*grid, |kx, ky| {
            Complex64::new(6.0 * PI * table.eval(0, (kx + c).hypot(ky), radius), 0.0)
        })
    });
    let mixing = select.mixing.then(|| {
        let q = m + n;
        let phase = i_pow_neg(q);
        ComplexField2D::from_fn(*grid, |kx, ky| {
            let (k, xi) = to_polar(kx + c, ky);
            phase * (4.0 * PI * table.eval(q, k, radius) * (q as f64 * xi + kappa).cos())
        })
    });
    // +k₀: e^{ik₀x}(e^{−imφ−iκ} + e^{inφ}); −k₀: the complex conjugate pair
    let sideband = |s: f64| {
        ComplexField2D::from_fn(*grid, move |kx, ky| {
            let (k, xi) = to_polar(kx + c - s * k0, ky);
            let a = i_pow_neg(m) * Complex64::from_polar(table.eval(m, k, radius), -s * (m as f64 * xi + kappa));
            let b = i_pow_neg(n) * Complex64::from_polar(table.eval(n, k, radius), s * n as f64 * xi);
            (a + b) * two_pi
        })
    };
    Ok(AnalyticDiffraction {
        grid: *grid,
        central,
        mixing,
        plus_sideband: select.plus_sideband.then(|| sideband(1.0)),
        minus_sideband: select.minus_sideband.then(|| sideband(-1.0)),
    })
}
