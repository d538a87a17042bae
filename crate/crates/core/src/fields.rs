//! Sample lattices, sampled fields, physical constants and the abstract
//! two-component OAM superposition shared by both generation routes.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::specfun;

/// Whether a grid samples position or momentum space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Real,
    Momentum,
}

/// Unit tag carried by grids and stored in field files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Micrometers,
    InverseMicrometers,
    AtomicUnits,
}

impl Unit {
    pub fn tag(self) -> u8 {
        match self {
            Unit::Micrometers => 0,
            Unit::InverseMicrometers => 1,
            Unit::AtomicUnits => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Unit::Micrometers),
            1 => Ok(Unit::InverseMicrometers),
            2 => Ok(Unit::AtomicUnits),
            t => Err(Error::Format(format!("unknown unit tag {t}"))),
        }
    }

    /// Unit of the DFT-conjugate variable.
    pub fn reciprocal(self) -> Self {
        match self {
            Unit::Micrometers => Unit::InverseMicrometers,
            Unit::InverseMicrometers => Unit::Micrometers,
            Unit::AtomicUnits => Unit::AtomicUnits,
        }
    }

    /// The space a field with this unit naturally lives in. Atomic units are
    /// only used for momentum distributions here.
    pub fn natural_space(self) -> Space {
        match self {
            Unit::Micrometers => Space::Real,
            Unit::InverseMicrometers | Unit::AtomicUnits => Space::Momentum,
        }
    }
}

fn check_count(n: usize, axis: &str) -> Result<()> {
    if n < 16 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "{axis} sample count must be even and >= 16, got {n}"
        )));
    }
    Ok(())
}

fn check_extent(e: f64, axis: &str) -> Result<()> {
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::InvalidGrid(format!("{axis} extent must be positive, got {e}")));
    }
    Ok(())
}

/// Uniform Cartesian lattice centered on the origin.
///
/// `extent_*` are half-widths: sample `i` sits at `(i − nx/2)·dx` with
/// `dx = 2·extent_x/nx`, so index `nx/2` is the origin and the last sample is
/// at `extent_x − dx`. The DFT-conjugate grid returned by [`reciprocal`]
/// has `dk = 2π/(nx·dx)` and half-width `π/dx = π·nx/(2·extent_x)`.
///
/// [`reciprocal`]: Grid2D::reciprocal
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub extent_x: f64,
    pub extent_y: f64,
    pub space: Space,
    pub unit: Unit,
}

impl Grid2D {
    pub fn new(
        nx: usize,
        ny: usize,
        extent_x: f64,
        extent_y: f64,
        space: Space,
        unit: Unit,
    ) -> Result<Self> {
        check_count(nx, "x")?;
        check_count(ny, "y")?;
        check_extent(extent_x, "x")?;
        check_extent(extent_y, "y")?;
        Ok(Self { nx, ny, extent_x, extent_y, space, unit })
    }

    pub fn square(n: usize, extent: f64, space: Space, unit: Unit) -> Result<Self> {
        Self::new(n, n, extent, extent, space, unit)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.extent_x / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.extent_y / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Polar coordinates `(r, φ)` of sample `(i, j)`, `φ ∈ (−π, π]`.
    pub fn polar(&self, i: usize, j: usize) -> (f64, f64) {
        to_polar(self.x(i), self.y(j))
    }

    pub fn reciprocal(&self) -> Grid2D {
        Grid2D {
            nx: self.nx,
            ny: self.ny,
            extent_x: PI / self.dx(),
            extent_y: PI / self.dy(),
            space: match self.space {
                Space::Real => Space::Momentum,
                Space::Momentum => Space::Real,
            },
            unit: self.unit.reciprocal(),
        }
    }

    /// Largest radius whose full circle stays inside the interpolation
    /// domain.
    pub fn max_inscribed_radius(&self) -> f64 {
        (self.extent_x - 2.0 * self.dx()).min(self.extent_y - 2.0 * self.dy())
    }

    pub fn same_lattice(&self, other: &Grid2D) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.extent_x == other.extent_x
            && self.extent_y == other.extent_y
    }

    /// Bilinear interpolation of row-major samples at `(x, y)`; `None`
    /// outside the sampled square.
    pub fn bilinear<T>(&self, values: &[T], x: f64, y: f64) -> Option<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        let fx = x / self.dx() + (self.nx / 2) as f64;
        let fy = y / self.dy() + (self.ny / 2) as f64;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let i0 = fx.floor() as usize;
        let j0 = fy.floor() as usize;
        if i0 + 1 >= self.nx || j0 + 1 >= self.ny {
            return None;
        }
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let v00 = values[self.index(i0, j0)];
        let v10 = values[self.index(i0 + 1, j0)];
        let v01 = values[self.index(i0, j0 + 1)];
        let v11 = values[self.index(i0 + 1, j0 + 1)];
        Some(
            v00 * ((1.0 - tx) * (1.0 - ty))
                + v10 * (tx * (1.0 - ty))
                + v01 * ((1.0 - tx) * ty)
                + v11 * (tx * ty),
        )
    }
}

/// `(r, φ)` with `φ` in `(−π, π]`.
#[inline]
pub fn to_polar(x: f64, y: f64) -> (f64, f64) {
    let mut phi = y.atan2(x);
    if phi <= -PI {
        phi = PI;
    }
    (x.hypot(y), phi)
}

fn fill_rows<T, F>(grid: &Grid2D, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(f64, f64) -> T + Sync,
{
    let mut values = vec![T::default(); grid.len()];
    values
        .par_chunks_mut(grid.nx)
        .enumerate()
        .for_each(|(j, row)| {
            let y = grid.y(j);
            for (i, v) in row.iter_mut().enumerate() {
                *v = f(grid.x(i), y);
            }
        });
    values
}

/// Complex samples on a [`Grid2D`], row-major (`index = j·nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(x, y)` at every node; rows are filled in parallel.
    pub fn from_fn<F>(grid: Grid2D, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        Self { grid, values: fill_rows(&grid, f) }
    }

    pub fn from_real(field: &ScalarField2D) -> Self {
        Self {
            grid: field.grid,
            values: field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn intensity(&self) -> ScalarField2D {
        ScalarField2D {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn interpolate(&self, x: f64, y: f64) -> Option<Complex64> {
        self.grid.bilinear(&self.values, x, y)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `Σ|ψ|²·dx·dy`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx() * self.grid.dy()
    }

    /// Copy scaled to unit `L²` norm. Fields are stored unnormalized
    /// everywhere else.
    pub fn l2_normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numeric("cannot normalize a zero field".into()));
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v / norm).collect(),
        })
    }
}

/// Real samples on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl ScalarField2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F>(grid: Grid2D, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        Self { grid, values: fill_rows(&grid, f) }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn interpolate(&self, x: f64, y: f64) -> Option<f64> {
        self.grid.bilinear(&self.values, x, y)
    }
}

/// Uniform 3D lattice, same centering rules as [`Grid2D`] on every axis.
/// Storage order is `index = (k·ny + j)·nx + i` (z slowest).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3D {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub extent: [f64; 3],
    pub space: Space,
    pub unit: Unit,
}

impl Grid3D {
    pub fn new(n: [usize; 3], extent: [f64; 3], space: Space, unit: Unit) -> Result<Self> {
        for (axis, (&c, &e)) in ["x", "y", "z"].iter().zip(n.iter().zip(extent.iter())) {
            check_count(c, axis)?;
            check_extent(e, axis)?;
        }
        Ok(Self { nx: n[0], ny: n[1], nz: n[2], extent, space, unit })
    }

    pub fn cube(n: usize, extent: f64, space: Space, unit: Unit) -> Result<Self> {
        Self::new([n; 3], [extent; 3], space, unit)
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            2.0 * self.extent[0] / self.nx as f64,
            2.0 * self.extent[1] / self.ny as f64,
            2.0 * self.extent[2] / self.nz as f64,
        ]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ny + j) * self.nx + i
    }

    #[inline]
    pub fn coord(&self, axis: usize, idx: usize) -> f64 {
        let n = [self.nx, self.ny, self.nz][axis];
        (idx as f64 - (n / 2) as f64) * self.spacing()[axis]
    }

    /// The x–y plane of this grid.
    pub fn xy_plane(&self) -> Grid2D {
        Grid2D {
            nx: self.nx,
            ny: self.ny,
            extent_x: self.extent[0],
            extent_y: self.extent[1],
            space: self.space,
            unit: self.unit,
        }
    }

    pub fn voxel_volume(&self) -> f64 {
        let s = self.spacing();
        s[0] * s[1] * s[2]
    }
}

/// Real samples on a [`Grid3D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3D {
    pub grid: Grid3D,
    pub values: Vec<f64>,
}

impl ScalarField3D {
    pub fn new(grid: Grid3D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!("{} values for a {} voxel grid", values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y, z)`; z-slabs are filled in parallel.
    pub fn from_fn<F>(grid: Grid3D, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Sync,
    {
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(grid.nx * grid.ny)
            .enumerate()
            .for_each(|(k, slab)| {
                let z = grid.coord(2, k);
                for j in 0..grid.ny {
                    let y = grid.coord(1, j);
                    for i in 0..grid.nx {
                        slab[j * grid.nx + i] = f(grid.coord(0, i), y, z);
                    }
                }
            });
        Self { grid, values }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The x–y plane at z-index `k`.
    pub fn xy_slice(&self, k: usize) -> ScalarField2D {
        let plane = self.grid.nx * self.grid.ny;
        ScalarField2D {
            grid: self.grid.xy_plane(),
            values: self.values[k * plane..(k + 1) * plane].to_vec(),
        }
    }
}

/// Which formula set the constants belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    /// Lengths in µm, times in fs, masses in kg: `ħ/m_e` in µm²/fs.
    SiMicron,
    /// Hartree atomic units.
    Atomic,
}

/// One femtosecond in atomic units of time.
pub const FS_IN_AU: f64 = 1.0 / 0.024_188_843_265_857;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub electron_mass: f64,
    pub system: UnitSystem,
}

impl PhysicalConstants {
    pub fn atomic() -> Self {
        Self { hbar: 1.0, electron_mass: 1.0, system: UnitSystem::Atomic }
    }

    /// ħ in kg·µm²/fs and `m_e` in kg.
    pub fn si_micron() -> Self {
        Self {
            hbar: 1.054_571_817e-34 * 1e12 * 1e-15,
            electron_mass: 9.109_383_701_5e-31,
            system: UnitSystem::SiMicron,
        }
    }

    pub fn hbar_over_mass(&self) -> f64 {
        self.hbar / self.electron_mass
    }
}

/// Radial weight `G(k)` of a superposition state.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `∫₀ᴿ J_q(kr) r dr`, the far-field radial profile of a
    /// circ-apertured `e^{iqφ}` component.
    ApertureHankel { order: u32, radius: f64 },
    /// `exp(−(k − center)²/(2σ²))`.
    Gaussian { center: f64, sigma: f64 },
    /// Piecewise-linear table, zero outside `[k₀, k_last]`.
    Tabulated { k: Vec<f64>, g: Vec<f64> },
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::ApertureHankel { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return invalid("aperture radius must be positive");
                }
            }
            RadialProfile::Gaussian { center, sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) || !center.is_finite() {
                    return invalid("gaussian radial profile needs finite center and sigma > 0");
                }
            }
            RadialProfile::Tabulated { k, g } => {
                if k.len() != g.len() || k.len() < 2 {
                    return invalid("tabulated radial profile needs >= 2 (k, g) pairs");
                }
                if k.windows(2).any(|w| !(w[1] > w[0])) {
                    return invalid("tabulated radial profile: k must be strictly increasing");
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, k: f64) -> f64 {
        match self {
            RadialProfile::ApertureHankel { order, radius } => {
                specfun::aperture_hankel_series(*order, k, *radius)
            }
            RadialProfile::Gaussian { center, sigma } => {
                let d = (k - center) / sigma;
                (-0.5 * d * d).exp()
            }
            RadialProfile::Tabulated { k: ks, g } => interp_linear(ks, g, k),
        }
    }
}

pub(crate) fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let hi = xs.partition_point(|&v| v < x).max(1).min(xs.len() - 1);
    let (x0, x1) = (xs[hi - 1], xs[hi]);
    let t = (x - x0) / (x1 - x0);
    ys[hi - 1] * (1.0 - t) + ys[hi] * t
}

/// `Ψ(k, ξ) = G(k)(β₀e^{iγ}e^{imξ} + e^{−inξ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionSpec {
    pub m: u32,
    pub n: u32,
    pub beta0: f64,
    pub gamma: f64,
    pub radial: RadialProfile,
}

impl SuperpositionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m + self.n < 1 {
            return invalid("m + n must be at least 1");
        }
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            return invalid(format!("beta0 must be positive, got {}", self.beta0));
        }
        if !self.gamma.is_finite() {
            return invalid("gamma must be finite");
        }
        self.radial.validate()
    }

    /// The angular factor `β₀e^{iγ}e^{imξ} + e^{−inξ}`.
    #[inline]
    pub fn angular(&self, xi: f64) -> Complex64 {
        Complex64::from_polar(self.beta0, self.gamma + self.m as f64 * xi)
            + Complex64::from_polar(1.0, -(self.n as f64) * xi)
    }

    #[inline]
    pub fn amplitude(&self, k: f64, xi: f64) -> Complex64 {
        self.angular(xi) * self.radial.eval(k)
    }
}

/// Samples the superposition state on a momentum grid.
pub fn eval_superposition(spec: &SuperpositionSpec, grid: &Grid2D) -> Result<ComplexField2D> {
    spec.validate()?;
    if grid.space != Space::Momentum {
        return Err(Error::InvalidGrid("superposition states live on a momentum grid".into()));
    }
    Ok(ComplexField2D::from_fn(*grid, |kx, ky| {
        let (k, xi) = to_polar(kx, ky);
        spec.amplitude(k, xi)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kgrid(n: usize, e: f64) -> Grid2D {
        Grid2D::square(n, e, Space::Momentum, Unit::InverseMicrometers).unwrap()
    }

    fn flat(m: u32, n: u32, beta0: f64, gamma: f64) -> SuperpositionSpec {
        SuperpositionSpec {
            m,
            n,
            beta0,
            gamma,
            radial: RadialProfile::Tabulated { k: vec![0.0, 1e9], g: vec![1.0, 1.0] },
        }
    }

    #[test]
    fn grid_spacing_and_reciprocal() {
        let g = Grid2D::square(1024, 2.0, Space::Real, Unit::Micrometers).unwrap();
        assert_eq!(g.dx(), 3.90625e-3);
        assert_eq!(g.x(512), 0.0);
        let r = g.reciprocal();
        let dk = 2.0 * PI / (1024.0 * g.dx());
        assert!((r.dx() - dk).abs() < 1e-12 * dk);
        assert_eq!(r.space, Space::Momentum);
        assert_eq!(r.unit, Unit::InverseMicrometers);
    }

    #[test]
    fn grid_rejects_odd_or_tiny_counts() {
        assert!(Grid2D::square(16, 1.0, Space::Real, Unit::Micrometers).is_ok());
        assert!(Grid2D::new(15, 16, 1.0, 1.0, Space::Real, Unit::Micrometers).is_err());
        assert!(Grid2D::new(8, 8, 1.0, 1.0, Space::Real, Unit::Micrometers).is_err());
        assert!(Grid2D::new(16, 16, 0.0, 1.0, Space::Real, Unit::Micrometers).is_err());
    }

    #[test]
    fn polar_branch() {
        let (_, phi) = to_polar(-1.0, 0.0);
        assert_eq!(phi, PI);
        let (_, phi) = to_polar(-1.0, -0.0);
        assert_eq!(phi, PI);
        let (r, _) = to_polar(3.0, 4.0);
        assert_eq!(r, 5.0);
    }

    #[test]
    fn two_fold_density_for_unit_charges() {
        let spec = flat(1, 1, 1.0, 0.0);
        for xi in [0.0, 0.3, 1.2, 2.9] {
            let rho = spec.angular(xi).norm_sqr();
            assert!((rho - 2.0 * (1.0 + (2.0 * xi).cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn seven_fold_density_formula() {
        let spec = flat(4, 3, 1.0, 0.0);
        for j in 0..50 {
            let xi = -PI + j as f64 * 0.1257;
            let rho = spec.angular(xi).norm_sqr();
            assert!((rho - 2.0 * (1.0 + (7.0 * xi).cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn unequal_amplitudes_pointwise() {
        // |2e^{4iξ} + e^{−3iξ}|² evaluated independently.
        let spec = flat(4, 3, 2.0, 0.0);
        let direct = |xi: f64| {
            let re = 2.0 * (4.0 * xi).cos() + (3.0 * xi).cos();
            let im = 2.0 * (4.0 * xi).sin() - (3.0 * xi).sin();
            re * re + im * im
        };
        let r0 = spec.angular(0.0).norm_sqr();
        let r1 = spec.angular(PI / 7.0).norm_sqr();
        assert!((r0 - 9.0).abs() < 1e-12);
        assert!((r1 - direct(PI / 7.0)).abs() < 1e-12);
        assert!((r0 / r1 - 9.0).abs() < 1e-9);
    }

    #[test]
    fn value_at_origin() {
        let g = kgrid(32, 1.0);
        let spec = SuperpositionSpec {
            radial: RadialProfile::Gaussian { center: 0.0, sigma: 1.0 },
            ..flat(2, 1, 1.5, 0.7)
        };
        let f = eval_superposition(&spec, &g).unwrap();
        let v = f.at(16, 16);
        let expect = Complex64::from_polar(1.5, 0.7) + 1.0;
        assert!((v - expect).norm() < 1e-14);

        let hollow = SuperpositionSpec {
            radial: RadialProfile::ApertureHankel { order: 3, radius: 1.0 },
            ..spec
        };
        let f = eval_superposition(&hollow, &g).unwrap();
        assert_eq!(f.at(16, 16).norm(), 0.0);
    }

    #[test]
    fn rejects_real_space_grid() {
        let g = Grid2D::square(16, 1.0, Space::Real, Unit::Micrometers).unwrap();
        assert!(eval_superposition(&flat(1, 0, 1.0, 0.0), &g).is_err());
        assert!(flat(0, 0, 1.0, 0.0).validate().is_err());
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let p = RadialProfile::Tabulated { k: vec![0.0, 1.0, 2.0], g: vec![0.0, 2.0, 0.0] };
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(1.5), 1.0);
        assert_eq!(p.eval(2.5), 0.0);
        let bad = RadialProfile::Tabulated { k: vec![0.0, 0.0], g: vec![1.0, 1.0] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn bilinear_reproduces_affine_functions() {
        let g = kgrid(16, 1.0);
        let f = ScalarField2D::from_fn(g, |x, y| 2.0 * x - 3.0 * y + 1.0);
        let v = f.interpolate(0.123, -0.311).unwrap();
        assert!((v - (2.0 * 0.123 + 3.0 * 0.311 + 1.0)).abs() < 1e-12);
        assert!(f.interpolate(0.99, 0.0).is_none());
    }

    #[test]
    fn normalization_utility() {
        let g = kgrid(32, 2.0);
        let f = ComplexField2D::from_fn(g, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.0));
        let n = f.l2_normalized().unwrap();
        assert!((n.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(ComplexField2D::zeros(g).l2_normalized().is_err());
    }

    #[test]
    fn atomic_constants_are_unity() {
        let c = PhysicalConstants::atomic();
        assert_eq!((c.hbar, c.electron_mass), (1.0, 1.0));
        let si = PhysicalConstants::si_micron();
        // ħ/m_e = 1.15768e-4 m²/s = 1.15768e-7 µm²/fs
        assert!((si.hbar_over_mass() / 1.157_676_5e-7 - 1.0).abs() < 1e-6);
    }
}
