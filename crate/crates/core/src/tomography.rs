//! Forward projection about the grid y axis and slice-by-slice Fourier
//! reconstruction.
//!
//! A projection at angle `a` is the line sum along z of the density turned
//! by `a` about y, so projecting a density that was already turned by `δ`
//! equals projecting the original at `a + δ`. Each x–z slice is rebuilt
//! independently: padded 1D transforms of the projection rows are
//! interpolated in angle, scattered bilinearly onto a Cartesian frequency
//! grid with polar area weights, the grid is inverted, and the hat-kernel
//! apodization is divided out.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use crate::diffraction::centered_fft2;
use crate::error::{invalid, Error, Result};
use crate::fields::{Grid2D, Grid3D, ScalarField2D, ScalarField3D};

/// Projections of one density, all on the same detector grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    angles: Vec<f64>,
    images: Vec<ScalarField2D>,
}

impl ProjectionSet {
    pub fn new(angles: Vec<f64>, images: Vec<ScalarField2D>) -> Result<Self> {
        if angles.len() != images.len() {
            return invalid(format!("{} angles for {} images", angles.len(), images.len()));
        }
        if angles.is_empty() {
            return invalid("empty projection set");
        }
        if angles.iter().any(|a| !(0.0..PI).contains(a)) {
            return invalid("projection angles must lie in [0, pi)");
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("projection angles must be strictly increasing");
        }
        let grid = images[0].grid;
        if images.iter().any(|im| im.grid != grid) {
            return Err(Error::InvalidGrid("projection images use different grids".into()));
        }
        if images.iter().any(|im| im.values.iter().any(|v| !(*v >= 0.0))) {
            return invalid("projection images must be nonnegative");
        }
        Ok(Self { angles, images })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn images(&self) -> &[ScalarField2D] {
        &self.images
    }

    pub fn grid(&self) -> &Grid2D {
        &self.images[0].grid
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `count` angles starting at 0 with spacing `step` (all below π).
pub fn uniform_angles(count: usize, step: f64) -> Result<Vec<f64>> {
    if count == 0 || !(step > 0.0) || step * (count - 1) as f64 >= PI {
        return invalid(format!("{count} angles of {step} rad do not fit in [0, pi)"));
    }
    Ok((0..count).map(|i| i as f64 * step).collect())
}

fn check_cubic(grid: &Grid3D) -> Result<()> {
    if grid.nx != grid.nz || grid.extent[0] != grid.extent[2] {
        return Err(Error::InvalidGrid("tomography needs equal x and z sampling".into()));
    }
    Ok(())
}

/// Trilinear sample; zero outside the grid.
fn trilinear(field: &ScalarField3D, x: f64, y: f64, z: f64) -> f64 {
    let g = &field.grid;
    let s = g.spacing();
    let fx = x / s[0] + (g.nx / 2) as f64;
    let fy = y / s[1] + (g.ny / 2) as f64;
    let fz = z / s[2] + (g.nz / 2) as f64;
    let (i0, j0, k0) = (fx.floor(), fy.floor(), fz.floor());
    let (tx, ty, tz) = (fx - i0, fy - j0, fz - k0);
    let mut acc = 0.0;
    for (dk, wz) in [(0, 1.0 - tz), (1, tz)] {
        let k = k0 as isize + dk;
        if wz == 0.0 || k < 0 || k >= g.nz as isize {
            continue;
        }
        for (dj, wy) in [(0, 1.0 - ty), (1, ty)] {
            let j = j0 as isize + dj;
            if wy == 0.0 || j < 0 || j >= g.ny as isize {
                continue;
            }
            for (di, wx) in [(0, 1.0 - tx), (1, tx)] {
                let i = i0 as isize + di;
                if wx == 0.0 || i < 0 || i >= g.nx as isize {
                    continue;
                }
                acc += wx * wy * wz * field.values[g.index(i as usize, j as usize, k as usize)];
            }
        }
    }
    acc
}

/// Turns the density by `angle` about the y axis (x toward z).
pub fn rotate_about_y(density: &ScalarField3D, angle: f64) -> ScalarField3D {
    let (s, c) = angle.sin_cos();
    ScalarField3D::from_fn(density.grid, |x, y, z| trilinear(density, c * x + s * z, y, -s * x + c * z))
}

/// Line sums along z of the density turned by `angle` about y. The image
/// lives on the x–y plane of the density grid.
pub fn project(density: &ScalarField3D, angle: f64) -> Result<ScalarField2D> {
    let g = density.grid;
    check_cubic(&g)?;
    let (s, c) = angle.sin_cos();
    let plane = g.xy_plane();
    let mut values = vec![0.0; plane.len()];
    values.par_chunks_mut(g.nx).enumerate().for_each(|(j, row)| {
        let y = g.coord(1, j);
        for (i, v) in row.iter_mut().enumerate() {
            let x = g.coord(0, i);
            *v = (0..g.nz)
                .map(|k| {
                    let z = g.coord(2, k);
                    trilinear(density, c * x + s * z, y, -s * x + c * z)
                })
                .sum();
        }
    });
    ScalarField2D::new(plane, values)
}

/// Projections at every angle.
pub fn project_all(density: &ScalarField3D, angles: &[f64]) -> Result<ProjectionSet> {
    let images = angles.iter().map(|&a| project(density, a)).collect::<Result<Vec<_>>>()?;
    ProjectionSet::new(angles.to_vec(), images)
}

/// Unit-density ball of `radius` about the origin. Each voxel holds its
/// covered fraction, estimated on a `supersample³` sub-lattice, so the
/// surface is not a staircase.
pub fn uniform_ball(grid: Grid3D, radius: f64, supersample: usize) -> Result<ScalarField3D> {
    if !(radius > 0.0) || supersample == 0 {
        return invalid("ball needs a positive radius and supersample >= 1");
    }
    let s = grid.spacing();
    let offsets: Vec<f64> = (0..supersample).map(|t| (t as f64 + 0.5) / supersample as f64 - 0.5).collect();
    let r2 = radius * radius;
    let norm = (supersample * supersample * supersample) as f64;
    Ok(ScalarField3D::from_fn(grid, |x, y, z| {
        let mut inside = 0usize;
        for &oz in &offsets {
            for &oy in &offsets {
                for &ox in &offsets {
                    let (px, py, pz) = (x + ox * s[0], y + oy * s[1], z + oz * s[2]);
                    if px * px + py * py + pz * pz <= r2 {
                        inside += 1;
                    }
                }
            }
        }
        inside as f64 / norm
    }))
}

/// Swaps the y and z axes, putting a z-aligned symmetry axis on the
/// rotation axis.
pub fn swap_yz(density: &ScalarField3D) -> Result<ScalarField3D> {
    let g = density.grid;
    let out_grid = Grid3D::new([g.nx, g.nz, g.ny], [g.extent[0], g.extent[2], g.extent[1]], g.space, g.unit)?;
    let mut values = vec![0.0; g.len()];
    for k in 0..g.nz {
        for j in 0..g.ny {
            for i in 0..g.nx {
                values[out_grid.index(i, k, j)] = density.values[g.index(i, j, k)];
            }
        }
    }
    ScalarField3D::new(out_grid, values)
}

/// The x–z plane at y-index `j` (x fastest, z as the second axis).
pub fn xz_slice(density: &ScalarField3D, j: usize) -> ScalarField2D {
    let g = density.grid;
    let grid = Grid2D {
        nx: g.nx,
        ny: g.nz,
        extent_x: g.extent[0],
        extent_y: g.extent[2],
        space: g.space,
        unit: g.unit,
    };
    let mut values = Vec::with_capacity(g.nx * g.nz);
    for k in 0..g.nz {
        for i in 0..g.nx {
            values.push(density.values[g.index(i, j, k)]);
        }
    }
    ScalarField2D { grid, values }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Clamped density (nonnegative).
    pub density: ScalarField3D,
    /// Total mass before clamping, in the units of the phantom sum.
    pub raw_mass: f64,
    /// Removed negative mass over the positive mass.
    pub clamped_fraction: f64,
}

/// Bracketing measured lines for a dense angle `b` in `[0, π)`: indices,
/// whether each must be mirrored (`a + π` is line `a` at `−ω`), and the
/// linear weight of the upper line.
fn bracket(angles: &[f64], b: f64) -> ((usize, bool), (usize, bool), f64) {
    let n = angles.len();
    let upper = angles.partition_point(|&a| a <= b);
    let (lo, lo_angle, lo_flip) = if upper == 0 { (n - 1, angles[n - 1] - PI, true) } else { (upper - 1, angles[upper - 1], false) };
    let (hi, hi_angle, hi_flip) = if upper == n { (0, angles[0] + PI, true) } else { (upper, angles[upper], false) };
    let t = (b - lo_angle) / (hi_angle - lo_angle);
    ((lo, lo_flip), (hi, hi_flip), t)
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-12 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Zero padding factor of the projection rows and the frequency grid.
const PAD: usize = 4;

/// Rebuilds every x–z slice. The measured lines are first interpolated
/// linearly in angle (with the `a + π ↔ −ω` mirror) onto an angle set dense
/// enough that neighbouring lines are at most one frequency cell apart at
/// the band edge; those lines are then gridded with ramp weights.
pub fn fourier_slice_reconstruct(projections: &ProjectionSet) -> Result<Reconstruction> {
    if projections.len() < 2 {
        return invalid("reconstruction needs at least two projection angles");
    }
    let plane = *projections.grid();
    let n = plane.nx;
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid("detector width must be even".into()));
    }
    let grid = Grid3D::new([n, plane.ny, n], [plane.extent_x, plane.extent_y, plane.extent_x], plane.space, plane.unit)?;
    let dx = plane.dx();
    let np = PAD * n;
    let half = np / 2;
    let dw = 2.0 * PI / (np as f64 * dx);
    let lines = ((PI * half as f64).ceil() as usize).max(projections.len());
    let dense_step = PI / lines as f64;
    let dense: Vec<_> = (0..lines)
        .map(|l| {
            let b = l as f64 * dense_step;
            (b.sin_cos(), bracket(projections.angles(), b))
        })
        .collect();

    let fft1 = FftPlanner::<f64>::new().plan_fft(np, FftDirection::Forward);
    // hat-kernel apodization of the gridding step, one factor per axis
    let apod: Vec<f64> = (0..n).map(|i| sinc(grid.coord(0, i) * dw / 2.0).powi(2)).collect();
    // P̂ carries dx² (row sum times dx), areas carry dω², and the inverse
    // integral 1/(2π)²: together 1/np²
    let scale = 1.0 / (np * np) as f64;

    let slices: Vec<Vec<f64>> = (0..plane.ny)
        .into_par_iter()
        .map(|j| {
            // spectra of this detector row at every measured angle, indexed
            // by ω/dω + half
            let spectra: Vec<Vec<Complex64>> = projections
                .images()
                .iter()
                .map(|image| {
                    let mut row = vec![Complex64::new(0.0, 0.0); np];
                    // the row origin lands on index 0 of the unshifted buffer
                    for i in 0..n {
                        row[(i + np - n / 2) % np] = Complex64::new(image.values[j * n + i], 0.0);
                    }
                    fft1.process(&mut row);
                    (0..np).map(|q| row[(q + half) % np]).collect()
                })
                .collect();
            let at = |(a, flip): (usize, bool), q: usize| if flip { spectra[a][(np - q) % np] } else { spectra[a][q] };

            let mut accum = vec![Complex64::new(0.0, 0.0); np * np];
            for &((s, c), (lo, hi, t)) in &dense {
                for q in 1..np {
                    let w = q as isize - half as isize;
                    let area = if w == 0 { 0.25 * dense_step } else { w.unsigned_abs() as f64 * dense_step };
                    let contrib = (at(lo, q) * (1.0 - t) + at(hi, q) * t) * area;
                    // frequency point ω(cos b, −sin b) in (k_x, k_z)
                    let fx = w as f64 * c + half as f64;
                    let fz = -(w as f64) * s + half as f64;
                    let (i0, k0) = (fx.floor(), fz.floor());
                    let (tx, tz) = (fx - i0, fz - k0);
                    let (i0, k0) = (i0 as usize, k0 as usize);
                    for (dk, wz) in [(0, 1.0 - tz), (1, tz)] {
                        for (di, wx) in [(0, 1.0 - tx), (1, tx)] {
                            let (ii, kk) = (i0 + di, k0 + dk);
                            if ii < np && kk < np {
                                accum[kk * np + ii] += contrib * (wx * wz);
                            }
                        }
                    }
                }
            }
            let img = centered_fft2(&accum, np, np, FftDirection::Inverse);
            let off = half - n / 2;
            let mut out = vec![0.0; n * n];
            for k in 0..n {
                for i in 0..n {
                    out[k * n + i] = img[(k + off) * np + i + off].re * scale / (apod[i] * apod[k]);
                }
            }
            out
        })
        .collect();

    let mut values = vec![0.0; grid.len()];
    for (j, slice) in slices.iter().enumerate() {
        for k in 0..n {
            for i in 0..n {
                values[grid.index(i, j, k)] = slice[k * n + i];
            }
        }
    }
    let raw_mass: f64 = values.iter().sum();
    let negative: f64 = values.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    let positive: f64 = values.iter().filter(|v| **v > 0.0).sum();
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    let clamped_fraction = if positive > 0.0 { negative / positive } else { 0.0 };
    if clamped_fraction > 0.1 {
        log::warn!("reconstruction clamped {:.1}% of its mass", 100.0 * clamped_fraction);
    }
    Ok(Reconstruction { density: ScalarField3D::new(grid, values)?, raw_mass, clamped_fraction })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialScaling {
    /// Detector radius proportional to momentum (identity).
    KLinear,
    /// Radius proportional to energy: `r' = r²/r_max`.
    EnergyLinear,
}

/// Radial-only resampling of a centered detector image. Counts per area
/// are carried through the Jacobian `r_max/(2r')`.
pub fn vmi_radial_remap(image: &ScalarField2D, mode: RadialScaling) -> ScalarField2D {
    match mode {
        RadialScaling::KLinear => image.clone(),
        RadialScaling::EnergyLinear => {
            let g = image.grid;
            let r_max = g.extent_x.min(g.extent_y);
            let r_floor = 0.5 * g.dx().min(g.dy());
            ScalarField2D::from_fn(g, |x, y| {
                let rp = x.hypot(y);
                let r = (rp * r_max).sqrt();
                let scale = if rp > 0.0 { r / rp } else { 0.0 };
                let v = image.interpolate(x * scale, y * scale).unwrap_or(0.0);
                v * r_max / (2.0 * rp.max(r_floor))
            })
        }
    }
}
