//! Far-field propagation by centered 2D DFT and sideband analysis.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::fields::{ComplexField2D, Grid2D, ScalarField2D, Space};
use crate::mask::{self, MaskSpec, TermSelection};
use crate::specfun::J1_FIRST_ZERO;

/// Rows processed by one rayon task; chosen for cache reuse, not for
/// correctness (each row is transformed independently).
const ROWS_PER_TASK: usize = 8;

fn transform_rows(data: &mut [Complex64], len: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(len * ROWS_PER_TASK).for_each(|block| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        for row in block.chunks_exact_mut(len) {
            fft.process_with_scratch(row, &mut scratch);
        }
    });
}

fn transpose(src: &[Complex64], nx: usize, ny: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    out.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
        for (j, v) in col.iter_mut().enumerate() {
            *v = src[j * nx + i];
        }
    });
    out
}

/// Unnormalized 2D DFT of row-major `data` (`nx` fastest).
pub fn fft2(data: &mut Vec<Complex64>, nx: usize, ny: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(nx, direction);
    transform_rows(data, nx, &row_fft);
    let mut t = transpose(data, nx, ny);
    let col_fft = planner.plan_fft(ny, direction);
    transform_rows(&mut t, ny, &col_fft);
    *data = transpose(&t, ny, nx);
}

/// Swaps half-planes so that index `n/2` moves to 0 (identical to its own
/// inverse for even sizes).
pub fn half_shift2(data: &[Complex64], nx: usize, ny: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    let (hx, hy) = (nx / 2, ny / 2);
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let sj = (j + hy) % ny;
        for (i, v) in row.iter_mut().enumerate() {
            *v = data[sj * nx + (i + hx) % nx];
        }
    });
    out
}

/// Centered transform: origin at index `n/2` on both sides.
pub fn centered_fft2(data: &[Complex64], nx: usize, ny: usize, direction: FftDirection) -> Vec<Complex64> {
    let mut work = half_shift2(data, nx, ny);
    fft2(&mut work, nx, ny, direction);
    half_shift2(&work, nx, ny)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FarFieldOptions {
    /// Zero-pad to twice the size before transforming, halving `dk`.
    pub pad: bool,
}

/// Far-field amplitude and intensity on the reciprocal grid.
#[derive(Debug, Clone)]
pub struct DiffractionResult {
    pub amplitude: ComplexField2D,
    pub intensity: ScalarField2D,
    pub source: Grid2D,
}

impl DiffractionResult {
    pub fn grid(&self) -> &Grid2D {
        &self.amplitude.grid
    }
}

pub fn far_field(mask: &ScalarField2D) -> Result<DiffractionResult> {
    far_field_complex_with(&ComplexField2D::from_real(mask), FarFieldOptions::default())
}

pub fn far_field_complex(mask: &ComplexField2D) -> Result<DiffractionResult> {
    far_field_complex_with(mask, FarFieldOptions::default())
}

/// Continuous-FT approximation `Σ M(r)e^{−ik·r}·dx·dy` on the reciprocal grid.
pub fn far_field_complex_with(mask: &ComplexField2D, opts: FarFieldOptions) -> Result<DiffractionResult> {
    let src = mask.grid;
    if src.space != Space::Real {
        return Err(Error::InvalidGrid("far_field expects a real-space mask".into()));
    }
    if !mask.is_finite() {
        return Err(Error::Numeric("mask contains non-finite samples".into()));
    }
    let (input, grid) = if opts.pad {
        let g = Grid2D::new(2 * src.nx, 2 * src.ny, 2.0 * src.extent_x, 2.0 * src.extent_y, src.space, src.unit)?;
        let mut padded = vec![Complex64::new(0.0, 0.0); g.len()];
        let (ox, oy) = (src.nx / 2, src.ny / 2);
        for j in 0..src.ny {
            let dst = (j + oy) * g.nx + ox;
            padded[dst..dst + src.nx].copy_from_slice(&mask.values[j * src.nx..(j + 1) * src.nx]);
        }
        (padded, g)
    } else {
        (mask.values.clone(), src)
    };
    let scale = grid.dx() * grid.dy();
    let mut values = centered_fft2(&input, grid.nx, grid.ny, FftDirection::Forward);
    values.par_iter_mut().for_each(|v| *v *= scale);
    let amplitude = ComplexField2D::new(grid.reciprocal(), values)?;
    let intensity = amplitude.intensity();
    Ok(DiffractionResult { amplitude, intensity, source: src })
}

/// Index of the sample nearest to coordinate `c` along an axis.
fn nearest_index(c: f64, spacing: f64, n: usize) -> isize {
    (c / spacing).round() as isize + (n / 2) as isize
}

/// Square crop around `(center_kx, 0)` large enough to hold a disc of
/// `window_radius`; the center is snapped to the nearest sample and the
/// crop's coordinates are relative to it.
pub fn extract_sideband(result: &DiffractionResult, center_kx: f64, window_radius: f64) -> Result<ComplexField2D> {
    crop_centered(&result.amplitude, center_kx, window_radius)
}

pub fn crop_centered(field: &ComplexField2D, center_kx: f64, window_radius: f64) -> Result<ComplexField2D> {
    let g = field.grid;
    if !(window_radius > 0.0) {
        return Err(Error::InvalidArgument("window radius must be positive".into()));
    }
    let half = ((window_radius / g.dx().min(g.dy())).ceil() as usize + 1).max(8);
    let ci = nearest_index(center_kx, g.dx(), g.nx);
    let cj = (g.ny / 2) as isize;
    let (lo_i, lo_j) = (ci - half as isize, cj - half as isize);
    if lo_i < 0 || lo_j < 0 || ci + half as isize > g.nx as isize || cj + half as isize > g.ny as isize {
        return Err(Error::OutOfDomain(format!(
            "sideband window of radius {window_radius} around k_x = {center_kx}"
        )));
    }
    let size = 2 * half;
    let crop = Grid2D::new(size, size, half as f64 * g.dx(), half as f64 * g.dy(), g.space, g.unit)?;
    let mut values = Vec::with_capacity(crop.len());
    for j in 0..size {
        let row = (lo_j as usize + j) * g.nx + lo_i as usize;
        values.extend_from_slice(&field.values[row..row + size]);
    }
    ComplexField2D::new(crop, values)
}

/// Actual `k_x` of the sample a crop around `center_kx` is centered on.
pub fn snapped_center(grid: &Grid2D, center_kx: f64) -> f64 {
    (nearest_index(center_kx, grid.dx(), grid.nx) - (grid.nx / 2) as isize) as f64 * grid.dx()
}

/// `‖a − b‖₂/‖b‖₂`.
pub fn nrmse(a: &[f64], b: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den).sqrt()
}

/// NRMSE restricted to the disc of `radius` around the grid origin.
pub fn nrmse_in_disc(a: &ScalarField2D, b: &ScalarField2D, radius: f64) -> Result<f64> {
    if !a.grid.same_lattice(&b.grid) {
        return Err(Error::InvalidGrid("nrmse of fields on different grids".into()));
    }
    let g = a.grid;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for j in 0..g.ny {
        for i in 0..g.nx {
            if g.x(i).hypot(g.y(j)) <= radius {
                xs.push(a.at(i, j));
                ys.push(b.at(i, j));
            }
        }
    }
    Ok(nrmse(&xs, &ys))
}

/// Default sideband comparison radius: `0.4·k₀`, but never narrower than
/// the central lobe of the aperture transform.
pub fn sideband_window(spec: &MaskSpec) -> f64 {
    (0.4 * spec.k0).max(2.0 * J1_FIRST_ZERO / spec.radius)
}

/// Numeric sideband intensity and the analytic `|M̃|²` of the same
/// sideband on a shared crop.
#[derive(Debug, Clone)]
pub struct SidebandComparison {
    pub numeric: ScalarField2D,
    pub analytic: ScalarField2D,
    pub window_radius: f64,
    pub nrmse: f64,
}

/// Analytic terms evaluated on a crop whose origin sits at `k_x = center`.
fn analytic_on_crop(
    spec: &MaskSpec,
    crop: &Grid2D,
    center: f64,
    select: TermSelection,
) -> Result<ScalarField2D> {
    let shifted = mask::analytic_fourier_offset(spec, crop, center, select)?;
    Ok(shifted.incoherent_intensity())
}

/// Compares the numeric sideband `s` with the analytic sideband term alone.
pub fn compare_sideband(result: &DiffractionResult, spec: &MaskSpec, sideband: i32) -> Result<SidebandComparison> {
    let radius = sideband_window(spec);
    let center = snapped_center(result.grid(), sideband as f64 * spec.k0);
    let crop = extract_sideband(result, center, radius)?;
    let select = TermSelection {
        central: false,
        mixing: false,
        plus_sideband: sideband == 1,
        minus_sideband: sideband == -1,
    };
    let analytic = analytic_on_crop(spec, &crop.grid, center, select)?;
    let numeric = crop.intensity();
    let err = nrmse_in_disc(&numeric, &analytic, radius)?;
    Ok(SidebandComparison { numeric, analytic, window_radius: radius, nrmse: err })
}

/// NRMSE between the numeric `Γ` of the unbinarized mask and the
/// incoherent analytic sum `Σ|M̃ⱼ|²` inside the `s = −1` sideband window;
/// measures the cross terms the analytic decomposition neglects.
pub fn mixing_term_error(spec: &MaskSpec, grid: &Grid2D) -> Result<f64> {
    let m = mask::synth_mask(spec, grid)?;
    let result = far_field(&m)?;
    mixing_term_error_from(&result, spec)
}

pub fn mixing_term_error_from(result: &DiffractionResult, spec: &MaskSpec) -> Result<f64> {
    let radius = sideband_window(spec);
    let center = snapped_center(result.grid(), -spec.k0);
    let crop = extract_sideband(result, center, radius)?;
    let analytic = analytic_on_crop(spec, &crop.grid, center, TermSelection::ALL)?;
    nrmse_in_disc(&crop.intensity(), &analytic, radius)
}

/// `max|Γ(k) − Γ(−k)|/max Γ` over index-mirrored pairs (index 0 on each
/// axis has no mirror partner and is skipped).
pub fn friedel_asymmetry(intensity: &ScalarField2D) -> f64 {
    let g = intensity.grid;
    let max = intensity.max();
    let mut worst: f64 = 0.0;
    for j in 1..g.ny {
        for i in 1..g.nx {
            let d = (intensity.at(i, j) - intensity.at(g.nx - i, g.ny - j)).abs();
            worst = worst.max(d);
        }
    }
    worst / max
}
