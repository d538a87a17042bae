//! One pipeline per command. Each stage writes its files and metrics into
//! an [`Artifacts`] sink so the figure recipes can chain them.

use std::f64::consts::TAU;
use std::path::Path;

use oamlab_core::diffraction::{
    compare_sideband, extract_sideband, far_field_complex_with, friedel_asymmetry, mixing_term_error_from,
    sideband_window, snapped_center, DiffractionResult, FarFieldOptions,
};
use oamlab_core::fields::FS_IN_AU;
use oamlab_core::io::{write_csv, write_pgm16, write_pgm8, RawField, Scaling};
use oamlab_core::mask::{binarize, gamma_from_spm, synth_mask, synth_mask_radial, MaskSpec, RadialModifier};
use oamlab_core::mpi::{
    equatorial_slice, field_symmetry_order, field_trace, gamma_from_mpi, kappa_mpi, pmd_density_3d,
    polarization_angle_slope, trace_rotation_error, Envelope, MpiSpec,
};
use oamlab_core::specfun::{aperture_hankel_integral, find_k_eq};
use oamlab_core::tomography::{
    fourier_slice_reconstruct, project_all, swap_yz, uniform_angles, uniform_ball, vmi_radial_remap, xz_slice,
    RadialScaling,
};
use oamlab_core::topology::{analytic_report, azimuthal_spectrum, AzimuthalSpectrum};
use oamlab_core::{
    ComplexField2D, Error, Grid2D, Grid3D, RadialProfile, ScalarField2D, ScalarField3D, Space, Unit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifacts::{Artifacts, Report};
use crate::config::{
    Command, DiffractionConfig, FieldConfig, GridConfig, MaskConfig, MpiConfig, Phantom, RunConfig,
    TomographyConfig, TopologyConfig,
};
use crate::{recipes, RunError};

/// Runs the configured command, writing everything below `out`.
pub fn run_pipeline(cfg: &RunConfig, out: &Path) -> Result<Report, RunError> {
    let mut a = Artifacts::create(out)?;
    let stored = RunConfig { output: None, ..cfg.clone() };
    a.write_bytes("config.toml", crate::config::to_toml_string(&stored).as_bytes())?;
    let missing = |s: &str| RunError::Config(crate::config::ConfigError::single(format!("missing [{s}] table")));
    match cfg.command {
        Command::Mask => {
            let m = cfg.mask.as_ref().ok_or_else(|| missing("mask"))?;
            mask_stage(&mut a, &cfg.grid, m)?;
        }
        Command::Diffract => {
            let m = cfg.mask.as_ref().ok_or_else(|| missing("mask"))?;
            diffract_stage(&mut a, &cfg.grid, m, &cfg.diffraction)?;
        }
        Command::Mpi => {
            let p = cfg.mpi.as_ref().ok_or_else(|| missing("mpi"))?;
            mpi_stage(&mut a, p)?;
        }
        Command::Field => {
            let p = cfg.mpi.as_ref().ok_or_else(|| missing("mpi"))?;
            field_stage(&mut a, p, &cfg.field)?;
        }
        Command::Topology => {
            let p = cfg.topology.as_ref().ok_or_else(|| missing("topology"))?;
            topology_stage(&mut a, p)?;
        }
        Command::Tomo => {
            let p = cfg.tomography.as_ref().ok_or_else(|| missing("tomography"))?;
            tomo_stage(&mut a, p, cfg.mpi.as_ref(), cfg.seed)?;
        }
        Command::Reproduce => {
            let fig = cfg.figure.as_deref().ok_or_else(|| missing("figure"))?;
            recipes::reproduce(&mut a, fig)?;
        }
    }
    a.finish()
}

pub fn mask_spec(m: &MaskConfig) -> MaskSpec {
    MaskSpec {
        radial: m.radial.map(|(c, c2)| RadialModifier { c, c2 }),
        binarize_threshold: m.binarize.unwrap_or(0.5),
        ..MaskSpec::new(m.m, m.n, m.kappa, m.k0, m.radius)
    }
}

/// The configured real-space grid; without an explicit half-width the
/// mask's default extent is kept at the requested sample count.
pub fn mask_grid(grid: &GridConfig, spec: &MaskSpec) -> Result<Grid2D, Error> {
    let half_width = match grid.half_width {
        Some(w) => w,
        None => spec.default_grid()?.extent_x,
    };
    Grid2D::square(grid.size, half_width, Space::Real, Unit::Micrometers)
}

/// First crossing of the two aperture Hankel integrals, found by scanning
/// outward from the origin.
pub fn default_ring(m: u32, n: u32, radius: f64) -> Result<f64, Error> {
    let diff = |k: f64| aperture_hankel_integral(m, k, radius) - aperture_hankel_integral(n, k, radius);
    let step = 0.05 / radius;
    let mut lo = step;
    let mut f_lo = diff(lo);
    while lo < 20.0 / radius {
        let hi = lo + step;
        let f_hi = diff(hi);
        if f_lo * f_hi < 0.0 {
            return find_k_eq(m, n, radius, (lo, hi));
        }
        (lo, f_lo) = (hi, f_hi);
    }
    Err(Error::Numeric(format!("no equal-intensity ring for orders {m}, {n}")))
}

pub fn synthesize(spec: &MaskSpec, grid: &Grid2D, binarized: bool) -> Result<ScalarField2D, Error> {
    let mask = if spec.radial.is_some() { synth_mask_radial(spec, grid)? } else { synth_mask(spec, grid)? };
    if binarized {
        binarize(&mask, spec.binarize_threshold)
    } else {
        Ok(mask)
    }
}

pub fn mask_stage(a: &mut Artifacts, grid: &GridConfig, m: &MaskConfig) -> Result<(MaskSpec, ScalarField2D), RunError> {
    let spec = mask_spec(m);
    spec.validate()?;
    let g = mask_grid(grid, &spec)?;
    let mask = synthesize(&spec, &g, m.binarize.is_some())?;
    a.write("mask.oamf", |w| RawField::from_scalar2d(&mask).write_to(w))?;
    if m.binarize.is_some() {
        a.write("mask.pgm", |w| write_pgm8(w, &mask))?;
    } else {
        a.write("mask.pgm", |w| write_pgm16(w, &mask, Scaling::Linear))?;
    }
    a.metric("fill_fraction", mask.sum() / (mask.max().max(f64::MIN_POSITIVE) * g.len() as f64));
    a.metric("gamma_minus", gamma_from_spm(spec.kappa, spec.m, spec.n, -1)?);
    a.metric("gamma_plus", gamma_from_spm(spec.kappa, spec.m, spec.n, 1)?);
    Ok((spec, mask))
}

pub struct DiffractOutcome {
    pub spec: MaskSpec,
    pub result: DiffractionResult,
    pub sideband: ComplexField2D,
    pub spectrum: AzimuthalSpectrum,
    /// Petal count `m + n`.
    pub order: usize,
}

impl DiffractOutcome {
    pub fn rotation(&self) -> Result<f64, Error> {
        self.spectrum.rotation(self.order)
    }
}

pub fn diffract_stage(
    a: &mut Artifacts,
    grid: &GridConfig,
    m: &MaskConfig,
    d: &DiffractionConfig,
) -> Result<DiffractOutcome, RunError> {
    let (spec, mask) = mask_stage(a, grid, m)?;
    let result = far_field_complex_with(&ComplexField2D::from_real(&mask), FarFieldOptions { pad: d.pad })?;
    a.write("intensity.pgm", |w| write_pgm16(w, &result.intensity, Scaling::Log))?;
    a.metric("friedel_asymmetry", friedel_asymmetry(&result.intensity));

    let window = d.window.unwrap_or_else(|| sideband_window(&spec));
    let center = snapped_center(result.grid(), d.sideband as f64 * spec.k0);
    let sideband = extract_sideband(&result, center, window)?;
    let density = sideband.intensity();
    a.write("sideband.oamf", |w| RawField::from_complex2d(&sideband).write_to(w))?;
    a.write("sideband.pgm", |w| write_pgm16(w, &density, Scaling::Linear))?;

    let ring = match d.ring {
        Some(r) => r,
        None => default_ring(spec.m, spec.n, spec.radius)?,
    };
    let order = (spec.m + spec.n) as usize;
    let q_max = d.q_max.max(order);
    let spectrum = azimuthal_spectrum(&density, ring, q_max)?;
    let rows: Vec<Vec<f64>> = (1..=q_max)
        .map(|q| Ok(vec![q as f64, spectrum.contrast(q)?, spectrum.coeffs[q].arg()]))
        .collect::<Result<_, Error>>()?;
    a.write("spectrum.csv", |w| write_csv(w, &["order", "contrast", "phase_rad"], &rows))?;

    let other = (1..=d.q_max)
        .filter(|&q| q != order)
        .map(|q| spectrum.contrast(q))
        .try_fold(0.0f64, |acc, c| c.map(|c| acc.max(c)))?;
    a.metric("ring_per_um", ring);
    a.metric("petal_order", order as f64);
    a.metric("petal_contrast", spectrum.contrast(order)?);
    a.metric("max_other_contrast", other);
    if let Ok(rot) = spectrum.rotation(order) {
        a.metric("petal_rotation_rad", rot);
    }
    if m.binarize.is_none() && spec.radial.is_none() && !d.pad {
        a.metric("sideband_nrmse", compare_sideband(&result, &spec, d.sideband)?.nrmse);
        a.metric("mixing_error", mixing_term_error_from(&result, &spec)?);
    }
    Ok(DiffractOutcome { spec, result, sideband, spectrum, order })
}

pub fn mpi_spec(p: &MpiConfig) -> MpiSpec {
    MpiSpec {
        omega: p.omega,
        phi_r: p.phi_r,
        phi_b: p.phi_b,
        phi_ce: p.phi_ce,
        zeta: p.zeta,
        tau: p.tau * FS_IN_AU,
        envelope: Envelope::Gaussian { fwhm: p.fwhm * FS_IN_AU },
        radial: RadialProfile::Gaussian { center: p.k_center, sigma: p.k_width },
        amplitude_ratio: p.beta0,
        ..MpiSpec::sodium(p.m, p.n)
    }
}

pub fn momentum_plane(p: &MpiConfig) -> Result<Grid2D, Error> {
    Grid2D::square(p.grid_size, p.k_extent, Space::Momentum, Unit::AtomicUnits)
}

pub struct MpiOutcome {
    pub spec: MpiSpec,
    pub density: ScalarField2D,
    pub order: usize,
}

pub fn mpi_stage(a: &mut Artifacts, p: &MpiConfig) -> Result<MpiOutcome, RunError> {
    let spec = mpi_spec(p);
    spec.validate()?;
    let psi = equatorial_slice(&spec, &momentum_plane(p)?)?;
    let density = psi.intensity();
    a.write("equator.oamf", |w| RawField::from_complex2d(&psi).write_to(w))?;
    a.write("equator.pgm", |w| write_pgm16(w, &density, Scaling::Linear))?;
    if p.energy_linear {
        let remapped = vmi_radial_remap(&density, RadialScaling::EnergyLinear);
        a.write("equator_energy.pgm", |w| write_pgm16(w, &remapped, Scaling::Linear))?;
    }
    let order = (spec.m + spec.n) as usize;
    let spectrum = azimuthal_spectrum(&density, p.k_center, order)?;
    a.metric("kappa_rad", kappa_mpi(&spec));
    a.metric("gamma_rad", gamma_from_mpi(&spec));
    a.metric("petal_order", order as f64);
    a.metric("petal_contrast", spectrum.contrast(order)?);
    if let Ok(rot) = spectrum.rotation(order) {
        a.metric("petal_rotation_rad", rot);
    }
    Ok(MpiOutcome { spec, density, order })
}

pub fn field_stage(a: &mut Artifacts, p: &MpiConfig, f: &FieldConfig) -> Result<(), RunError> {
    let spec = mpi_spec(p);
    spec.validate()?;
    let period = TAU / spec.omega;
    let half = 0.5 * f.periods * period;
    let trace = field_trace(&spec, -half, half, f.samples);
    let rows: Vec<Vec<f64>> = trace.iter().map(|&(t, x, y)| vec![t / FS_IN_AU, x, y]).collect();
    a.write("trace.csv", |w| write_csv(w, &["t_fs", "e_x", "e_y"], &rows))?;
    let slope = polarization_angle_slope(&spec, 0.0, 2.0 * period, 4001);
    let expected = (spec.n as f64 - spec.m as f64) * spec.omega / 2.0;
    a.metric("symmetry_order", field_symmetry_order(spec.n, spec.m)? as f64);
    a.metric("trace_rotation_error", trace_rotation_error(&spec, 64)?);
    a.metric("polarization_slope", slope);
    a.metric("polarization_slope_beat", expected);
    Ok(())
}

pub fn topology_stage(a: &mut Artifacts, p: &TopologyConfig) -> Result<(), RunError> {
    let mut rows = Vec::with_capacity(p.steps);
    let mut worst: f64 = 0.0;
    for i in 0..p.steps {
        let beta = p.beta_min + (p.beta_max - p.beta_min) * i as f64 / (p.steps - 1) as f64;
        let r = analytic_report(p.m, p.n, beta)?;
        worst = worst.max((r.lz_numeric - r.lz_closed_form).abs());
        rows.push(vec![beta, r.lz_closed_form, r.lz_numeric, r.charge_closed_form, r.charge_numeric]);
    }
    a.write(
        "sweep.csv",
        |w| write_csv(w, &["beta0", "lz_closed_form", "lz_numeric", "charge_closed_form", "charge_numeric"], &rows),
    )?;
    a.metric("lz_max_abs_error", worst);
    Ok(())
}

/// Seeded sum of Gaussian blobs inside the unit ball.
pub fn blob_phantom(grid: Grid3D, seed: u64, count: usize) -> ScalarField3D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<([f64; 3], f64, f64)> = (0..count)
        .map(|_| {
            let c = [rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45)];
            (c, rng.gen_range(0.06..0.18), rng.gen_range(0.5..1.0))
        })
        .collect();
    ScalarField3D::from_fn(grid, |x, y, z| {
        blobs
            .iter()
            .map(|(c, s, w)| {
                let d2 = (x - c[0]).powi(2) + (y - c[1]).powi(2) + (z - c[2]).powi(2);
                w * (-d2 / (2.0 * s * s)).exp()
            })
            .sum()
    })
}

pub struct TomoOutcome {
    pub phantom: ScalarField3D,
    pub reconstruction: ScalarField3D,
    pub nrmse: f64,
}

pub fn tomo_stage(
    a: &mut Artifacts,
    t: &TomographyConfig,
    mpi: Option<&MpiConfig>,
    seed: u64,
) -> Result<TomoOutcome, RunError> {
    let sodium = MpiConfig::sodium(4, 3);
    let (phantom, ring) = match t.phantom {
        Phantom::Pmd => {
            let p = mpi.unwrap_or(&sodium);
            let grid = Grid3D::cube(t.size, p.k_extent, Space::Momentum, Unit::AtomicUnits)?;
            let rho = swap_yz(&pmd_density_3d(&mpi_spec(p), &grid)?)?;
            (rho, Some((p.k_center, (p.m + p.n) as usize)))
        }
        Phantom::Ball => {
            let grid = Grid3D::cube(t.size, 1.0, Space::Momentum, Unit::AtomicUnits)?;
            (uniform_ball(grid, 0.6, 4)?, None)
        }
        Phantom::Blobs => {
            let grid = Grid3D::cube(t.size, 1.0, Space::Momentum, Unit::AtomicUnits)?;
            (blob_phantom(grid, seed, 6), None)
        }
    };
    let angles = uniform_angles(t.projections, t.step)?;
    let set = project_all(&phantom, &angles)?;
    a.write("projection_000.pgm", |w| write_pgm16(w, &set.images()[0], Scaling::Linear))?;
    let rec = fourier_slice_reconstruct(&set)?;
    let mid = t.size / 2;
    let equator = xz_slice(&rec.density, mid);
    a.write("reconstruction.oamf", |w| RawField::from_scalar3d(&rec.density).write_to(w))?;
    a.write("equator.pgm", |w| write_pgm16(w, &equator, Scaling::Linear))?;
    a.write("phantom_equator.pgm", |w| write_pgm16(w, &xz_slice(&phantom, mid), Scaling::Linear))?;

    let nrmse = oamlab_core::diffraction::nrmse(&rec.density.values, &phantom.values);
    let mass = phantom.sum();
    a.metric("nrmse", nrmse);
    a.metric("mass_error", (rec.raw_mass - mass) / mass);
    a.metric("clamped_fraction", rec.clamped_fraction);
    if let Some((k, q)) = ring {
        a.metric("equator_contrast", azimuthal_spectrum(&equator, k, q)?.contrast(q)?);
    }
    Ok(TomoOutcome { phantom, reconstruction: rec.density, nrmse })
}
