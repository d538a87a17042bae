//! Python bindings for `oamlab-core`.
//!
//! Fields cross the boundary as flat row-major lists plus a shape tuple;
//! `numpy.asarray(f.values).reshape(f.shape)` recovers an array.

use num_complex::Complex64;
use oamlab_core::fields;
use oamlab_core::mpi::Envelope;
use oamlab_core::mask::RadialModifier;
use oamlab_core::{diffraction, mask, mpi, specfun, tomography, topology, Error};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidGrid(_) | Error::InvalidArgument(_) | Error::OutOfDomain(_) => PyValueError::new_err(e.to_string()),
        Error::Io(_) | Error::Format(_) => PyIOError::new_err(e.to_string()),
        Error::NoSignChange { .. } | Error::Numeric(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for oamlab_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn space_unit(space: &str) -> PyResult<(fields::Space, fields::Unit)> {
    match space {
        "real" => Ok((fields::Space::Real, fields::Unit::Micrometers)),
        "momentum" => Ok((fields::Space::Momentum, fields::Unit::InverseMicrometers)),
        "atomic" => Ok((fields::Space::Momentum, fields::Unit::AtomicUnits)),
        other => Err(PyValueError::new_err(format!("space must be real, momentum or atomic, got {other:?}"))),
    }
}

/// Centered square or rectangular sampling grid.
#[pyclass(name = "Grid2D", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid2D(fields::Grid2D);

#[pymethods]
impl PyGrid2D {
    /// `space` is "real" (µm), "momentum" (µm⁻¹) or "atomic" (momentum, a.u.).
    #[new]
    #[pyo3(signature = (n, half_width, space = "real"))]
    fn new(n: usize, half_width: f64, space: &str) -> PyResult<Self> {
        let (s, u) = space_unit(space)?;
        fields::Grid2D::square(n, half_width, s, u).py().map(Self)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.ny, self.0.nx)
    }

    #[getter]
    fn half_width(&self) -> (f64, f64) {
        (self.0.extent_x, self.0.extent_y)
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    fn x(&self, i: usize) -> f64 {
        self.0.x(i)
    }

    fn y(&self, j: usize) -> f64 {
        self.0.y(j)
    }

    fn reciprocal(&self) -> Self {
        Self(self.0.reciprocal())
    }

    fn __repr__(&self) -> String {
        format!("Grid2D({}x{}, half_width={}, {:?})", self.0.nx, self.0.ny, self.0.extent_x, self.0.unit)
    }
}

#[pyclass(name = "ScalarField2D", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScalarField2D(fields::ScalarField2D);

#[pymethods]
impl PyScalarField2D {
    #[new]
    fn new(grid: &PyGrid2D, values: Vec<f64>) -> PyResult<Self> {
        fields::ScalarField2D::new(grid.0, values).py().map(Self)
    }

    #[getter]
    fn grid(&self) -> PyGrid2D {
        PyGrid2D(self.0.grid)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.grid.ny, self.0.grid.nx)
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.0.at(i, j)
    }

    fn max(&self) -> f64 {
        self.0.max()
    }

    fn sum(&self) -> f64 {
        self.0.sum()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        oamlab_core::io::RawField::from_scalar2d(&self.0).save(path).py()
    }
}

#[pyclass(name = "ComplexField2D", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyComplexField2D(fields::ComplexField2D);

#[pymethods]
impl PyComplexField2D {
    #[getter]
    fn grid(&self) -> PyGrid2D {
        PyGrid2D(self.0.grid)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.grid.ny, self.0.grid.nx)
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.0.values.clone()
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.0.at(i, j)
    }

    fn intensity(&self) -> PyScalarField2D {
        PyScalarField2D(self.0.intensity())
    }
}

#[pyclass(name = "ScalarField3D", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScalarField3D(fields::ScalarField3D);

#[pymethods]
impl PyScalarField3D {
    /// `(nz, ny, nx)`, matching the z-slowest storage order.
    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        (self.0.grid.nz, self.0.grid.ny, self.0.grid.nx)
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    fn sum(&self) -> f64 {
        self.0.sum()
    }

    fn max(&self) -> f64 {
        self.0.max()
    }

    fn xz_slice(&self, j: usize) -> PyResult<PyScalarField2D> {
        if j >= self.0.grid.ny {
            return Err(PyValueError::new_err(format!("slice {j} outside 0..{}", self.0.grid.ny)));
        }
        Ok(PyScalarField2D(tomography::xz_slice(&self.0, j)))
    }

    fn xy_slice(&self, k: usize) -> PyResult<PyScalarField2D> {
        if k >= self.0.grid.nz {
            return Err(PyValueError::new_err(format!("slice {k} outside 0..{}", self.0.grid.nz)));
        }
        Ok(PyScalarField2D(self.0.xy_slice(k)))
    }
}

/// Hologram design: orders `m`, `n`, relative phase `kappa` (rad), carrier
/// `k0` (µm⁻¹), aperture `radius` (µm); optional chirp/envelope in µm².
#[pyclass(name = "MaskSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMaskSpec(mask::MaskSpec);

#[pymethods]
impl PyMaskSpec {
    #[new]
    #[pyo3(signature = (m, n, kappa, k0, radius, chirp = None, envelope = None, binarize_threshold = 0.5))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        m: u32,
        n: u32,
        kappa: f64,
        k0: f64,
        radius: f64,
        chirp: Option<f64>,
        envelope: Option<f64>,
        binarize_threshold: f64,
    ) -> PyResult<Self> {
        let radial = match (chirp, envelope) {
            (None, None) => None,
            (Some(c), Some(c2)) => Some(RadialModifier { c, c2 }),
            _ => return Err(PyValueError::new_err("chirp and envelope go together")),
        };
        let spec = mask::MaskSpec { radial, binarize_threshold, ..mask::MaskSpec::new(m, n, kappa, k0, radius) };
        spec.validate().py()?;
        Ok(Self(spec))
    }

    #[getter]
    fn m(&self) -> u32 {
        self.0.m
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn k0(&self) -> f64 {
        self.0.k0
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius
    }

    fn default_grid(&self) -> PyResult<PyGrid2D> {
        self.0.default_grid().py().map(PyGrid2D)
    }
}

/// Bichromatic ionization scheme; times in atomic units unless the name
/// says otherwise.
#[pyclass(name = "MpiSpec", skip_from_py_object)]
#[derive(Clone)]
struct PyMpiSpec(mpi::MpiSpec);

#[pymethods]
impl PyMpiSpec {
    /// Sodium scheme with 25 fs pulses and all phases zero.
    #[staticmethod]
    fn sodium(m: u32, n: u32) -> Self {
        Self(mpi::MpiSpec::sodium(m, n))
    }

    #[getter]
    fn m(&self) -> u32 {
        self.0.m
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }

    #[getter]
    fn phi_ce(&self) -> f64 {
        self.0.phi_ce
    }

    #[setter]
    fn set_phi_ce(&mut self, v: f64) {
        self.0.phi_ce = v;
    }

    #[getter]
    fn phi_r(&self) -> f64 {
        self.0.phi_r
    }

    #[setter]
    fn set_phi_r(&mut self, v: f64) {
        self.0.phi_r = v;
    }

    #[getter]
    fn phi_b(&self) -> f64 {
        self.0.phi_b
    }

    #[setter]
    fn set_phi_b(&mut self, v: f64) {
        self.0.phi_b = v;
    }

    #[getter]
    fn zeta(&self) -> f64 {
        self.0.zeta
    }

    #[setter]
    fn set_zeta(&mut self, v: f64) {
        self.0.zeta = v;
    }

    #[getter]
    fn tau_fs(&self) -> f64 {
        self.0.tau / fields::FS_IN_AU
    }

    #[setter]
    fn set_tau_fs(&mut self, v: f64) {
        self.0.tau = v * fields::FS_IN_AU;
    }

    #[getter]
    fn beta0(&self) -> f64 {
        self.0.amplitude_ratio
    }

    #[setter]
    fn set_beta0(&mut self, v: f64) {
        self.0.amplitude_ratio = v;
    }

    /// Switches to a constant envelope (for trace geometry).
    fn continuous(&mut self) {
        self.0.envelope = Envelope::Continuous;
    }

    fn kappa(&self) -> f64 {
        mpi::kappa_mpi(&self.0)
    }

    fn gamma(&self) -> f64 {
        mpi::gamma_from_mpi(&self.0)
    }
}

#[pyclass(name = "AzimuthalSpectrum", frozen)]
struct PyAzimuthalSpectrum(topology::AzimuthalSpectrum);

#[pymethods]
impl PyAzimuthalSpectrum {
    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.0.coeffs.clone()
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn contrast(&self, q: usize) -> PyResult<f64> {
        self.0.contrast(q).py()
    }

    fn rotation(&self, q: usize) -> PyResult<f64> {
        self.0.rotation(q).py()
    }
}

#[pyfunction]
fn find_k_eq(n: u32, m: u32, radius: f64, lo: f64, hi: f64) -> PyResult<f64> {
    specfun::find_k_eq(n, m, radius, (lo, hi)).py()
}

#[pyfunction]
fn bessel_j(n: u32, x: f64) -> f64 {
    specfun::jn(n, x)
}

#[pyfunction]
fn aperture_hankel_integral(n: u32, k: f64, radius: f64) -> f64 {
    specfun::aperture_hankel_integral(n, k, radius)
}

#[pyfunction]
fn assoc_legendre(l: u32, m: i32, x: f64) -> PyResult<f64> {
    specfun::assoc_legendre(l, m, x).py()
}

#[pyfunction]
#[pyo3(signature = (spec, grid = None, binarized = false))]
fn synth_mask(spec: &PyMaskSpec, grid: Option<&PyGrid2D>, binarized: bool) -> PyResult<PyScalarField2D> {
    let g = match grid {
        Some(g) => g.0,
        None => spec.0.default_grid().py()?,
    };
    let field = if spec.0.radial.is_some() { mask::synth_mask_radial(&spec.0, &g) } else { mask::synth_mask(&spec.0, &g) }.py()?;
    let field = if binarized { mask::binarize(&field, spec.0.binarize_threshold).py()? } else { field };
    Ok(PyScalarField2D(field))
}

#[pyfunction]
fn gamma_from_spm(kappa: f64, m: u32, n: u32, sideband: i32) -> PyResult<f64> {
    mask::gamma_from_spm(kappa, m, n, sideband).py()
}

/// Returns `(amplitude, intensity)` on the reciprocal grid.
#[pyfunction]
fn far_field(mask: &PyScalarField2D) -> PyResult<(PyComplexField2D, PyScalarField2D)> {
    let r = diffraction::far_field(&mask.0).py()?;
    Ok((PyComplexField2D(r.amplitude), PyScalarField2D(r.intensity)))
}

/// Sideband crop of the far field of `mask`, centered on the lattice point
/// nearest `sideband·k0`.
#[pyfunction]
fn sideband(mask: &PyScalarField2D, spec: &PyMaskSpec, sideband: i32, window: Option<f64>) -> PyResult<PyComplexField2D> {
    let r = diffraction::far_field(&mask.0).py()?;
    let center = diffraction::snapped_center(r.grid(), sideband as f64 * spec.0.k0);
    let w = window.unwrap_or_else(|| diffraction::sideband_window(&spec.0));
    diffraction::extract_sideband(&r, center, w).py().map(PyComplexField2D)
}

/// NRMSE between the numeric and analytic sideband of an unbinarized mask.
#[pyfunction]
fn sideband_nrmse(mask: &PyScalarField2D, spec: &PyMaskSpec, sideband: i32) -> PyResult<f64> {
    let r = diffraction::far_field(&mask.0).py()?;
    Ok(diffraction::compare_sideband(&r, &spec.0, sideband).py()?.nrmse)
}

#[pyfunction]
fn mixing_term_error(spec: &PyMaskSpec, grid: &PyGrid2D) -> PyResult<f64> {
    diffraction::mixing_term_error(&spec.0, &grid.0).py()
}

#[pyfunction]
fn friedel_asymmetry(intensity: &PyScalarField2D) -> f64 {
    diffraction::friedel_asymmetry(&intensity.0)
}

#[pyfunction]
fn azimuthal_spectrum(density: &PyScalarField2D, k_ring: f64, q_max: usize) -> PyResult<PyAzimuthalSpectrum> {
    topology::azimuthal_spectrum(&density.0, k_ring, q_max).py().map(PyAzimuthalSpectrum)
}

#[pyfunction]
fn symmetry_contrast(density: &PyScalarField2D, q: usize, k_ring: f64) -> PyResult<f64> {
    topology::symmetry_contrast(&density.0, q, k_ring).py()
}

#[pyfunction]
fn petal_rotation_angle(density: &PyScalarField2D, q: usize, k_ring: f64) -> PyResult<f64> {
    topology::petal_rotation_angle(&density.0, q, k_ring).py()
}

#[pyfunction]
fn expectation_lz(m: u32, n: u32, beta0: f64) -> f64 {
    topology::expectation_lz(m, n, beta0)
}

#[pyfunction]
fn expectation_lz_numeric(ring: Vec<Complex64>) -> PyResult<f64> {
    topology::expectation_lz_numeric(&ring).py()
}

#[pyfunction]
fn topological_charge(m: u32, n: u32, beta0: f64) -> f64 {
    topology::topological_charge_closed_form(m, n, beta0)
}

/// Closed-form and numeric `(lz, lz_numeric, charge, charge_numeric)` for
/// `e^{imξ} + β₀e^{−inξ}`.
#[pyfunction]
fn topology_report(m: u32, n: u32, beta0: f64) -> PyResult<(f64, f64, f64, f64)> {
    let r = topology::analytic_report(m, n, beta0).py()?;
    Ok((r.lz_closed_form, r.lz_numeric, r.charge_closed_form, r.charge_numeric))
}

/// `(mean_flow, radial_rms, azimuthal_rms)` of the probability current of
/// `psi` (atomic units) over an annulus, skipping near-node pixels.
#[pyfunction]
#[pyo3(signature = (psi, k_lo, k_hi, node_fraction = 0.01))]
fn ring_flow(psi: &PyComplexField2D, k_lo: f64, k_hi: f64, node_fraction: f64) -> PyResult<(f64, f64, f64)> {
    let c = fields::PhysicalConstants::atomic();
    let j = topology::probability_current(&psi.0, &c);
    let f = topology::ring_flow(&psi.0, &j, &c, k_lo, k_hi, node_fraction).py()?;
    Ok((f.mean_flow, f.radial_rms, f.azimuthal_rms))
}

#[pyfunction]
fn equatorial_slice(spec: &PyMpiSpec, grid: &PyGrid2D) -> PyResult<PyComplexField2D> {
    mpi::equatorial_slice(&spec.0, &grid.0).py().map(PyComplexField2D)
}

/// `(t, E_x, E_y)` samples over `[t0, t1)` in atomic units.
#[pyfunction]
fn field_trace(spec: &PyMpiSpec, t0: f64, t1: f64, samples: usize) -> Vec<(f64, f64, f64)> {
    mpi::field_trace(&spec.0, t0, t1, samples)
}

#[pyfunction]
fn field_symmetry_order(n: u32, m: u32) -> PyResult<u32> {
    mpi::field_symmetry_order(n, m).py()
}

#[pyfunction]
fn trace_rotation_error(spec: &PyMpiSpec) -> PyResult<f64> {
    mpi::trace_rotation_error(&spec.0, 64).py()
}

#[pyfunction]
fn polarization_angle_slope(spec: &PyMpiSpec, half_window: f64) -> f64 {
    mpi::polarization_angle_slope(&spec.0, 0.0, half_window, 4001)
}

/// Momentum density of the scheme on a cube of half-width `k_extent` (a.u.),
/// polar axis along y so it can be projected about that axis.
#[pyfunction]
fn pmd_phantom(spec: &PyMpiSpec, n: usize, k_extent: f64) -> PyResult<PyScalarField3D> {
    let g = fields::Grid3D::cube(n, k_extent, fields::Space::Momentum, fields::Unit::AtomicUnits).py()?;
    let rho = mpi::pmd_density_3d(&spec.0, &g).py()?;
    tomography::swap_yz(&rho).py().map(PyScalarField3D)
}

#[pyfunction]
#[pyo3(signature = (n, radius = 0.6, supersample = 4))]
fn uniform_ball(n: usize, radius: f64, supersample: usize) -> PyResult<PyScalarField3D> {
    let g = fields::Grid3D::cube(n, 1.0, fields::Space::Momentum, fields::Unit::AtomicUnits).py()?;
    tomography::uniform_ball(g, radius, supersample).py().map(PyScalarField3D)
}

#[pyfunction]
fn project(density: &PyScalarField3D, angle: f64) -> PyResult<PyScalarField2D> {
    tomography::project(&density.0, angle).py().map(PyScalarField2D)
}

/// Projects at `count` angles `step` apart and reconstructs. Returns
/// `(density, raw_mass, clamped_fraction)`.
#[pyfunction]
fn tomography_roundtrip(density: &PyScalarField3D, count: usize, step: f64) -> PyResult<(PyScalarField3D, f64, f64)> {
    let angles = tomography::uniform_angles(count, step).py()?;
    let set = tomography::project_all(&density.0, &angles).py()?;
    let r = tomography::fourier_slice_reconstruct(&set).py()?;
    Ok((PyScalarField3D(r.density), r.raw_mass, r.clamped_fraction))
}

#[pyfunction]
fn nrmse(a: &PyScalarField3D, b: &PyScalarField3D) -> PyResult<f64> {
    if a.0.values.len() != b.0.values.len() {
        return Err(PyValueError::new_err("fields differ in size"));
    }
    Ok(diffraction::nrmse(&a.0.values, &b.0.values))
}

#[pymodule]
fn oamlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid2D>()?;
    m.add_class::<PyScalarField2D>()?;
    m.add_class::<PyComplexField2D>()?;
    m.add_class::<PyScalarField3D>()?;
    m.add_class::<PyMaskSpec>()?;
    m.add_class::<PyMpiSpec>()?;
    m.add_class::<PyAzimuthalSpectrum>()?;
    m.add("FS_IN_AU", fields::FS_IN_AU)?;
    m.add_function(wrap_pyfunction!(find_k_eq, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(aperture_hankel_integral, m)?)?;
    m.add_function(wrap_pyfunction!(assoc_legendre, m)?)?;
    m.add_function(wrap_pyfunction!(synth_mask, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_from_spm, m)?)?;
    m.add_function(wrap_pyfunction!(far_field, m)?)?;
    m.add_function(wrap_pyfunction!(sideband, m)?)?;
    m.add_function(wrap_pyfunction!(sideband_nrmse, m)?)?;
    m.add_function(wrap_pyfunction!(mixing_term_error, m)?)?;
    m.add_function(wrap_pyfunction!(friedel_asymmetry, m)?)?;
    m.add_function(wrap_pyfunction!(azimuthal_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_contrast, m)?)?;
    m.add_function(wrap_pyfunction!(petal_rotation_angle, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_lz, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_lz_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(topological_charge, m)?)?;
    m.add_function(wrap_pyfunction!(topology_report, m)?)?;
    m.add_function(wrap_pyfunction!(ring_flow, m)?)?;
    m.add_function(wrap_pyfunction!(equatorial_slice, m)?)?;
    m.add_function(wrap_pyfunction!(field_trace, m)?)?;
    m.add_function(wrap_pyfunction!(field_symmetry_order, m)?)?;
    m.add_function(wrap_pyfunction!(trace_rotation_error, m)?)?;
    m.add_function(wrap_pyfunction!(polarization_angle_slope, m)?)?;
    m.add_function(wrap_pyfunction!(pmd_phantom, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_ball, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(tomography_roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(nrmse, m)?)?;
    Ok(())
}
