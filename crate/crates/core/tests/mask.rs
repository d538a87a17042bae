use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use oamlab_core::fields::*;
use oamlab_core::mask::*;
use oamlab_core::specfun::find_k_eq;
use proptest::prelude::*;

fn real_grid(n: usize, extent: f64) -> Grid2D {
    Grid2D::square(n, extent, Space::Real, Unit::Micrometers).unwrap()
}

fn momentum_grid(n: usize, extent: f64) -> Grid2D {
    Grid2D::square(n, extent, Space::Momentum, Unit::InverseMicrometers).unwrap()
}

/// `J₁` from Bessel's integral `(1/π)∫₀^π cos(θ − x sin θ) dθ` by composite
/// Simpson, independent of the library's recurrences.
fn j1_integral(x: f64) -> f64 {
    let n = 2000;
    let h = PI / n as f64;
    let f = |t: f64| (t - x * t.sin()).cos();
    let mut s = f(0.0) + f(PI);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 / PI
}

#[test]
fn plain_carrier_mask() {
    let spec = MaskSpec::new(0, 0, 0.0, 15.0, 1.85);
    let grid = real_grid(256, 2.0);
    let mask = synth_mask(&spec, &grid).unwrap();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = (grid.x(i), grid.y(j));
            let want = if x.hypot(y) <= 1.85 { 5.0 + 4.0 * (15.0 * x).cos() } else { 0.0 };
            assert!((mask.at(i, j) - want).abs() < 1e-12);
        }
    }
}

#[test]
fn seven_lobed_envelope() {
    // averaging over one carrier period leaves 3 + 2cos(7φ + κ)
    let k0 = 2000.0;
    let spec = MaskSpec::new(4, 3, 0.3, k0, 1.0);
    for s in 0..70 {
        let phi = TAU * s as f64 / 70.0;
        let (x, y) = (0.5 * phi.cos(), 0.5 * phi.sin());
        let period = TAU / k0;
        let samples = 64;
        let mean = (0..samples)
            .map(|t| mask_value(&spec, x + period * (t as f64 / samples as f64 - 0.5), y))
            .sum::<f64>()
            / samples as f64;
        let envelope = 3.0 + 2.0 * (7.0 * phi + 0.3).cos();
        assert!((mean - envelope).abs() < 0.05, "φ={phi}: {mean} vs {envelope}");
    }
}

#[test]
fn grid_preconditions() {
    let spec = MaskSpec::new(3, 4, 0.0, 15.0, 1.85);
    assert!(synth_mask(&spec, &real_grid(64, 1.5)).is_err());
    assert!(synth_mask(&spec, &momentum_grid(64, 4.0)).is_err());
    let bad = MaskSpec { binarize_threshold: 1.0, ..spec.clone() };
    assert!(bad.validate().is_err());
    let bad = MaskSpec { radius: -1.0, ..spec };
    assert!(bad.validate().is_err());
}

#[test]
fn binarize_thresholds() {
    let grid = real_grid(64, 1.0);
    let constant = ScalarField2D::from_fn(grid, |_, _| 2.0);
    assert!(binarize(&constant, 0.5).unwrap().values.iter().all(|&v| v == 1.0));

    // five whole carrier periods across the grid
    let k0 = 5.0 * PI;
    let fine = real_grid(1024, 1.0);
    let stripes = ScalarField2D::from_fn(fine, |x, _| 5.0 + 4.0 * (k0 * x).cos());
    let bin = binarize(&stripes, 0.5).unwrap();
    let level = 0.5 * stripes.max();
    for (v, s) in bin.values.iter().zip(&stripes.values) {
        assert_eq!(*v == 1.0, *s >= level);
    }
    // 5 + 4c ≥ 4.5 ⇔ c ≥ −1/8
    let expected = (-1.0f64 / 8.0).acos() / PI;
    let fraction = bin.values.iter().sum::<f64>() / bin.values.len() as f64;
    assert!((fraction - expected).abs() < 0.005, "{fraction} vs {expected}");

    let zero = ScalarField2D::from_fn(grid, |_, _| 0.0);
    assert!(binarize(&zero, 0.5).is_err());
    let negative = ScalarField2D::from_fn(grid, |x, _| x);
    assert!(binarize(&negative, 0.5).is_err());
}

#[test]
fn binarize_ties_transmit() {
    let grid = real_grid(16, 1.0);
    let field = ScalarField2D::from_fn(grid, |x, _| if x > 0.0 { 2.0 } else { 1.0 });
    let bin = binarize(&field, 0.5).unwrap();
    assert!(bin.values.iter().all(|&v| v == 1.0));
}

#[test]
fn gamma_convention() {
    assert!((gamma_from_spm(0.0, 4, 3, 1).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!((gamma_from_spm(0.0, 4, 3, -1).unwrap() + FRAC_PI_2).abs() < 1e-15);
    assert!((gamma_from_spm(FRAC_PI_2, 4, 3, 1).unwrap() - PI).abs() < 1e-15);
    assert!((gamma_from_spm(PI, 4, 3, 1).unwrap() + FRAC_PI_2).abs() < 1e-15);
    for s in [-1, 1] {
        assert!((gamma_from_spm(0.7, 2, 2, s).unwrap() - 0.7).abs() < 1e-15);
    }
    assert!(gamma_from_spm(0.0, 4, 3, 0).is_err());
}

#[test]
fn central_term_is_airy() {
    let spec = MaskSpec::new(3, 4, 0.0, 30.0, 1.85);
    let grid = momentum_grid(64, 8.0);
    let select = TermSelection { central: true, mixing: false, plus_sideband: false, minus_sideband: false };
    let an = analytic_fourier(&spec, &grid, select).unwrap();
    let central = an.central.unwrap();
    for j in (1..64).step_by(5) {
        for i in (1..64).step_by(3) {
            let k = grid.x(i).hypot(grid.y(j));
            if k < 1e-9 {
                continue;
            }
            let r = 1.85;
            let want = 36.0 * PI * PI * r * r / (k * k) * j1_integral(k * r).powi(2);
            let got = central.at(i, j).norm_sqr();
            assert!((got - want).abs() <= 1e-8 * want.max(1e-6), "k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn mixing_term_symmetry() {
    let spec = MaskSpec::new(4, 3, 0.4, 30.0, 1.85);
    let select = TermSelection { central: false, mixing: true, plus_sideband: false, minus_sideband: false };
    let g = momentum_grid(512, 4.0);
    let mix = analytic_fourier(&spec, &g, select).unwrap().mixing.unwrap().intensity();
    let ring = 2.5;
    let at = |xi: f64| mix.interpolate(ring * xi.cos(), ring * xi.sin()).unwrap();
    for s in 0..28 {
        let xi = TAU * s as f64 / 28.0 + 0.05;
        // 2(m+n) = 14 lobes: period π/7
        assert!((at(xi) - at(xi + PI / 7.0)).abs() < 2e-3 * mix.max());
    }
}

#[test]
fn sideband_density_on_equal_weight_ring() {
    let r = 1.85;
    let k_eq = find_k_eq(3, 4, r, (3.0, 3.8)).unwrap();
    let i_eq = oamlab_core::specfun::aperture_hankel_series(3, k_eq, r);
    let peak = 4.0 * (TAU * i_eq).powi(2);
    let select = TermSelection { central: false, mixing: false, plus_sideband: true, minus_sideband: false };
    for kappa in [0.0, 0.9, PI] {
        let spec = MaskSpec::new(4, 3, kappa, 30.0, r);
        // crop whose origin is the +k₀ sideband center
        let crop = momentum_grid(512, 5.0);
        let an = analytic_fourier_offset(&spec, &crop, 30.0, select).unwrap();
        let density = an.plus_sideband.unwrap().intensity();
        for s in 0..56 {
            let xi = TAU * s as f64 / 56.0;
            let got = density.interpolate(k_eq * xi.cos(), k_eq * xi.sin()).unwrap();
            let want = 2.0 * (TAU * i_eq).powi(2) * (1.0 + (7.0 * xi + kappa + FRAC_PI_2).cos());
            assert!((got - want).abs() < 1e-3 * peak, "ξ={xi}: {got} vs {want}");
        }
    }
}

#[test]
fn sidebands_are_conjugate_mirrors() {
    let spec = MaskSpec::new(4, 3, 0.6, 6.0, 1.85);
    let g = momentum_grid(64, 10.0);
    let an = analytic_fourier(&spec, &g, TermSelection::ALL).unwrap();
    let (plus, minus) = (an.plus_sideband.unwrap(), an.minus_sideband.unwrap());
    for j in 1..64 {
        for i in 1..64 {
            let a = plus.at(i, j);
            let b = minus.at(64 - i, 64 - j).conj();
            assert!((a - b).norm() < 1e-9, "({i},{j}) {a} vs {b}");
        }
    }
}

#[test]
fn sideband_phase_follows_target_state() {
    let r = 1.85;
    let k_eq = find_k_eq(3, 4, r, (3.0, 3.8)).unwrap();
    let kappa = 0.8;
    let spec = MaskSpec::new(4, 3, kappa, 30.0, r);
    let gamma = gamma_from_spm(kappa, 4, 3, -1).unwrap();
    let target = SuperpositionSpec {
        m: 4,
        n: 3,
        beta0: 1.0,
        gamma,
        radial: RadialProfile::Gaussian { center: k_eq, sigma: 1.0 },
    };
    let select = TermSelection { central: false, mixing: false, plus_sideband: false, minus_sideband: true };
    // sample exactly on the ring: a 16² crop per azimuth whose origin sits
    // at k_x on the ring and whose node j = 12 sits at k_y on the ring
    let mut offset: Option<f64> = None;
    for s in 0..64 {
        let xi = TAU * (s as f64 + 0.25) / 64.0;
        let ky = k_eq * xi.sin();
        if ky.abs() < 1e-3 {
            continue;
        }
        let crop = momentum_grid(16, 2.0 * ky.abs());
        let an = analytic_fourier_offset(&spec, &crop, -30.0 + k_eq * xi.cos(), select).unwrap();
        let j = if ky > 0.0 { 12 } else { 4 };
        assert!((crop.y(j) - ky).abs() < 1e-12);
        let v = an.minus_sideband.unwrap().at(8, j);
        let t = target.angular(xi);
        if t.norm() < 1e-2 {
            continue;
        }
        let d = oamlab_core::wrap_angle(v.arg() - t.arg());
        match offset {
            None => offset = Some(d),
            Some(o) => assert!(oamlab_core::wrap_angle(d - o).abs() < 1e-6, "ξ={xi}: {d} vs {o}"),
        }
    }
    assert!(offset.is_some());
}

#[test]
fn radial_design_requires_modifier_and_coverage() {
    let spec = MaskSpec::new(4, 3, 0.0, 15.0, 2.65);
    let grid = real_grid(128, 3.0);
    assert!(RadialTables::compute(&spec, 2.65, 64).is_err());
    let spec = MaskSpec { radial: Some(RadialModifier { c: -0.22, c2: 0.17 }), ..spec };
    let short = RadialTables::compute(&spec, 1.0, 64).unwrap();
    assert!(matches!(
        synth_mask_radial_with(&spec, &grid, &short),
        Err(oamlab_core::Error::OutOfDomain(_))
    ));
    let mask = synth_mask_radial(&spec, &grid).unwrap();
    assert!(mask.values.iter().all(|v| v.is_finite() && *v >= 0.0));
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.x(i).hypot(grid.y(j)) > 2.65 {
                assert_eq!(mask.at(i, j), 0.0);
            }
        }
    }
    let plain = MaskSpec { radial: None, ..spec };
    assert!(analytic_fourier(&plain, &momentum_grid(16, 1.0), TermSelection::ALL).is_ok());
    let chirped = MaskSpec { radial: Some(RadialModifier { c: -0.22, c2: 0.17 }), ..plain };
    assert!(analytic_fourier(&chirped, &momentum_grid(16, 1.0), TermSelection::ALL).is_err());
}

proptest! {
    #[test]
    fn direct_and_expanded_forms_agree(m in 0u32..8, n in 0u32..8, kappa in -PI..PI, k0 in 0.0..60.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let spec = MaskSpec::new(m, n, kappa, k0, 1.85);
        let a = mask_value(&spec, x, y);
        let b = mask_value_expanded(&spec, x, y);
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn mask_is_bounded(m in 0u32..8, n in 0u32..8, kappa in -PI..PI, k0 in 0.0..60.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let spec = MaskSpec::new(m, n, kappa, k0, 1.85);
        let v = mask_value(&spec, x, y);
        prop_assert!((0.0..=9.0 + 1e-12).contains(&v));
        if x.hypot(y) > 1.85 {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn three_wave_oracle(m in 0u32..6, n in 0u32..6, kappa in -PI..PI, x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let spec = MaskSpec::new(m, n, kappa, 15.0, 1.85);
        let phi = y.atan2(x);
        let sum = Complex64::from_polar(1.0, m as f64 * phi + kappa) + Complex64::from_polar(1.0, -(n as f64) * phi) + Complex64::from_polar(1.0, 15.0 * x);
        prop_assert!((mask_value(&spec, x, y) - sum.norm_sqr()).abs() < 1e-12);
    }
}
