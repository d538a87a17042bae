use oamlab_core::specfun::{
    aperture_hankel_integral, aperture_hankel_series, assoc_legendre, bessel_j, find_k_eq,
    inverse_hankel_transform, inverse_hankel_transform_complex, jn, quad::GaussLegendre,
    ApertureHankelTable,
};
use oamlab_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

/// Reference values from mpmath.besselj at 30 digits.
const BESSEL_REFERENCE: &[(u32, f64, f64)] = &[
    (0, 1.0, 0.765_197_686_557_966_6),
    (1, 2.5, 0.497_094_102_464_274_05),
    (5, 10.0, -0.234_061_528_186_793_63),
    (10, 3.0, 1.292_835_164_571_588_3e-5),
    (20, 50.0, -0.116_704_352_759_579_74),
    (64, 100.0, 0.039_985_069_452_918_34),
    (64, 10.0, 2.904_936_028_729_109_4e-45),
    (3, 99.5, 0.078_386_092_598_695_92),
    (0, 100.0, 0.019_985_850_304_223_122),
    (40, 45.0, 0.126_600_621_268_202),
];

#[test]
fn bessel_matches_reference_table() {
    for &(n, x, expect) in BESSEL_REFERENCE {
        let got = bessel_j(n, x).unwrap();
        let rel = ((got - expect) / expect).abs();
        assert!(rel <= 1e-12, "J_{n}({x}) = {got:e}, expected {expect:e} (rel {rel:e})");
    }
}

#[test]
fn bessel_at_origin() {
    assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
    for n in 1..10 {
        assert_eq!(bessel_j(n, 0.0).unwrap(), 0.0);
    }
    assert!(matches!(bessel_j(0, -0.5), Err(Error::OutOfDomain(_))));
}

/// Plain power series, used only as an oracle for small arguments.
fn j0_series_oracle(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..40 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

#[test]
fn first_zero_of_j0() {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if j0_series_oracle(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle_zero = 0.5 * (lo + hi);
    assert!((oracle_zero - 2.404_826).abs() < 1e-6);
    assert!(jn(0, oracle_zero).abs() < 1e-14);
    let zeros = oamlab_core::specfun::bessel_zeros_below(0, 3.0);
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0] - 2.404_825_557_695_773).abs() < 1e-13);
}

#[test]
fn bessel_recurrence_residual() {
    for n in 1..=16u32 {
        let mut x = 0.1;
        while x <= 50.0 {
            let r = jn(n - 1, x) + jn(n + 1, x) - 2.0 * n as f64 / x * jn(n, x);
            assert!(r.abs() <= 1e-10, "n={n} x={x}: residual {r:e}");
            x += 0.37;
        }
    }
}

#[test]
fn order_zero_integral_has_closed_form() {
    let radius = 1.85;
    assert_eq!(aperture_hankel_integral(0, 0.0, radius), radius * radius / 2.0);
    for k in [1e-3, 0.5, 2.0, 3.43, 10.0, 33.3, 90.0] {
        let closed = radius / k * jn(1, k * radius);
        let quad = aperture_hankel_integral(0, k, radius);
        assert!(
            (quad - closed).abs() <= 1e-10 * closed.abs(),
            "k={k}: {quad} vs {closed}"
        );
    }
    for n in 1..6 {
        assert_eq!(aperture_hankel_integral(n, 0.0, radius), 0.0);
    }
}

#[test]
fn crossing_of_orders_three_and_four() {
    // mpmath: root of quad(t J3) - quad(t J4) at R = 1.85
    let k = find_k_eq(3, 4, 1.85, (3.0, 3.8)).unwrap();
    assert!((k - 3.432_108_342_310_86).abs() < 1e-8 * 3.43);
    assert!((k / 3.43 - 1.0).abs() < 0.01);
    let diff = aperture_hankel_integral(3, k, 1.85) - aperture_hankel_integral(4, k, 1.85);
    assert!(diff.abs() < 1e-10);

    let k2 = find_k_eq(3, 4, 3.70, (1.5, 1.9)).unwrap();
    assert!((k2 - 1.715).abs() < 0.01 * 1.715);
    assert!((k2 * 3.70 - k * 1.85).abs() < 1e-8);
}

#[test]
fn crossing_without_sign_change_is_an_error() {
    assert!(matches!(
        find_k_eq(3, 4, 1.85, (0.5, 1.0)),
        Err(Error::NoSignChange { .. })
    ));
    assert!(find_k_eq(3, 3, 1.85, (0.5, 5.0)).is_err());
}

#[test]
fn grid_table_agrees_with_quadrature() {
    let table = ApertureHankelTable::new(&[0, 3, 4, 7], 200.0).unwrap();
    for n in [0u32, 3, 4, 7] {
        for k in [0.01, 0.4, 3.43, 15.0, 47.1, 99.0] {
            let q = aperture_hankel_integral(n, k, 1.85);
            let t = table.eval(n, k, 1.85);
            assert!((q - t).abs() < 1e-9 * 1.85 * 1.85, "n={n} k={k}: {q} vs {t}");
        }
    }
}

/// `(2l−1)!!·(−1)^l`, the closed form of `P_l^l(0)`.
fn sectoral_at_equator(l: u32) -> f64 {
    let mut v = 1.0;
    for i in 1..=l {
        v *= -((2 * i - 1) as f64);
    }
    v
}

#[test]
fn sectoral_legendre_sign_flip() {
    assert_eq!(assoc_legendre(1, 1, 0.0).unwrap(), -1.0);
    for l in 0..=8u32 {
        let p = assoc_legendre(l, l as i32, 0.0).unwrap();
        let next = assoc_legendre(l + 1, l as i32 + 1, 0.0).unwrap();
        assert_eq!(p, sectoral_at_equator(l));
        assert_eq!(next, -((2 * l + 1) as f64) * p);
        assert!(next.signum() == -p.signum());
    }
}

#[test]
fn legendre_orthogonality() {
    let rule = GaussLegendre::new(40);
    for m in 0..=4i32 {
        for l in (m as u32)..=8 {
            for lp in (l + 1)..=8 {
                let v = rule.integrate(
                    &|x| assoc_legendre(l, m, x).unwrap() * assoc_legendre(lp, m, x).unwrap(),
                    -1.0,
                    1.0,
                );
                assert!(v.abs() < 1e-8, "m={m} l={l} l'={lp}: {v:e}");
            }
        }
    }
}

#[test]
fn legendre_against_explicit_polynomials() {
    for &x in &[-0.9, -0.2, 0.0, 0.35, 0.77] {
        let s: f64 = (1.0f64 - x * x).sqrt();
        let p33 = -15.0 * s.powi(3);
        let p43 = -105.0 * x * s.powi(3);
        let p44 = 105.0 * s.powi(4);
        assert!((assoc_legendre(3, 3, x).unwrap() - p33).abs() < 1e-12 * p33.abs().max(1.0));
        assert!((assoc_legendre(4, 3, x).unwrap() - p43).abs() < 1e-12 * 105.0);
        assert!((assoc_legendre(4, 4, x).unwrap() - p44).abs() < 1e-12 * 105.0);
        // P_4^{-4} = P_4^4 / 8!
        let neg = assoc_legendre(4, -4, x).unwrap();
        assert!((neg - p44 / 40320.0).abs() < 1e-15);
    }
}

fn k_table(kmax: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| kmax * i as f64 / (count - 1) as f64).collect()
}

#[test]
fn gaussian_is_self_reciprocal() {
    let c2 = 0.17;
    let k = k_table(14.0, 1401);
    let g: Vec<f64> = k.iter().map(|&v| (-0.5 * c2 * v * v).exp()).collect();
    let r: Vec<f64> = (0..60).map(|i| i as f64 * 0.05).collect();
    let h = inverse_hankel_transform(0, &k, &g, &r).unwrap();
    for (ri, hi) in r.iter().zip(&h) {
        let expect = (-ri * ri / (2.0 * c2)).exp();
        assert!((hi - expect).abs() < 1e-6, "r={ri}: {hi} vs {expect}");
    }
}

#[test]
fn transform_decays_outside_support() {
    let c2 = 0.17;
    let k = k_table(14.0, 1401);
    let g: Vec<f64> = k.iter().map(|&v| (-0.5 * c2 * v * v).exp()).collect();
    let h = inverse_hankel_transform(0, &k, &g, &[0.0, 5.0]).unwrap();
    assert!(h[1].abs() < 1e-6);
}

#[test]
fn non_decaying_table_rejected() {
    let k = k_table(5.0, 100);
    let g = vec![1.0; 100];
    assert!(inverse_hankel_transform(2, &k, &g, &[0.5]).is_err());
}

#[test]
fn chirped_fourth_order_profile() {
    let (c, c2) = (-0.22, 0.17);
    let k = k_table(14.0, 1401);
    let g: Vec<Complex64> = k
        .iter()
        .map(|&v| Complex64::from_polar((-0.5 * c2 * v * v).exp(), c * v * v))
        .collect();
    let r: Vec<f64> = (0..100).map(|i| i as f64 * 0.03).collect();
    let h = inverse_hankel_transform_complex(4, &k, &g, &r).unwrap();
    let peak = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 1e-12);
    assert!(h[0].norm() < 1e-12);
    // the chirp produces a nontrivial radial phase
    let phases: Vec<f64> = h[10..60].iter().map(|v| v.arg()).collect();
    let spread = phases.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - phases.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_scale_law(n in 0u32..8, k in 0.05f64..25.0, r in 0.5f64..4.0, rp in 0.5f64..4.0) {
        let lhs = aperture_hankel_integral(n, k, r);
        let rhs = (r / rp).powi(2) * aperture_hankel_integral(n, k * r / rp, rp);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * r * r, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn series_and_quadrature_agree(n in 0u32..12, k in 0.01f64..60.0) {
        let a = aperture_hankel_integral(n, k, 1.0);
        let b = aperture_hankel_series(n, k, 1.0);
        prop_assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn bessel_bounded(n in 0u32..64, x in 0.0f64..100.0) {
        let v = jn(n, x);
        prop_assert!(v.abs() <= 1.0);
    }
}
