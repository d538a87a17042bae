use std::path::PathBuf;

use oamlab::config::{parse_config, parse_config_str, to_toml_string, Command, Phantom};
use oamlab::units::{format_quantity, parse_quantity, Dimension};
use proptest::prelude::*;

fn example_configs() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    paths.sort();
    paths
}

#[test]
fn shipped_examples_round_trip() {
    let paths = example_configs();
    assert!(paths.len() >= 7);
    for path in paths {
        let cfg = parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let normal = to_toml_string(&cfg);
        let again = parse_config_str(&normal).unwrap_or_else(|e| panic!("{}: {e}\n{normal}", path.display()));
        assert_eq!(cfg, again, "{}", path.display());
        assert_eq!(normal, to_toml_string(&again));
    }
}

#[test]
fn hologram_example_values() {
    let cfg = parse_config(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/diffract.toml")).unwrap();
    assert_eq!(cfg.command, Command::Diffract);
    let mask = cfg.mask.unwrap();
    assert_eq!((mask.m, mask.n, mask.k0), (3, 4, 15.0));
    assert!((mask.radius - 1.85).abs() < 1e-15);
    assert!((mask.kappa - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert_eq!(cfg.diffraction.window, Some(6.0));
}

#[test]
fn delay_is_read_in_femtoseconds() {
    let cfg = parse_config_str("command = \"mpi\"\n[mpi]\nm = 4\nn = 3\ntau = \"-826.8 au_time\"\n").unwrap();
    assert!((cfg.mpi.unwrap().tau + 20.0).abs() < 1e-3);
}

#[test]
fn missing_file_is_a_config_error() {
    let err = parse_config("/nonexistent/oamlab.toml").unwrap_err();
    assert!(err.to_string().contains("cannot read"));
}

#[test]
fn wrong_types_and_dimensions_are_all_listed() {
    let text = r#"
command = "tomo"
seed = -1
[tomography]
phantom = "cube"
size = 31
step = "4 per_um"
[grid]
size = "big"
[unknown]
x = 1
"#;
    let err = parse_config_str(text).unwrap_err();
    let all = err.problems.join("\n");
    for key in ["seed:", "tomography.phantom:", "tomography.size:", "tomography.step:", "grid.size:", "unknown: unknown key"] {
        assert!(all.contains(key), "{key} not reported in\n{all}");
    }
}

#[test]
fn phantom_defaults() {
    let cfg = parse_config_str("command = \"tomo\"\n[tomography]\n").unwrap();
    let t = cfg.tomography.unwrap();
    assert_eq!((t.phantom, t.size, t.projections), (Phantom::Pmd, 128, 45));
    assert!((t.step - 4f64.to_radians()).abs() < 1e-15);
}

fn dimension() -> impl Strategy<Value = Dimension> {
    prop_oneof![
        Just(Dimension::Length),
        Just(Dimension::InverseLength),
        Just(Dimension::Area),
        Just(Dimension::Time),
        Just(Dimension::Angle),
        Just(Dimension::Energy),
        Just(Dimension::Momentum),
    ]
}

proptest! {
    #[test]
    fn quantities_round_trip_exactly(v in -1e6f64..1e6, dim in dimension()) {
        prop_assert_eq!(parse_quantity(&format_quantity(v, dim), dim).unwrap(), v);
    }

    #[test]
    fn mask_configs_round_trip(
        m in 0u32..8, n in 0u32..8, kappa in -7.0f64..7.0, k0 in 0.0f64..80.0,
        radius in 0.1f64..5.0, thr in proptest::option::of(0.05f64..0.95),
    ) {
        let bin = thr.map(|t| format!("binarize = {t:?}\n")).unwrap_or_default();
        let text = format!(
            "command = \"mask\"\n[mask]\nm = {m}\nn = {n}\nkappa = \"{kappa:?} rad\"\nk0 = \"{k0:?} per_um\"\nradius = \"{radius:?} um\"\n{bin}"
        );
        let cfg = parse_config_str(&text).unwrap();
        prop_assert_eq!(&cfg, &parse_config_str(&to_toml_string(&cfg)).unwrap());
    }
}
