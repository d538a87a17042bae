use std::path::Path;
use std::process::{Command, Output};

fn oamlab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oamlab"));
    cmd.args(args).env_remove("OAMLAB_THREADS").env("RUST_LOG", "info");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary starts")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TOPOLOGY: &str = "command = \"topology\"\n[topology]\nm = 4\nn = 3\nsteps = 5\n";

#[test]
fn successful_run_writes_manifest_and_key_value_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "t.toml", TOPOLOGY);
    let out = tmp.path().join("out");
    let o = oamlab(&["topology", "--config", &cfg, "--out", path(&out)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let log = String::from_utf8_lossy(&o.stderr);
    assert!(log.contains("lz_max_abs_error="), "{log}");
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    let names: Vec<&str> = manifest.lines().map(|l| l.split("  ").nth(1).unwrap()).collect();
    assert_eq!(names, ["config.toml", "metrics.txt", "sweep.csv"]);
    for line in manifest.lines() {
        let mut parts = line.split("  ");
        let (hash, name, bytes) = (parts.next().unwrap(), parts.next().unwrap(), parts.next().unwrap());
        assert_eq!(hash.len(), 64);
        assert_eq!(std::fs::metadata(out.join(name)).unwrap().len().to_string(), bytes);
    }
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn config_problems_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", "command = \"mask\"\n[mask]\nm = 4\nn = 3\nk0 = 15\nradius = \"1.85 um\"\n");
    let o = oamlab(&["mask", "--config", &bad, "--out", path(tmp.path())], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mask.k0"));

    let cfg = write(tmp.path(), "t.toml", TOPOLOGY);
    let o = oamlab(&["mask", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2), "command mismatch");
    let o = oamlab(&["reproduce", "fig9"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = oamlab(&["topology"], &[]);
    assert_eq!(o.status.code(), Some(2), "missing --config");
}

#[test]
fn module_failures_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    // the analysis ring lies far outside the cropped sideband
    let cfg = write(
        tmp.path(),
        "d.toml",
        "command = \"diffract\"\n[grid]\nsize = 256\n[mask]\nm = 3\nn = 4\nk0 = \"15 per_um\"\nradius = \"1.85 um\"\n[diffraction]\nring = \"40 per_um\"\n",
    );
    let o = oamlab(&["diffract", "--config", &cfg, "--out", path(&tmp.path().join("o"))], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn thread_count_comes_from_flag_or_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "t.toml", TOPOLOGY);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(oamlab(&["topology", "--config", &cfg, "--out", path(&a), "--threads", "1"], &[]).status.success());
    assert!(oamlab(&["topology", "--config", &cfg, "--out", path(&b)], &[("OAMLAB_THREADS", "2")]).status.success());
    assert_eq!(std::fs::read(a.join("manifest.txt")).unwrap(), std::fs::read(b.join("manifest.txt")).unwrap());
    let o = oamlab(&["topology", "--config", &cfg, "--threads", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = oamlab(&["topology", "--config", &cfg], &[("OAMLAB_THREADS", "many")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_selects_the_random_phantom() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.toml",
        "command = \"tomo\"\nseed = 1\n[tomography]\nphantom = \"blobs\"\nsize = 32\nprojections = 30\nstep = \"6 deg\"\n",
    );
    let run = |name: &str, extra: &[&str]| {
        let dir = tmp.path().join(name);
        let mut args = vec!["tomo", "--config", &cfg, "--out", path(&dir)];
        args.extend_from_slice(extra);
        let o = oamlab(&args, &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.join("reconstruction.oamf")).unwrap()
    };
    let first = run("a", &[]);
    assert_eq!(first, run("b", &[]));
    assert_ne!(first, run("c", &["--seed", "2"]));
}
