use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sonohbt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonohbt"))
        .args(args)
        .env_remove("SONOHBT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sonohbt(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    sonohbt(args).status.code().expect("exit code")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .to_string()
}

/// (abscissa, value) rows of a scan CSV.
fn rows(path: &Path) -> Vec<(f64, f64)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("abscissa"))
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .collect()
}

#[test]
fn figure_one_matches_golden_files() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["scan", "--figure", "fig1", "--deterministic", "--out-dir", d]);
    for r in ["10", "100", "1000", "3000"] {
        let name = format!("fig1_rperp_{r}nm.csv");
        let got = std::fs::read(dir.path().join(&name)).unwrap();
        assert_eq!(got, std::fs::read(golden(&name)).unwrap(), "{name}");
    }
}

#[test]
fn figure_three_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["intercept", "--deterministic", "--out-dir", dir.path().to_str().unwrap()]);
    let got = std::fs::read(dir.path().join("fig3_intercept.csv")).unwrap();
    assert_eq!(got, std::fs::read(golden("fig3_intercept.csv")).unwrap());
    let knee: f64 = value(&out, "knee_fs").parse().unwrap();
    assert!((knee - 90.675).abs() < 1e-3, "{knee}");
    let at_knee: f64 = value(&out, "intercept_at_knee").parse().unwrap();
    assert!((at_knee - (1.0 + 0.5 / 5f64.sqrt())).abs() < 1e-12);
}

#[test]
fn figure_one_curves_stay_in_window() {
    let dir = TempDir::new().unwrap();
    ok(&["scan", "--figure", "fig1", "--deterministic", "--out-dir", dir.path().to_str().unwrap()]);
    // ξ_max = 6√3 eV at E = 3 eV: tan(φ/2) = √3.
    let phi_max = 2.0 * 3f64.sqrt().atan();
    for r in ["10", "100", "1000", "3000"] {
        let rows = rows(&dir.path().join(format!("fig1_rperp_{r}nm.csv")));
        assert_eq!(rows[0], (0.0, 1.5));
        assert!(rows.iter().all(|&(phi, c)| phi <= phi_max + 1e-12 && (1.0..=1.5).contains(&c)));
        assert!(rows.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}

#[test]
fn figure_two_one_picosecond_crossing() {
    let dir = TempDir::new().unwrap();
    ok(&["scan", "--figure", "fig2", "--deterministic", "--out-dir", dir.path().to_str().unwrap()]);
    let rows = rows(&dir.path().join("fig2_rpar_1ps.csv"));
    let target = 1.0 + 0.5 / std::f64::consts::E;
    let i = rows.iter().position(|&(_, c)| c < target).unwrap();
    let ((q1, c1), (q2, c2)) = (rows[i - 1], rows[i]);
    let crossing_mev = 1e3 * (q1 + (target - c1) * (q2 - q1) / (c2 - c1));
    assert!((crossing_mev - 0.658).abs() < 0.01, "{crossing_mev}");
}

#[test]
fn deterministic_reruns_and_embedded_configs_reproduce_files() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let c = TempDir::new().unwrap();
    let args = ["scan", "--rperp-nm", "250", "--points", "31", "--name", "run", "--deterministic"];
    ok(&[&args[..], &["--out-dir", a.path().to_str().unwrap()]].concat());
    ok(&[&args[..], &["--out-dir", b.path().to_str().unwrap()]].concat());
    let first = std::fs::read(a.path().join("run.csv")).unwrap();
    assert_eq!(first, std::fs::read(b.path().join("run.csv")).unwrap());

    let src = a.path().join("run.csv");
    ok(&[
        "scan",
        "--config",
        src.to_str().unwrap(),
        "--deterministic",
        "--out-dir",
        c.path().to_str().unwrap(),
    ]);
    assert_eq!(first, std::fs::read(c.path().join("run.csv")).unwrap());
}

#[test]
fn timestamps_without_deterministic_flag() {
    let dir = TempDir::new().unwrap();
    ok(&["scan", "--points", "5", "--name", "t", "--out-dir", dir.path().to_str().unwrap()]);
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("# generated_unix="));
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sonohbt"))
        .args(["scan", "--points", "5", "--name", "env"])
        .env("SONOHBT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("env.csv").exists());
}

#[test]
fn monte_carlo_scan_is_seeded() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "scan", "--engine", "mc", "--n-pairs", "20000", "--seed", "7", "--points", "6", "--name", "mc",
        "--deterministic",
    ];
    ok(&[&args[..], &["--out-dir", a.path().to_str().unwrap()]].concat());
    ok(&[&args[..], &["--out-dir", b.path().to_str().unwrap()]].concat());
    let text = std::fs::read_to_string(a.path().join("mc.csv")).unwrap();
    assert_eq!(text, std::fs::read_to_string(b.path().join("mc.csv")).unwrap());
    assert!(rows(&a.path().join("mc.csv"))[0].1 == 1.5);
}

#[test]
fn fit_recovers_radius_from_emitted_scan() {
    let dir = TempDir::new().unwrap();
    ok(&["scan", "--figure", "fig1", "--deterministic", "--out-dir", dir.path().to_str().unwrap()]);
    for method in ["linearized-log", "nonlinear-ls"] {
        let out = ok(&["fit", dir.path().join("fig1_rperp_100nm.csv").to_str().unwrap(), "--method", method]);
        let r: f64 = value(&out, "radius_nm").parse().unwrap();
        let a: f64 = value(&out, "intercept").parse().unwrap();
        assert!((r - 100.0).abs() < 1e-6, "{method}: {r}");
        assert!((a - 1.5).abs() < 1e-9);
    }
    let json = ok(&[
        "fit",
        dir.path().join("fig1_rperp_10nm.csv").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!((v["radius"].as_f64().unwrap() - 10.0).abs() < 1e-6, "{v}");
}

#[test]
fn fit_of_flat_scan_is_unfittable() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("flat.csv");
    let mut text = String::from("# sonohbt scan v1\n# kind=transverse\n# energy_eV=3\nabscissa,value,stat_error\n");
    for i in 0..10 {
        text.push_str(&format!("{},1.5,0\n", 0.01 * i as f64));
    }
    std::fs::write(&path, text).unwrap();
    assert_eq!(code(&["fit", path.to_str().unwrap()]), 5);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    // No grid point inside the window.
    assert_eq!(code(&["scan", "--grid", "7", "--out-dir", d]), 3);
    // Unknown key.
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[source]\nsigmar = 3\n").unwrap();
    let out = sonohbt(&["scan", "--config", cfg.to_str().unwrap(), "--out-dir", d]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigmar"));
    // Missing file.
    assert_eq!(code(&["fit", dir.path().join("none.csv").to_str().unwrap()]), 2);
    // Quadrature over a phase it cannot resolve.
    assert_eq!(
        code(&["scan", "--engine", "quadrature", "--sigma-r-nm", "3000", "--points", "11", "--out-dir", d]),
        4
    );
    // Negative band width.
    assert_eq!(code(&["intercept", "--dlambda-nm=-1", "--out-dir", d]), 3);
}

#[test]
fn zero_band_width_gives_flat_intercept() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["intercept", "--dlambda-nm", "0", "--deterministic", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(value(&out, "knee_fs"), "inf");
    assert!(rows(&dir.path().join("fig3_intercept.csv")).iter().all(|&(_, c)| c == 1.5));
}

#[test]
fn ten_nanometre_filter_moves_knee() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["intercept", "--dlambda-nm", "10", "--deterministic", "--out-dir", dir.path().to_str().unwrap()]);
    let knee: f64 = value(&out, "knee_fs").parse().unwrap();
    assert!((knee - 9.0675).abs() < 1e-3, "{knee}");
}

#[test]
fn resolve_examples() {
    let out = ok(&["resolve", "--target", "transverse-radius", "--rperp-nm", "10"]);
    assert_eq!(value(&out, "verdict"), "marginal");
    assert_eq!(value(&out, "limiting_factor"), "window_edge");

    let out = ok(&["resolve", "--target", "transverse-radius", "--rperp-nm", "100"]);
    assert_eq!(value(&out, "verdict"), "resolvable");
    assert_eq!(value(&out, "limiting_factor"), "none");

    let out = ok(&[
        "resolve", "--target", "transverse-radius", "--rperp-nm", "3000", "--angular-resolution-deg", "2",
    ]);
    assert_eq!(value(&out, "verdict"), "unresolvable");
    assert_eq!(value(&out, "limiting_factor"), "angular_resolution");

    let out = ok(&["resolve", "--target", "pulse-length", "--rpar-ps", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "unresolvable");
    assert_eq!(v["limiting_factor"], "filter_bandwidth");
    let needed = v["required_setting"]["value"].as_f64().unwrap();
    assert!((needed * 1e3 - 0.6582).abs() < 1e-4);

    let out = ok(&["resolve", "--target", "pulse-length", "--delta-tau-fs", "10"]);
    assert_eq!(value(&out, "verdict"), "resolvable");

    assert_eq!(code(&["resolve", "--target", "pulse-length"]), 2);
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&["scan", "--figure", "fig9"]), 2);
    assert_eq!(code(&["fit"]), 2);
}
