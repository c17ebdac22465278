//! End-to-end tests of the `drwsim` binary: exit codes, artifact layout,
//! manifest invariants, and byte-determinism across worker counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use drwsim::manifest::sha256_hex;

fn drwsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drwsim"))
}

fn run_with_config(config: &str, extra: &[&str]) -> (Output, PathBuf, tempfile::TempDir) {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("scenario.toml");
    fs::write(&cfg_path, config).expect("write config");
    let out_dir = dir.path().join("out");
    let output = drwsim()
        .arg("run")
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .args(extra)
        .output()
        .expect("spawn drwsim");
    (output, out_dir, dir)
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

const STRAIGHT_CONFIG: &str = r#"
schema_version = 1
scenario = "straight"

[geometry]
a = "160 um"
b = "80 um"

[materials]
core = "paper-core-worst"
clad = "paper-clad"

[band]
start = "100 GHz"
stop = "110 GHz"
points = 2

[straight]
length = "3 cm"
"#;

const TAPER_CONFIG: &str = r#"
schema_version = 1
scenario = "taper"

[geometry]
a = "160 um"
b = "80 um"

[materials]
core = "paper-core-lossless"
clad = "paper-clad"

[band]
start = "90 GHz"
stop = "150 GHz"
points = 3

[taper]
length = "2 mm"
segments = 16
basis_modes = 3
"#;

#[test]
fn config_problems_exit_with_code_2_and_name_the_offence() {
    // misspelled key
    let bad = STRAIGHT_CONFIG.replace("length = \"3 cm\"", "lenght = \"3 cm\"");
    let (out, _, _tmp) = run_with_config(&bad, &[]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("lenght"), "stderr: {}", stderr_of(&out));

    // unsupported schema revision
    let bad = STRAIGHT_CONFIG.replace("schema_version = 1", "schema_version = 2");
    let (out, _, _tmp) = run_with_config(&bad, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("schema_version 2"));

    // bare number where a unit is required
    let bad = STRAIGHT_CONFIG.replace("a = \"160 um\"", "a = \"160\"");
    let (out, _, _tmp) = run_with_config(&bad, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unit suffix"));

    // missing config file
    let out = drwsim()
        .args(["run", "--config", "/nonexistent/x.toml", "--out", "/tmp/x"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));

    // zero workers
    let (out, _, _tmp) = run_with_config(STRAIGHT_CONFIG, &["--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn straight_run_writes_artifacts_and_an_honest_manifest() {
    let (out, out_dir, _tmp) = run_with_config(STRAIGHT_CONFIG, &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let manifest_text = fs::read_to_string(out_dir.join("manifest.toml")).expect("manifest");
    let manifest: toml::Value = manifest_text.parse().expect("manifest parses");
    assert_eq!(manifest["tool"].as_str(), Some("drwsim"));
    assert_eq!(manifest["scenario"].as_str(), Some("straight"));
    assert_eq!(
        manifest["config_sha256"].as_str(),
        Some(sha256_hex(STRAIGHT_CONFIG.as_bytes()).as_str())
    );
    assert_eq!(manifest["settings"]["cells_per_wavelength"].as_integer(), Some(20));

    // every artifact listed exists, is non-empty, and sizes match
    let artifacts = manifest["artifacts"].as_array().expect("artifact list");
    let names: Vec<&str> = artifacts
        .iter()
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"straight.s2p"), "names: {names:?}");
    assert!(names.contains(&"straight.csv"));
    for a in artifacts {
        let path = out_dir.join(a["name"].as_str().unwrap());
        let meta = fs::metadata(&path).expect("artifact exists");
        assert!(meta.len() > 0);
        assert_eq!(meta.len(), a["bytes"].as_integer().unwrap() as u64);
    }
    // stage timings recorded
    assert!(manifest["stages"].as_array().map_or(0, |s| s.len()) >= 2);

    // the Touchstone export is self-consistent with the loss column
    let s2p = fs::read_to_string(out_dir.join("straight.s2p")).expect("s2p");
    assert!(s2p.contains("# GHz S RI R 50"));
    assert!(s2p.lines().any(|l| l.starts_with("! config sha256:")));
    let csv = fs::read_to_string(out_dir.join("straight.csv")).expect("csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("f_ghz,neff,alpha_np_per_m,loss_db_per_mm,insertion_loss_db")
    );
    let first: Vec<f64> = lines
        .next()
        .expect("data row")
        .split(',')
        .map(|t| t.parse().unwrap())
        .collect();
    let (f_ghz, neff, il_db) = (first[0], first[1], first[4]);
    assert_eq!(f_ghz, 100.0);
    assert!(neff > 1.0 && neff < 1000f64.sqrt(), "neff = {neff}");
    assert!(il_db > 0.0, "a lossy 3 cm channel must attenuate");

    // |S21| in the s2p matches the insertion-loss column
    let data_line = s2p
        .lines()
        .find(|l| l.starts_with("100"))
        .expect("100 GHz record");
    let v: Vec<f64> = data_line
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let s21_mag = (v[3] * v[3] + v[4] * v[4]).sqrt();
    assert!((-20.0 * s21_mag.log10() - il_db).abs() < 1e-9);
}

#[test]
fn worker_count_does_not_change_artifact_bytes() {
    let (out1, dir1, _t1) = run_with_config(TAPER_CONFIG, &["--workers", "1", "--seed-metadata"]);
    assert_eq!(out1.status.code(), Some(0), "stderr: {}", stderr_of(&out1));
    let (out4, dir4, _t4) = run_with_config(TAPER_CONFIG, &["--workers", "4", "--seed-metadata"]);
    assert_eq!(out4.status.code(), Some(0), "stderr: {}", stderr_of(&out4));

    for name in ["taper.s2p", "taper.csv"] {
        let b1 = fs::read(dir1.join(name)).expect("artifact 1");
        let b4 = fs::read(dir4.join(name)).expect("artifact 4");
        assert_eq!(b1, b4, "{name} differs between 1 and 4 workers");
    }

    // identical invocations with seeded metadata also agree on the manifest
    let (out1b, dir1b, _t1b) =
        run_with_config(TAPER_CONFIG, &["--workers", "1", "--seed-metadata"]);
    assert_eq!(out1b.status.code(), Some(0));
    assert_eq!(
        fs::read(dir1.join("manifest.toml")).unwrap(),
        fs::read(dir1b.join("manifest.toml")).unwrap(),
        "seeded manifests should be byte-stable"
    );
}

#[test]
fn taper_artifacts_report_a_low_loss_passband() {
    let (out, dir, _tmp) = run_with_config(TAPER_CONFIG, &["--workers", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let csv = fs::read_to_string(dir.join("taper.csv")).expect("taper.csv");
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<&str> = line.split(',').collect();
        let s11_db: f64 = v[1].parse().unwrap();
        let s21_db: f64 = v[2].parse().unwrap();
        assert!(s11_db < -10.0, "taper should be well matched: {line}");
        assert!(s21_db > -1.0, "taper should transmit: {line}");
        rows += 1;
    }
    assert_eq!(rows, 3);
}

fn parse_field_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).expect("field csv");
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn modes_shorthand_dumps_fields_peaking_inside_the_core() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let out = drwsim()
        .args(["modes", "--n-modes", "3", "--out"])
        .arg(&out_dir)
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let modes_csv = fs::read_to_string(out_dir.join("modes.csv")).expect("modes.csv");
    let n_modes = modes_csv.lines().count() - 1;
    assert!(n_modes >= 1, "at least the fundamental must be guided");

    let (header, rows) = parse_field_csv(&out_dir.join("mode_00.csv"));
    assert_eq!(
        header.join(","),
        "x_um,y_um,re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez,\
         re_Hx,im_Hx,re_Hy,im_Hy,re_Hz,im_Hz,abs_E"
    );
    // row count is the full grid: nx·ny distinct cell centers
    let nx = rows
        .iter()
        .map(|r| r[0].to_bits())
        .collect::<std::collections::HashSet<_>>()
        .len();
    let ny = rows
        .iter()
        .map(|r| r[1].to_bits())
        .collect::<std::collections::HashSet<_>>()
        .len();
    assert_eq!(rows.len(), nx * ny);

    // |E| peaks inside the 160×80 µm core
    let peak = rows
        .iter()
        .max_by(|p, q| p[14].partial_cmp(&q[14]).unwrap())
        .expect("rows");
    assert!(peak[14] > 0.0);
    assert!(
        peak[0].abs() <= 80.0 && peak[1].abs() <= 40.0,
        "peak at ({}, {}) µm lies outside the core",
        peak[0],
        peak[1]
    );

    // one field dump per reported mode
    for i in 0..n_modes {
        let path = out_dir.join(format!("mode_{i:02}.csv"));
        assert!(path.exists(), "missing {}", path.display());
    }
}

#[test]
fn output_directory_can_come_from_the_config() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("from-config");
    let config = format!(
        "{}\n[output]\ndirectory = \"{}\"\n",
        TAPER_CONFIG.trim(),
        out_dir.display()
    );
    let cfg_path = tmp.path().join("scenario.toml");
    fs::write(&cfg_path, &config).expect("write config");

    let out = drwsim()
        .arg("run")
        .arg("--config")
        .arg(&cfg_path)
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(out_dir.join("manifest.toml").exists());

    // without --out and without [output], the run must fail as a config error
    let cfg_path2 = tmp.path().join("no-out.toml");
    fs::write(&cfg_path2, TAPER_CONFIG).expect("write config");
    let out = drwsim()
        .arg("run")
        .arg("--config")
        .arg(&cfg_path2)
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("output"));
}
