//! End-to-end binary tests: flag parsing, JSON schemas, exit codes, and
//! byte-determinism of artifacts across thread counts.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-atlas"))
}

fn write_single_mode(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("mono.json");
    std::fs::write(&p, r#"{"type":"trig","l":1,"m":1,"coeffs":[[1.0,0.0]]}"#).unwrap();
    p
}

#[test]
fn freq_expand_emits_schema_v1() {
    let out = bin()
        .args(["freq", "expand", "--alpha", "golden", "--terms", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["a"].as_array().unwrap().len(), 8);
    assert_eq!(doc["q"][4], 5); // Fibonacci
    assert!((doc["beta_estimate"].as_f64().unwrap() - 2.0f64.ln()).abs() < 1e-12);
}

#[test]
fn gd_eval_single_mode() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write_single_mode(dir.path());
    let out = bin()
        .args(["gd", "eval", "--potential"])
        .arg(&pot)
        .args(["--z", "2,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["method"], "jensen");
    assert!((doc["value"].as_f64().unwrap() - 2.0f64.ln()).abs() < 1e-10);
}

#[test]
fn malformed_box_is_usage_error_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write_single_mode(dir.path());
    let out_dir = dir.path().join("should-not-exist");
    let out = bin()
        .args(["spectrum", "atlas", "--potential"])
        .arg(&pot)
        .args(["--lambda", "1", "--box", "oops", "--res", "64", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.exists());
}

#[test]
fn atlas_writes_manifest_with_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write_single_mode(dir.path());
    let out_dir = dir.path().join("atlas");
    let out = bin()
        .args(["spectrum", "atlas", "--potential"])
        .arg(&pot)
        .args(["--lambda", "1", "--box", "-2,-2,2,2", "--res", "64", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["schema"], "v1");
    assert_eq!(manifest["failed"], false);
    for name in ["grid.csv", "curves.json", "picture.ppm", "picture.svg"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
        let sum = manifest["artifacts"][name].as_str().unwrap();
        assert_eq!(sum.len(), 64, "sha256 for {name}");
    }
    let ppm = std::fs::read(out_dir.join("picture.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n64 64\n255\n"));
}

#[test]
fn oracle_check_reports_zero_disagreements() {
    for (case, lambda) in [
        ("app2", "1"),
        ("two5", "2"),
        ("hn1d", "0.5"),
        ("two6", "0.5"),
        ("pwl", "0.15"),
        ("app3", "1.2"),
        ("hn2d", "1.0"),
    ] {
        let out = bin()
            .args([
                "oracle", "check", "--case", case, "--lambda", lambda, "--samples", "200",
                "--seed", "5",
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "case {case}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(doc["disagree"], 0, "case {case}");
        assert_eq!(
            doc["agree"].as_u64().unwrap() + doc["tube"].as_u64().unwrap(),
            200,
            "case {case}"
        );
    }
}

#[test]
fn floquet_cloud_schema() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write_single_mode(dir.path());
    let cloud = dir.path().join("cloud.json");
    let out = bin()
        .args(["op", "floquet", "--potential"])
        .arg(&pot)
        .args(["--lambda", "1", "--freq", "1/2", "--theta-grid", "1", "--phi-grid", "1", "--out"])
        .arg(&cloud)
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cloud).unwrap()).unwrap();
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["q"], 2);
    // θ = 0, φ = 0, λ = 1: double root at the origin.
    for root in doc["roots"].as_array().unwrap() {
        assert!(root[0].as_f64().unwrap().abs() < 1e-6);
        assert!(root[1].as_f64().unwrap().abs() < 1e-6);
    }
    // The manifest lands next to the artifact.
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn artifacts_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write_single_mode(dir.path());
    let run = |threads: &str, sub: &str| {
        let out_dir = dir.path().join(format!("run-{sub}-{threads}"));
        let status = bin()
            .args(["--threads", threads, "spectrum", "atlas", "--potential"])
            .arg(&pot)
            .args(["--lambda", "2", "--box", "-3,-3,3,3", "--res", "96", "--out"])
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
                .unwrap();
        manifest["artifacts"].clone()
    };
    let a = run("1", "a");
    let b = run("8", "b");
    assert_eq!(a, b, "artifact checksums differ between 1 and 8 threads");
}

#[test]
fn gallery_reproduces_hole_topology() {
    let dir = tempfile::tempdir().unwrap();
    // λ < e^g: hole at the centre; λ = e^g: filled.
    let run = |lambda: &str, name: &str| {
        let out_dir = dir.path().join(name);
        let status = bin()
            .args([
                "gallery", "--case", "hn2d", "--g", "1", "--lambda", lambda, "--res", "61",
                "--out",
            ])
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        let ppm = std::fs::read(out_dir.join("picture.ppm")).unwrap();
        let header_end = ppm
            .windows(4)
            .position(|w| w == b"255\n")
            .unwrap()
            + 4;
        let (w, h) = (61usize, 61usize);
        let centre = ppm[header_end + 3 * ((h / 2) * w + w / 2)];
        centre
    };
    let holed = run("0.5", "holed");
    let filled = run("2.718281828459045", "filled");
    assert_eq!(holed, 255, "centre must be resolvent-white below e^g");
    assert_ne!(filled, 255, "centre must be in-spectrum at e^g");
}

#[test]
fn unknown_case_is_usage_error() {
    let out = bin()
        .args(["gallery", "--case", "nope", "--lambda", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
