//! Command-line behavior: exit codes, file round-trips, determinism.

use std::process::Command;

fn tfqkd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tfqkd"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("tfqkd-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bad_flags_exit_2_without_output() {
    let out = tmp("never-written.csv");
    let _ = std::fs::remove_file(&out);
    let status = tfqkd()
        .args(["sweep", "--decoys", "5", "--pd", "1e-7"])
        .args(["--loss-start", "0", "--loss-end", "10", "--loss-step", "5"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists(), "no file on flag errors");

    // missing required flag
    let status = tfqkd().args(["optimize", "--pd", "1e-7"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // unknown key in config file
    let cfg = tmp("bad.json");
    std::fs::write(&cfg, r#"{"decoys":"2","pd":1e-7,"loss":20.0,"nope":1}"#).unwrap();
    let status = tfqkd()
        .arg("optimize")
        .arg("--config")
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "unknown config keys are rejected");
}

#[test]
fn config_file_defaults_and_flag_override() {
    let cfg = tmp("opt.json");
    std::fs::write(&cfg, r#"{"decoys":"inf","pd":1e-6,"loss":15.0}"#).unwrap();
    let out = tfqkd()
        .arg("optimize")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["loss_db"], 15.0);
    assert_eq!(v["decoys"], "inf");

    // flags override the file
    let out = tfqkd()
        .arg("optimize")
        .arg("--config")
        .arg(&cfg)
        .args(["--loss", "25"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["loss_db"], 25.0);
}

#[test]
fn simulate_bounds_round_trip_matches_in_process() {
    // simulate gains to CSV, ingest through `bounds`, and compare against
    // the in-process pipeline bit-exactly
    let gains_path = tmp("gains-roundtrip.csv");
    let status = tfqkd()
        .args(["simulate", "--decoys", "3", "--pd", "1e-7", "--loss", "30"])
        .args(["--intensities", "0.5,1e-2,1e-3"])
        .arg("--out")
        .arg(&gains_path)
        .status()
        .unwrap();
    assert!(status.success());

    let out = tfqkd()
        .args(["bounds", "--decoys", "3", "--intensities", "0.5,1e-2,1e-3"])
        .arg("--gains")
        .arg(&gains_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    // in-process reference
    let eta = 10f64.powf(-3.0);
    let ch = tfqkd_core::ChannelParams::with_standard_misalignment(eta, 1e-7).unwrap();
    let mu = [0.5, 1e-2, 1e-3];
    let set = tfqkd_core::IntensitySet::descending(mu.to_vec()).unwrap();
    let gains =
        tfqkd_core::channel::simulate_gain_table(&ch, &mu, tfqkd_core::Outcome::ClickC).unwrap();
    let input = tfqkd_core::bounds::three::ThreeDecoyInput::new(&set, gains).unwrap();
    let reference = tfqkd_core::bounds::three::three_decoy_bounds(&input).unwrap();

    let upper = doc["outcomes"][0]["upper"].as_object().unwrap();
    for (&(n, m), &v) in reference.upper.iter() {
        let got = upper[&format!("{n},{m}")].as_f64().unwrap();
        assert_eq!(got, v, "bound ({n},{m}) differs after CSV round trip");
    }
}

#[test]
fn shape_mismatch_rejected() {
    let gains_path = tmp("gains-3x3.csv");
    let status = tfqkd()
        .args(["simulate", "--decoys", "3", "--pd", "1e-7", "--loss", "30"])
        .args(["--intensities", "0.5,1e-2,1e-3"])
        .arg("--out")
        .arg(&gains_path)
        .status()
        .unwrap();
    assert!(status.success());
    // 3x3 table fed to --decoys 4
    let out = tfqkd()
        .args(["bounds", "--decoys", "4", "--intensities", "0.5,1e-2,1e-3,1.5"])
        .arg("--gains")
        .arg(&gains_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // separation violation named in the message
    let out = tfqkd()
        .args(["bounds", "--decoys", "3", "--intensities", "0.5,0.5,1e-3"])
        .arg("--gains")
        .arg(&gains_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("degenerate") || msg.contains("descending"), "{msg}");
}

#[test]
fn sweep_files_are_deterministic() {
    let a = tmp("sweep-a.csv");
    let b = tmp("sweep-b.csv");
    for out in [&a, &b] {
        let status = tfqkd()
            .args(["sweep", "--decoys", "2", "--pd", "1e-7"])
            .args(["--loss-start", "10", "--loss-end", "20", "--loss-step", "5"])
            .arg("--out")
            .arg(out)
            .env("TFQKD_THREADS", "2")
            .status()
            .unwrap();
        assert!(status.success());
    }
    let ta = std::fs::read(&a).unwrap();
    let tb = std::fs::read(&b).unwrap();
    assert_eq!(ta, tb, "byte-identical sweep outputs");
    // row count: start, +step, ..., end inclusive
    let text = String::from_utf8(ta).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 3, "header plus three points");
}

#[test]
fn validate_quick_passes() {
    let out = tfqkd().args(["validate", "--quick"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("gain-series consistency"));
    assert!(text.contains("PASS"));
}
