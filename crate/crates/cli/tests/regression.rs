//! Frozen regression fixtures: outputs generated by the first validated
//! build, compared byte-for-byte. The library is deterministic, so any drift
//! here means the numerics changed. Regenerate deliberately with the
//! commands named in each fixture's comment line (see README) after
//! confirming the change is intended. Pinned to one libm: a different C
//! library may round transcendentals differently.

use std::process::Command;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run_to_tmp(name: &str, args: &[&str]) -> Vec<u8> {
    let out = std::env::temp_dir().join(format!("tfqkd-regression-{name}"));
    let status = Command::new(env!("CARGO_BIN_EXE_tfqkd"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    std::fs::read(&out).unwrap()
}

#[test]
fn sweep_two_decoys_matches_fixture() {
    let got = run_to_tmp(
        "sweep2.csv",
        &[
            "sweep", "--decoys", "2", "--pd", "1e-7", "--loss-start", "20", "--loss-end", "40",
            "--loss-step", "5",
        ],
    );
    let want = std::fs::read(fixture("sweep_two_pd1e-7.csv")).unwrap();
    assert_eq!(got, want, "two-decoy sweep drifted from the frozen fixture");
}

#[test]
fn sweep_infinite_reference_matches_fixture() {
    let got = run_to_tmp(
        "sweepinf.csv",
        &[
            "sweep", "--decoys", "inf", "--pd", "1e-7", "--loss-start", "20", "--loss-end", "40",
            "--loss-step", "5",
        ],
    );
    let want = std::fs::read(fixture("sweep_inf_pd1e-7.csv")).unwrap();
    assert_eq!(got, want, "infinite-decoy sweep drifted from the frozen fixture");
}

#[test]
fn optimize_four_decoys_matches_fixture() {
    let got = run_to_tmp(
        "opt4.json",
        &["optimize", "--decoys", "4", "--pd", "1e-7", "--loss", "40"],
    );
    let want = std::fs::read(fixture("optimize_four_40db.json")).unwrap();
    assert_eq!(got, want, "four-decoy optimize drifted from the frozen fixture");
}

#[test]
fn fluctuate_two_decoys_matches_fixture() {
    let got = run_to_tmp(
        "fluct2.csv",
        &[
            "fluctuate", "--decoys", "2", "--pd", "1e-7", "--magnitude", "0.4", "--loss-start",
            "20", "--loss-end", "30", "--loss-step", "5",
        ],
    );
    let want = std::fs::read(fixture("fluctuate_two_40pct.csv")).unwrap();
    assert_eq!(got, want, "fluctuation analysis drifted from the frozen fixture");
}
