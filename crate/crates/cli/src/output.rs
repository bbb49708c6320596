//! Deterministic output formatting: 17 significant digits in scientific
//! notation for every floating-point value, so identical configs produce
//! byte-identical files.

use std::fmt::Write as _;

use tfqkd_core::types::{KeyRatePoint, YieldBoundSet};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sweep CSV: one row per loss point, with the config echoed as a comment.
pub fn sweep_csv(echo: &str, points: &[KeyRatePoint]) -> String {
    let mut out = String::new();
    writeln!(out, "# tfqkd sweep {echo}").unwrap();
    writeln!(out, "loss_db,eta,rate,plob,alpha2_opt,mu_opt,e_bit,e_ph").unwrap();
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(p.loss_db),
            fmt_f64(p.eta),
            fmt_f64(p.rate),
            fmt_f64(p.plob),
            fmt_f64(p.alpha2_opt),
            p.mu_opt.map(fmt_f64).unwrap_or_default(),
            fmt_f64(p.e_bit),
            fmt_f64(p.e_ph),
        )
        .unwrap();
    }
    out
}

/// Fluctuation CSV: nominal and worst-case rate columns per loss point.
pub fn fluctuate_csv(echo: &str, rows: &[(KeyRatePoint, f64)]) -> String {
    let mut out = String::new();
    writeln!(out, "# tfqkd fluctuate {echo}").unwrap();
    writeln!(
        out,
        "loss_db,eta,rate_nominal,rate_worst,plob,alpha2_opt,mu_opt"
    )
    .unwrap();
    for (p, worst) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(p.loss_db),
            fmt_f64(p.eta),
            fmt_f64(p.rate),
            fmt_f64(*worst),
            fmt_f64(p.plob),
            fmt_f64(p.alpha2_opt),
            p.mu_opt.map(fmt_f64).unwrap_or_default(),
        )
        .unwrap();
    }
    out
}

/// Bound sets as JSON: per outcome, per (n,m) index, the bound plus the
/// diagnostic flags. `degenerate` warns that some intensity pair sits within
/// 0.1% relative separation, where the combinations amplify gain rounding
/// into the bounds.
pub fn bounds_json(decoys: usize, intensities: &[f64], sets: &[YieldBoundSet]) -> String {
    let mut degenerate = false;
    for (i, &a) in intensities.iter().enumerate() {
        for &b in &intensities[i + 1..] {
            if (a - b).abs() < 1e-3 * a.max(b) {
                degenerate = true;
            }
        }
    }
    let outcomes: Vec<serde_json::Value> = sets
        .iter()
        .map(|set| {
            let upper: serde_json::Map<String, serde_json::Value> = set
                .upper
                .iter()
                .map(|(&(n, m), &v)| (format!("{n},{m}"), serde_json::json!(v)))
                .collect();
            let clamped: Vec<String> = set
                .clamped
                .iter()
                .map(|&(n, m)| format!("{n},{m}"))
                .collect();
            serde_json::json!({
                "outcome": set.outcome.label(),
                "upper": upper,
                "lower_y22": set.lower_y22,
                "clamped": clamped,
                "degenerate": degenerate,
            })
        })
        .collect();
    let doc = serde_json::json!({
        "decoys": decoys,
        "intensities": intensities,
        "outcomes": outcomes,
    });
    serde_json::to_string_pretty(&doc).expect("bounds serialize")
}

/// Single optimized point as JSON.
pub fn optimize_json(mode: &str, point: &KeyRatePoint) -> String {
    let doc = serde_json::json!({
        "decoys": mode,
        "loss_db": point.loss_db,
        "eta": point.eta,
        "rate": point.rate,
        "plob": point.plob,
        "alpha2": point.alpha2_opt,
        "mu": point.mu_opt,
        "e_bit": point.e_bit,
        "e_ph": point.e_ph,
    });
    serde_json::to_string_pretty(&doc).expect("optimize serialize")
}
