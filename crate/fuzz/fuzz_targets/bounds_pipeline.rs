#![no_main]
use libfuzzer_sys::fuzz_target;

// End-to-end untrusted path: arbitrary bytes as a gain CSV, pushed through
// the bound modules when they parse. Bounds must come back clamped into
// [0, 1] without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(tables) = tfqkd_core::io::parse_gains_csv(text) else { return };
    for table in tables {
        let mu: Vec<f64> = match table.size() {
            2 => vec![0.5, 1e-5],
            3 => vec![0.5, 1e-2, 1e-3],
            4 => vec![0.1, 1e-2, 1e-3, 1.5],
            _ => continue,
        };
        if let Ok(set) = tfqkd_cli::commands::bounds_for_table(&mu, table) {
            for (_, v) in set.upper.iter() {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }
});
