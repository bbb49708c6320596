#![no_main]
use libfuzzer_sys::fuzz_target;

// The gain-table CSV parser must never panic on arbitrary input, and every
// accepted table must survive a format/parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(tables) = tfqkd_core::io::parse_gains_csv(text) {
            let emitted = tfqkd_core::io::format_gains_csv(&tables);
            let reparsed = tfqkd_core::io::parse_gains_csv(&emitted).expect("round trip");
            assert_eq!(tables, reparsed);
        }
    }
});
