#![no_main]
use libfuzzer_sys::fuzz_target;

// Config files are flat JSON objects; deserialization must reject unknown
// keys and never panic.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = serde_json::from_str::<tfqkd_cli::config::SweepFile>(text);
        let _ = serde_json::from_str::<tfqkd_cli::config::OptimizeFile>(text);
        let _ = serde_json::from_str::<tfqkd_cli::config::FluctuateFile>(text);
        let _ = serde_json::from_str::<tfqkd_cli::config::BoundsFile>(text);
        let _ = serde_json::from_str::<tfqkd_cli::config::SimulateFile>(text);
    }
});
