#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = tfqkd_core::io::parse_intensity_list(text) {
            assert!((2..=4).contains(&values.len()));
            assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }
});
