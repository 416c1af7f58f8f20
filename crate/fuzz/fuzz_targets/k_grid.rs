#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 64 {
        return;
    }
    if let Ok(grid) = tailmean::io::parse_k_grid(text) {
        assert!(!grid.is_empty());
    }
});
