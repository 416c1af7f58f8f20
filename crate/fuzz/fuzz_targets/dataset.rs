#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // first line selects the column, the rest is the file
    let (column, body) = text.split_once('\n').unwrap_or(("0", text));
    if let Ok(values) = tailmean::io::parse_dataset(body, column) {
        assert!(!values.is_empty());
        assert!(values.iter().all(|v| v.is_finite()));
    }
});
