#![no_main]

use libfuzzer_sys::fuzz_target;
use tailmean::io::{parse_records, write_records};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(records) = parse_records(text) {
        // anything accepted must survive a write/parse cycle unchanged
        let written = write_records(&records).expect("parsed records serialize");
        let again = parse_records(&written).expect("written records parse");
        assert_eq!(written, write_records(&again).unwrap());
    }
});
