#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = tailmean::io::parse_config(text) {
        if let Ok(experiment) = config.experiment() {
            let resolved = experiment.resolve().expect("validated config resolves");
            assert!(resolved.k >= 2 && resolved.k < resolved.n);
        }
    }
});
