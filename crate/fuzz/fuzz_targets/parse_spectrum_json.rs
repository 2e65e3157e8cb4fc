#![no_main]

use libfuzzer_sys::fuzz_target;
use ppturbo::DistanceSpectrum;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = DistanceSpectrum::from_json(text) {
        assert_eq!(DistanceSpectrum::from_json(&s.to_json()).as_ref(), Ok(&s));
    }
});
