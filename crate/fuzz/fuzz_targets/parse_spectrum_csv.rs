#![no_main]

use libfuzzer_sys::fuzz_target;
use ppturbo::DistanceSpectrum;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = DistanceSpectrum::from_csv(text, 10, 9) {
        assert_eq!(DistanceSpectrum::from_csv(&s.to_csv(), 10, 9).as_ref(), Ok(&s));
    }
});
