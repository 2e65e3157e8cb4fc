#![no_main]

use libfuzzer_sys::fuzz_target;
use ppturbo::presets::parse_table;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_table(2, text);
    }
});
