#![no_main]

use libfuzzer_sys::fuzz_target;
use ppturbo::report::{rows_from_csv, rows_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = rows_from_csv(text) {
        let _ = rows_from_csv(&rows_to_csv(&rows));
    }
});
