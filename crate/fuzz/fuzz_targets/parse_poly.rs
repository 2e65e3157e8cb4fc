#![no_main]

use libfuzzer_sys::fuzz_target;
use ppturbo::ModPoly;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let modulus = u16::from_le_bytes([data[0], data[1]]) as u64;
    let Ok(text) = std::str::from_utf8(&data[2..]) else {
        return;
    };
    if let Ok(p) = ModPoly::parse(text, modulus) {
        // printed form must parse back to the same polynomial
        let again = ModPoly::parse(&p.to_string(), modulus).expect("printed polynomial parses");
        assert_eq!(again, p);
        if modulus <= 512 {
            let _ = p.is_permutation();
        }
    }
});
