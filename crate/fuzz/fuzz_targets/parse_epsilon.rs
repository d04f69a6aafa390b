#![no_main]

use libfuzzer_sys::fuzz_target;
use trifree::{max_trail_length, Epsilon};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(eps) = text.parse::<Epsilon>() {
        let len = max_trail_length(eps);
        assert!(len % 2 == 1);
    }
});
