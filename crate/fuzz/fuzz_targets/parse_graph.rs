#![no_main]

use libfuzzer_sys::fuzz_target;
use trifree::{parse_graph, render_graph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(text) {
        let again = parse_graph(&render_graph(&g)).expect("rendered graphs parse");
        assert_eq!(again, g);
    }
});
