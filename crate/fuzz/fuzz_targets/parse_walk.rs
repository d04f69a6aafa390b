#![no_main]

//! Input: a graph file, a line `---`, then a walk such as `0-1-2`.

use libfuzzer_sys::fuzz_target;
use trifree::{apply_trail, is_augmenting, parse_graph, parse_walk};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((graph, walk)) = text.split_once("\n---\n") else { return };
    let Ok(g) = parse_graph(graph) else { return };
    if let Ok(t) = parse_walk(&g, walk) {
        assert_eq!(parse_walk(&g, &t.format_walk()).expect("formatted walks parse"), t);
        let m = g.empty_set();
        let flipped = apply_trail(&g, &m, &t).expect("trail edges belong to g");
        assert_eq!(apply_trail(&g, &flipped, &t).unwrap(), m);
        let _ = is_augmenting(&g, &t, &m);
    }
});
