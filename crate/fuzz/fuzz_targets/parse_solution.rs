#![no_main]

//! Input: a graph file, a line `---`, then a solution file.

use libfuzzer_sys::fuzz_target;
use trifree::{parse_graph, parse_solution, render_solution};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((graph, solution)) = text.split_once("\n---\n") else { return };
    let Ok(g) = parse_graph(graph) else { return };
    if let Ok(m) = parse_solution(&g, solution) {
        let again = parse_solution(&g, &render_solution(&g, &m)).expect("rendered solutions parse");
        assert_eq!(again, m);
        let _ = g.is_feasible(&m);
    }
});
