//! DOT rendering of a network with its merge edges.

use std::collections::BTreeSet;
use std::fmt::Write;

use menger_core::{EdgeId, Network};

/// Vertices where a merge edge starts, which is where the incoming streams
/// have to be combined.
pub fn encoding_nodes(g: &menger_core::Dag, merges: &BTreeSet<EdgeId>) -> Vec<String> {
    let set: BTreeSet<_> = merges.iter().map(|&e| g.tail(e)).collect();
    set.into_iter().map(|v| g.vertex_name(v).to_string()).collect()
}

pub fn network_dot(net: &Network, merges: &BTreeSet<EdgeId>) -> String {
    let g = &net.dag;
    let encoding = encoding_nodes(g, merges);
    let terminals: BTreeSet<_> = net.pairs.iter().flat_map(|p| [p.source, p.sink]).collect();
    let mut out = String::from("digraph network {\n  rankdir=LR;\n");
    writeln!(out, "  // encoding nodes: {}", encoding.join(", ")).unwrap();
    for v in g.vertices() {
        let name = g.vertex_name(v);
        let shape = if encoding.iter().any(|x| x == name) {
            "doublecircle"
        } else if terminals.contains(&v) {
            "box"
        } else {
            "circle"
        };
        writeln!(out, "  \"{name}\" [shape={shape}];").unwrap();
    }
    for e in g.edges() {
        let style = if merges.contains(&e) { ", color=red, penwidth=2" } else { "" };
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"{style}];",
            g.vertex_name(g.tail(e)),
            g.vertex_name(g.head(e)),
            g.edge_name(e)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
