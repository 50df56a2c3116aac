//! Graphviz export of branched graphs.

use std::fmt::Write;

use crate::branched_graph::{BranchedGraph, Side};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders `g` as a `digraph`. Branch points are drawn as double circles;
/// each edge end is tagged with the side it sits on.
pub fn to_dot(g: &BranchedGraph, name: &str) -> String {
    let graph = g.graph();
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in graph.vertices() {
        let shape = if g.is_branch_point(v) { "doublecircle" } else { "circle" };
        writeln!(out, "  {} [shape={shape}];", quote(graph.vertex_name(v))).unwrap();
    }
    for e in graph.edges() {
        let (s, t) = graph.ends(e);
        let side = |v, h| match g.side_of(v, h) {
            Some(Side::A) => "A",
            Some(Side::B) => "B",
            None => "?",
        };
        let tail = side(s, crate::graph::HalfEdge::source(e));
        let head = side(t, crate::graph::HalfEdge::target(e));
        writeln!(
            out,
            "  {} -> {} [label={}, taillabel={tail}, headlabel={head}];",
            quote(graph.vertex_name(s)),
            quote(graph.vertex_name(t)),
            quote(graph.edge_name(e))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn figure_eight_golden() {
        let expected = "\
digraph \"K\" {
  node [shape=circle];
  \"o\" [shape=doublecircle];
  \"o\" -> \"o\" [label=\"a\", taillabel=A, headlabel=B];
  \"o\" -> \"o\" [label=\"b\", taillabel=A, headlabel=B];
}
";
        assert_eq!(to_dot(&fixtures::figure_eight(), "K"), expected);
    }

    #[test]
    fn circle_has_no_branch_point() {
        let dot = to_dot(&fixtures::circle(), "S");
        assert!(dot.contains("\"o\" [shape=circle]"));
        assert!(!dot.contains("doublecircle"));
    }
}
