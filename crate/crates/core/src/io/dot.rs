//! Graphviz export of a reachability graph.
//!
//! Admissible nodes are plain ellipses, border nodes are double octagons with
//! an orange fill and the remaining forbidden nodes are filled red boxes.
//! Uncontrollable edges are dashed.

use std::fmt::Write;

use crate::classify::{Classification, Label};
use crate::net::PetriNet;
use crate::reach::ReachGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(net: &PetriNet, graph: &ReachGraph, cls: Option<&Classification>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(net.name())).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [fontname=\"Helvetica\"];").unwrap();
    for n in 0..graph.len() {
        let label = escape(&net.format_marking(graph.node(n)));
        let style = match cls.map(|c| c.label(n)) {
            None | Some(Label::Admissible) => "shape=ellipse",
            Some(Label::Border) => "shape=doubleoctagon, style=filled, fillcolor=orange",
            Some(Label::Forbidden) => "shape=box, style=filled, fillcolor=\"#f4a6a6\"",
        };
        let initial = if n == graph.initial() { ", penwidth=2" } else { "" };
        writeln!(out, "  s{n} [label=\"{label}\", {style}{initial}];").unwrap();
    }
    for e in graph.edges() {
        let name = escape(net.transition_name(e.transition));
        let dashed = if net.is_controllable(e.transition) { "" } else { ", style=dashed" };
        writeln!(out, "  s{} -> s{} [label=\"{name}\"{dashed}];", e.source, e.target).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::forbidden_closure;
    use crate::fixtures;
    use crate::reach::{build_reach_graph, ExplorationLimits};

    #[test]
    fn styles_and_edges() {
        let (net, spec) = fixtures::two_machines_cap1();
        let g = build_reach_graph(&net, ExplorationLimits::default()).unwrap();
        let cls = forbidden_closure(&g, &net, &spec).unwrap();
        let dot = to_dot(&net, &g, Some(&cls));
        assert!(dot.starts_with("digraph \"two-machines-cap1\" {"));
        assert_eq!(dot.matches("doubleoctagon").count(), cls.border().len());
        assert_eq!(dot.matches(" -> ").count(), g.edges().len());
        let dashed = g.edges().iter().filter(|e| !net.is_controllable(e.transition)).count();
        assert_eq!(dot.matches("style=dashed").count(), dashed);
        assert!(dot.contains("label=\"P1P3P5\""));
    }
}
