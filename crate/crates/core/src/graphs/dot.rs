use super::{deg_string, DecoratedGraph, EdgeKind, Level, Monodromy};
use std::fmt::Write;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// Graphviz rendering: levels as ranks, hours as colors.
pub fn to_dot(g: &DecoratedGraph) -> String {
    let mut s = String::new();
    let color = |h: Option<u32>| h.map(|h| PALETTE[(h as usize - 1) % PALETTE.len()]).unwrap_or("black");
    writeln!(s, "graph theta {{\n  rankdir=LR;").unwrap();
    for (lvl, name) in [(Level::Zero, "0"), (Level::One, "1"), (Level::Inf, "inf")] {
        let ids: Vec<String> =
            (0..g.vertices.len()).filter(|v| g.vertices[*v].level == lvl).map(|v| format!("v{}", v)).collect();
        if !ids.is_empty() {
            writeln!(s, "  {{ rank=same; /* level {} */ {}; }}", name, ids.join("; ")).unwrap();
        }
    }
    for (i, v) in g.vertices.iter().enumerate() {
        writeln!(
            s,
            "  v{} [label=\"g={} d=({},{})\", color=\"{}\", shape={}];",
            i,
            v.genus,
            deg_string(&v.d0),
            deg_string(&v.dinf),
            color(v.hour),
            if g.is_stable(i) { "box" } else { "circle" }
        )
        .unwrap();
    }
    for e in &g.edges {
        let style = match e.kind {
            EdgeKind::E0Inf => "dashed",
            EdgeKind::EInfInf => "bold",
            _ => "solid",
        };
        writeln!(
            s,
            "  v{} -- v{} [label=\"({},{})\", style={}, color=\"{}\"];",
            e.ends[0],
            e.ends[1],
            deg_string(&e.d0),
            deg_string(&e.dinf),
            style,
            color(e.hours.first().copied())
        )
        .unwrap();
    }
    for (i, l) in g.legs.iter().enumerate() {
        let lab = match l.monodromy {
            Monodromy::Zeta(k) => format!("z^{}", k),
            Monodromy::Broad => "1".into(),
            Monodromy::Rho => "(1,rho)".into(),
            Monodromy::Phi => "(1,phi)".into(),
        };
        writeln!(s, "  l{} [shape=plaintext, label=\"{}:{}\"];\n  l{} -- v{};", i, i, lab, i, l.vertex).unwrap();
    }
    s.push_str("}\n");
    s
}
