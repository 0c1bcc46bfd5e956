use std::fmt::Write;

use crate::castles::Castle;

/// Graphviz drawing of a castle: each tower is a column of floors, base at
/// the bottom, with an arrow for each application of `T`. Short towers are
/// shaded.
pub fn castle_dot(c: &Castle) -> String {
    let mut out = String::from("digraph castle {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n");
    for (i, t) in c.towers.iter().enumerate() {
        let short = c.is_short(i);
        let title = match &t.orbit {
            Some(o) => format!("tower {i} (orbit {})", o.label()),
            None => format!("tower {i}"),
        };
        let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label=\"{title}\";");
        if short {
            out.push_str("    style=filled; color=lightgrey;\n");
        }
        for j in 0..t.height {
            let (a, b) = t.floor(j).window();
            let _ = writeln!(out, "    t{i}_{j} [label=\"T^{j} B{i}\\n[{a},{b}]\"];");
        }
        for j in 1..t.height {
            let _ = writeln!(out, "    t{i}_{} -> t{i}_{j} [label=\"T\"];", j - 1);
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
