//! Graphviz DOT export for circuits.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate};

impl Circuit {
    /// One node per gate (shape keyed by kind, output drawn with a double
    /// border) and one edge per wire, ordered by gate id.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph circuit {\n");
        for (id, gate) in self.gates().iter().enumerate() {
            let (shape, label) = match *gate {
                Gate::Input(v) => ("box", format!("x{v}")),
                Gate::Const(b) => ("diamond", format!("{}", b as u8)),
                Gate::And(..) => ("ellipse", "AND".to_string()),
                Gate::Or(..) => ("trapezium", "OR".to_string()),
                Gate::Not(_) => ("invtriangle", "NOT".to_string()),
            };
            let outline = if id == self.output() { ", peripheries=2" } else { "" };
            let _ = writeln!(s, "    g{id} [shape={shape}, label=\"{label}\"{outline}];");
        }
        for (id, gate) in self.gates().iter().enumerate() {
            for src in gate.sources() {
                let _ = writeln!(s, "    g{src} -> g{id};");
            }
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use crate::circuit::CircuitBuilder;

    #[test]
    fn node_and_edge_counts_match_structure() {
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let a = b.and(x0, x1);
        let n = b.not(a);
        let c = b.finish(n);

        let dot = c.to_dot();
        let nodes = dot.lines().filter(|l| l.contains("[shape=")).count();
        let edges = dot.lines().filter(|l| l.contains(" -> ")).count();
        assert_eq!(nodes, c.len());
        let fan_in: usize = c.gates().iter().map(|g| g.sources().count()).sum();
        assert_eq!(edges, fan_in);
        // Deterministic output.
        assert_eq!(dot, c.to_dot());
        assert!(dot.contains("peripheries=2"));
    }
}
