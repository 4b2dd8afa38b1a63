use std::fmt::Write;

use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    /// Tool carried by a solid arc; `None` for zero-cost dummy arcs.
    pub tool: Option<usize>,
}

/// Layered digraph whose s-t paths are exactly the selections.
///
/// Layer nodes are `v_0 = s, .., v_p = t`. Without dummy arcs every tool of
/// group `i` is a parallel arc `v_{i-1} -> v_i`. With dummy arcs each tool
/// gets its own node `u_j`, a solid arc `v_{i-1} -> u_j` and a dashed
/// zero-cost arc `u_j -> v_i`, which keeps the graph simple.
#[derive(Debug, Clone)]
pub struct LayeredGraph {
    pub nodes: Vec<String>,
    pub arcs: Vec<Arc>,
    pub source: usize,
    pub sink: usize,
    costs: Vec<Vec<u64>>,
}

pub fn export_layered_graph(instance: &Instance, dummy_arcs: bool) -> LayeredGraph {
    let p = instance.num_groups();
    let mut nodes: Vec<String> = (0..=p)
        .map(|i| match i {
            0 => "s".to_string(),
            i if i == p => "t".to_string(),
            i => format!("v{i}"),
        })
        .collect();
    let mut arcs = Vec::new();
    for (i, g) in instance.groups().iter().enumerate() {
        for &t in g {
            if dummy_arcs {
                nodes.push(format!("u{t}"));
                let mid = nodes.len() - 1;
                arcs.push(Arc { from: i, to: mid, tool: Some(t) });
                arcs.push(Arc { from: mid, to: i + 1, tool: None });
            } else {
                arcs.push(Arc { from: i, to: i + 1, tool: Some(t) });
            }
        }
    }
    LayeredGraph {
        nodes,
        arcs,
        source: 0,
        sink: p,
        costs: instance.costs().to_vec(),
    }
}

impl LayeredGraph {
    pub fn solid_arcs(&self) -> usize {
        self.arcs.iter().filter(|a| a.tool.is_some()).count()
    }

    /// Number of s-t paths, counted over the DAG in topological order.
    pub fn path_count(&self) -> u128 {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for a in &self.arcs {
            indeg[a.to] += 1;
        }
        let mut ways = vec![0u128; n];
        ways[self.source] = 1;
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = stack.pop() {
            for a in self.arcs.iter().filter(|a| a.from == v) {
                ways[a.to] = ways[a.to].saturating_add(ways[v]);
                indeg[a.to] -= 1;
                if indeg[a.to] == 0 {
                    stack.push(a.to);
                }
            }
        }
        ways[self.sink]
    }

    /// DOT text; solid arcs are labeled with their per-scenario cost vector.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rs {\n  rankdir=LR;\n");
        for (i, name) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{name}\"];");
        }
        for a in &self.arcs {
            match a.tool {
                Some(t) => {
                    let costs: Vec<String> =
                        self.costs.iter().map(|row| row[t].to_string()).collect();
                    let _ = writeln!(
                        out,
                        "  n{} -> n{} [label=\"{t}: ({})\"];",
                        a.from,
                        a.to,
                        costs.join(",")
                    );
                }
                None => {
                    let _ = writeln!(out, "  n{} -> n{} [style=dashed, label=\"0\"];", a.from, a.to);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
