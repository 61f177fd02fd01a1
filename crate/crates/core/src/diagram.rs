//! Implication diagram of the operator images of one relation, as DOT.

use std::fmt::Write as _;

use crate::operators::OperatorExpr;
use crate::relation::{implies, RelationError, TernaryRelation};

/// Largest ground set for which a diagram is drawn.
pub const DIAGRAM_MAX: usize = 4;

/// Nodes in drawing order.
pub const NODES: [&str; 8] = [
    "R",
    "m(R)",
    "M(R)",
    "c(R)",
    "star(R)",
    "star(m(R))",
    "star(M(R))",
    "c(m(R))",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    /// Each node lists the expressions whose tables coincide.
    pub nodes: Vec<Vec<String>>,
    /// Covering edges `(from, to)` meaning `from → to`.
    pub edges: Vec<(usize, usize)>,
}

impl Diagram {
    pub fn node_of(&self, expr: &str) -> Option<usize> {
        self.nodes.iter().position(|labels| labels.iter().any(|l| l == expr))
    }

    /// Whether `from → to` follows from the drawn edges (or they share a node).
    pub fn reaches(&self, from: &str, to: &str) -> bool {
        let (Some(a), Some(b)) = (self.node_of(from), self.node_of(to)) else {
            return false;
        };
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            if x == b {
                return true;
            }
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|e| e.0 == x).map(|e| e.1));
        }
        false
    }

    pub fn to_dot(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph implications {{");
        let _ = writeln!(s, "  label=\"{}\";", escape(title));
        let _ = writeln!(s, "  node [shape=box];");
        for (i, labels) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", escape(&labels.join(" = ")));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Computes all eight images of `r`, merges equal tables, and keeps only
/// the implications not factored through a third node.
pub fn diagram(r: &TernaryRelation) -> Result<Diagram, RelationError> {
    let n = r.site().n();
    if n > DIAGRAM_MAX {
        return Err(RelationError::Cap {
            what: "diagram",
            cap: DIAGRAM_MAX,
            n,
        });
    }
    let mut classes: Vec<(Vec<String>, TernaryRelation)> = Vec::new();
    for label in NODES {
        let expr: OperatorExpr = label.parse().expect("fixed node list");
        let img = expr
            .ops_inside_out()
            .into_iter()
            .fold(r.clone(), |acc, op| op.apply(&acc));
        match classes.iter_mut().find(|(_, t)| t.same_table(&img)) {
            Some((labels, _)) => labels.push(label.to_string()),
            None => classes.push((vec![label.to_string()], img)),
        }
    }
    let k = classes.len();
    let mut imp = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            imp[i][j] = i != j && implies(&classes[i].1, &classes[j].1)?.holds;
        }
    }
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if imp[i][j] && !(0..k).any(|m| imp[i][m] && imp[m][j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(Diagram {
        nodes: classes.into_iter().map(|(labels, _)| labels).collect(),
        edges,
    })
}
