use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cnf::{Formula, Literal, PartialAssignment};
use crate::counting::count_energy_states_under;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Internal,
    Contradiction,
    Solution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    /// Visit order, starting at 0 for the root.
    pub id: usize,
    pub parent: Option<usize>,
    /// Number of assigned variables at this node.
    pub depth: usize,
    pub branch: Option<Literal>,
    /// Literals assigned on entering the node: the branch literal followed by
    /// any propagated ones.
    pub assigned: Vec<Literal>,
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excited: Option<u128>,
}

/// The recorded DPLL recursion. Node ids are indices into [`SearchTree::nodes`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTree {
    nodes: Vec<Node>,
}

impl SearchTree {
    pub(crate) fn push(
        &mut self,
        parent: Option<usize>,
        depth: usize,
        branch: Option<Literal>,
        assigned: Vec<Literal>,
        kind: NodeKind,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            parent,
            depth,
            branch,
            assigned,
            kind,
            excited: None,
        });
        id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter().filter(move |n| n.parent == Some(id))
    }

    /// All literals assigned on the path from the root down to `id`.
    pub fn path_literals(&self, id: usize) -> Vec<Literal> {
        let mut chain = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.nodes[i].parent;
        }
        chain
            .iter()
            .rev()
            .flat_map(|&i| self.nodes[i].assigned.iter().copied())
            .collect()
    }

    pub fn partial_assignment(&self, id: usize, num_vars: usize) -> Result<PartialAssignment> {
        PartialAssignment::from_literals(num_vars, &self.path_literals(id))
            .map_err(|e| Error::TreeMismatch(format!("node {id}: {e}")))
    }

    /// Node ids in breadth-first order, children visited in id order.
    pub fn breadth_first(&self) -> Vec<usize> {
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        let mut roots = Vec::new();
        for n in &self.nodes {
            match n.parent {
                Some(p) => kids[p].push(n.id),
                None => roots.push(n.id),
            }
        }
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut queue: VecDeque<usize> = roots.into();
        while let Some(id) = queue.pop_front() {
            order.push(id);
            queue.extend(kids[id].iter().copied());
        }
        order
    }
}

/// Labels every node with the number of excited states (assignments violating
/// exactly one clause) among the total assignments below it.
pub fn annotate_excited(tree: &SearchTree, f: &Formula) -> Result<SearchTree> {
    let mut out = tree.clone();
    for node in &mut out.nodes {
        let pa = tree.partial_assignment(node.id, f.num_vars())?;
        if pa.num_assigned() != node.depth {
            return Err(Error::TreeMismatch(format!(
                "node {} has depth {} but assigns {} variables",
                node.id,
                node.depth,
                pa.num_assigned()
            )));
        }
        node.excited = Some(count_energy_states_under(f, &pa, 1)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Dot,
    Pajek,
}

impl FromStr for TreeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(TreeFormat::Dot),
            "net" | "pajek" | "pajek-net" => Ok(TreeFormat::Pajek),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeLabel {
    #[default]
    Depth,
    Excited,
}

fn label(node: &Node, mode: TreeLabel) -> Result<String> {
    match mode {
        TreeLabel::Depth => Ok(node.depth.to_string()),
        TreeLabel::Excited => node
            .excited
            .map(|e| e.to_string())
            .ok_or_else(|| Error::input("tree has no excited-state annotation")),
    }
}

/// Serializes the tree. Vertices are numbered from 1 in breadth-first order.
pub fn export_tree(tree: &SearchTree, format: TreeFormat, mode: TreeLabel) -> Result<String> {
    let order = tree.breadth_first();
    let mut rank = vec![0usize; tree.len()];
    for (i, &id) in order.iter().enumerate() {
        rank[id] = i + 1;
    }
    let mut out = String::new();
    match format {
        TreeFormat::Pajek => {
            writeln!(out, "*Vertices {}", order.len()).unwrap();
            for &id in &order {
                writeln!(out, "{} \"{}\"", rank[id], label(&tree.nodes[id], mode)?).unwrap();
            }
            out.push_str("*Arcs\n");
            for &id in &order {
                if let Some(p) = tree.nodes[id].parent {
                    writeln!(out, "{} {}", rank[p], rank[id]).unwrap();
                }
            }
        }
        TreeFormat::Dot => {
            out.push_str("digraph search_tree {\n");
            out.push_str("  node [shape=circle, style=filled, fillcolor=white];\n");
            for &id in &order {
                let node = &tree.nodes[id];
                let style = match node.kind {
                    NodeKind::Internal => "",
                    NodeKind::Contradiction => ", fillcolor=gray",
                    NodeKind::Solution => ", fillcolor=black, fontcolor=white",
                };
                writeln!(out, "  {} [label=\"{}\"{}];", rank[id], label(node, mode)?, style).unwrap();
            }
            for &id in &order {
                if let Some(p) = tree.nodes[id].parent {
                    writeln!(out, "  {} -> {};", rank[p], rank[id]).unwrap();
                }
            }
            out.push_str("}\n");
        }
    }
    Ok(out)
}
