//! Subset construction under the current-estimate recursion.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{ObsId, StateSet, ValidatedFsa};

/// Reachable current-state estimates and the observations linking them.
///
/// Node 0 is the initial estimate; nodes are numbered in breadth-first
/// discovery order with observations tried in declaration order. Empty
/// estimates are not materialised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observer {
    pub nodes: Vec<StateSet>,
    pub edges: BTreeMap<(usize, ObsId), usize>,
}

impl Observer {
    pub fn initial(&self) -> usize {
        0
    }

    pub fn node_of(&self, est: &StateSet) -> Option<usize> {
        self.nodes.iter().position(|n| n == est)
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = (ObsId, usize)> + '_ {
        self.edges
            .range((node, ObsId(0))..=(node, ObsId(u32::MAX)))
            .map(|(&(_, o), &t)| (o, t))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Graphviz rendering; node labels are the estimates.
    pub fn export_dot(&self, fsa: &ValidatedFsa) -> String {
        let mut out = String::from("digraph observer {\n  rankdir=LR;\n  node [shape=box];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let periph = if i == self.initial() { ", peripheries=2" } else { "" };
            out.push_str(&format!("  n{i} [label=\"{}\"{periph}];\n", fsa.fmt_states(n)));
        }
        for (&(i, o), &j) in &self.edges {
            out.push_str(&format!("  n{i} -> n{j} [label=\"{}\"];\n", fsa.obs_name(o)));
        }
        out.push_str("}\n");
        out
    }
}

impl ValidatedFsa {
    pub fn build_observer(&self) -> Observer {
        let init = self.initial_estimate();
        let mut index: HashMap<StateSet, usize> = HashMap::from([(init.clone(), 0)]);
        let mut nodes = vec![init];
        let mut edges = BTreeMap::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for o in self.obs_ids() {
                let next = self.step_closed(&nodes[i], o);
                if next.is_empty() {
                    continue;
                }
                let j = *index.entry(next.clone()).or_insert_with(|| {
                    nodes.push(next);
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                });
                edges.insert((i, o), j);
            }
        }
        Observer { nodes, edges }
    }
}
