//! Kripke structures over (state, last observation) pairs.
//!
//! A node `(x, o)` records the current state and the observation that led
//! to it; initial nodes carry ε. Every edge absorbs an unobservable string,
//! one observable event and another unobservable string, so a run presents
//! one node per observation instant. The modified variant adds a τ-labelled
//! copy of every node, reachable back and forth, which lets a formula pin a
//! single instant of an infinite trace.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::des::{EventId, ModelError, ObsId, StateId, StateSet, ValidatedFsa};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KNode {
    pub state: StateId,
    /// `None` is ε.
    pub obs: Option<ObsId>,
    pub copy: bool,
}

/// Atomic propositions of a node label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    State(StateId),
    Obs(ObsId),
    Tau,
}

/// A node label: exactly one state proposition, at most one observation
/// proposition, and τ on copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label {
    pub state: StateId,
    pub obs: Option<ObsId>,
    pub tau: bool,
}

impl Label {
    #[inline]
    pub fn holds(&self, p: Prop) -> bool {
        match p {
            Prop::State(x) => self.state == x,
            Prop::Obs(o) => self.obs == Some(o),
            Prop::Tau => self.tau,
        }
    }

    pub fn props(&self) -> Vec<Prop> {
        let mut v = vec![Prop::State(self.state)];
        v.extend(self.obs.map(Prop::Obs));
        if self.tau {
            v.push(Prop::Tau);
        }
        v
    }
}

/// State and observation names shared by a structure and its witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbols {
    pub states: Vec<String>,
    pub observations: Vec<String>,
}

impl Symbols {
    pub fn from_fsa(fsa: &ValidatedFsa) -> Self {
        Symbols { states: fsa.state_names().to_vec(), observations: fsa.obs_names().to_vec() }
    }

    pub fn render_label(&self, l: &Label) -> String {
        let mut parts = vec![self.states[l.state.index()].clone()];
        if let Some(o) = l.obs {
            parts.push(self.observations[o.index()].clone());
        }
        if l.tau {
            parts.push("τ".to_string());
        }
        format!("{{{}}}", parts.join(","))
    }

    pub fn render_node(&self, n: &KNode) -> String {
        let x = &self.states[n.state.index()];
        let o = n.obs.map_or("ε", |o| self.observations[o.index()].as_str());
        if n.copy {
            format!("({x}^c,{o}^c)")
        } else {
            format!("({x},{o})")
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum KripkeError {
    #[error("structure is already modified")]
    AlreadyModified,
    #[error("lasso is not a run of the structure: {0}")]
    NotARun(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    nodes: Vec<KNode>,
    initial: Vec<usize>,
    succ: Vec<Vec<usize>>,
    modified: bool,
    symbols: Arc<Symbols>,
}

impl KripkeStructure {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[KNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> KNode {
        self.nodes[i]
    }

    pub fn initial_nodes(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_initial(&self, i: usize) -> bool {
        self.initial.contains(&i)
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(&b)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_modified(&self) -> bool {
        self.modified
    }

    pub fn symbols(&self) -> &Arc<Symbols> {
        &self.symbols
    }

    pub fn label(&self, i: usize) -> Label {
        let n = self.nodes[i];
        Label { state: n.state, obs: if n.copy { None } else { n.obs }, tau: n.copy }
    }

    pub fn find(&self, node: &KNode) -> Option<usize> {
        self.nodes.iter().position(|n| n == node)
    }

    /// Finds a node by its rendered name, e.g. `(1,o1)` or `(4^c,o1^c)`.
    pub fn find_by_name(&self, name: &str) -> Option<usize> {
        (0..self.nodes.len()).find(|&i| self.node_name(i) == name)
    }

    pub fn node_name(&self, i: usize) -> String {
        self.symbols.render_node(&self.nodes[i])
    }

    pub fn label_text(&self, i: usize) -> String {
        self.symbols.render_label(&self.label(i))
    }

    pub fn render_lasso(&self, l: &Lasso) -> RenderedLasso {
        RenderedLasso {
            stem: l.stem.iter().map(|&i| self.node_name(i)).collect(),
            cycle: l.cycle.iter().map(|&i| self.node_name(i)).collect(),
            stem_labels: l.stem.iter().map(|&i| self.label_text(i)).collect(),
            cycle_labels: l.cycle.iter().map(|&i| self.label_text(i)).collect(),
        }
    }

    /// Label trace of a lasso as `stem`/`cycle` label vectors.
    pub fn lasso_labels(&self, l: &Lasso) -> (Vec<Label>, Vec<Label>) {
        (
            l.stem.iter().map(|&i| self.label(i)).collect(),
            l.cycle.iter().map(|&i| self.label(i)).collect(),
        )
    }

    /// Checks that `l` is a run: starts at an initial node and follows edges,
    /// including the seam into the cycle and the cycle closure.
    pub fn check_run(&self, l: &Lasso) -> Result<(), KripkeError> {
        if l.cycle.is_empty() {
            return Err(KripkeError::NotARun("empty cycle".into()));
        }
        let seq: Vec<usize> = l.stem.iter().chain(l.cycle.iter()).copied().collect();
        if let Some(&bad) = seq.iter().find(|&&i| i >= self.nodes.len()) {
            return Err(KripkeError::NotARun(format!("unknown node index {bad}")));
        }
        if !self.is_initial(seq[0]) {
            return Err(KripkeError::NotARun(format!("{} is not initial", self.node_name(seq[0]))));
        }
        let closure = (*l.cycle.last().unwrap(), l.cycle[0]);
        for (a, b) in seq.windows(2).map(|w| (w[0], w[1])).chain(std::iter::once(closure)) {
            if !self.has_edge(a, b) {
                return Err(KripkeError::NotARun(format!(
                    "no edge {} -> {}",
                    self.node_name(a),
                    self.node_name(b)
                )));
            }
        }
        Ok(())
    }
}

/// An ultimately periodic run: `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Lasso {
    pub fn new(stem: Vec<usize>, cycle: Vec<usize>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { stem, cycle }
    }

    /// Node at position `i` of the infinite run.
    pub fn at(&self, i: usize) -> usize {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn size(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }
}

/// A lasso with node names and labels spelled out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedLasso {
    pub stem: Vec<String>,
    pub cycle: Vec<String>,
    pub stem_labels: Vec<String>,
    pub cycle_labels: Vec<String>,
}

/// Builds `K_G`, restricted to nodes reachable from the initial nodes.
pub fn build_kripke(fsa: &ValidatedFsa) -> KripkeStructure {
    let mut index: HashMap<KNode, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |n: KNode, nodes: &mut Vec<KNode>, succ: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| {
        *index.entry(n).or_insert_with(|| {
            nodes.push(n);
            succ.push(Vec::new());
            queue.push_back(nodes.len() - 1);
            nodes.len() - 1
        })
    };
    let mut initial = Vec::new();
    for x in fsa.initial_estimate() {
        let n = KNode { state: x, obs: None, copy: false };
        initial.push(intern(n, &mut nodes, &mut succ, &mut queue));
    }
    while let Some(i) = queue.pop_front() {
        let x = nodes[i].state;
        let mut out = Vec::new();
        for o in fsa.obs_ids() {
            for y in fsa.observable_step(&StateSet::from([x]), o) {
                let n = KNode { state: y, obs: Some(o), copy: false };
                out.push(intern(n, &mut nodes, &mut succ, &mut queue));
            }
        }
        succ[i] = out;
    }
    KripkeStructure { nodes, initial, succ, modified: false, symbols: Arc::new(Symbols::from_fsa(fsa)) }
}

/// Adds a τ-labelled copy of every node (including initial ones), linked in
/// both directions to its original. Copies are never initial.
pub fn build_modified_kripke(k: &KripkeStructure) -> Result<KripkeStructure, KripkeError> {
    if k.modified {
        return Err(KripkeError::AlreadyModified);
    }
    let n = k.nodes.len();
    let mut nodes = k.nodes.clone();
    nodes.extend(k.nodes.iter().map(|&node| KNode { copy: true, ..node }));
    let mut succ = k.succ.clone();
    for (i, s) in succ.iter_mut().enumerate() {
        s.push(n + i);
    }
    succ.extend((0..n).map(|i| vec![i]));
    Ok(KripkeStructure { nodes, initial: k.initial.clone(), succ, modified: true, symbols: k.symbols.clone() })
}

/// Finite runs of `k` compatible with the finite string `s` from `x0`: one
/// node per observation instant, choosing any state visited by the
/// unobservable segment of that instant. The last segment also admits its
/// unobservable continuations, so the result covers prefixes of compatible
/// infinite runs. At most `max` sequences are returned.
pub fn compatible_runs(
    fsa: &ValidatedFsa,
    k: &KripkeStructure,
    s: &[EventId],
    x0: StateId,
    max: usize,
) -> Result<BTreeSet<Vec<usize>>, ModelError> {
    let mut segments: Vec<(Option<ObsId>, Vec<StateId>)> = vec![(None, vec![x0])];
    let mut x = x0;
    for &e in s {
        x = fsa.delta(x, e).ok_or(ModelError::StringNotInLanguage)?;
        match fsa.mask(e) {
            Some(o) => segments.push((Some(o), vec![x])),
            None => segments.last_mut().unwrap().1.push(x),
        }
    }
    let last = segments.last_mut().unwrap();
    for y in fsa.unobservable_reach(&StateSet::from([x])) {
        if !last.1.contains(&y) {
            last.1.push(y);
        }
    }
    let choices: Vec<Vec<usize>> = segments
        .iter()
        .map(|(o, states)| {
            let mut v: Vec<usize> = states
                .iter()
                .filter_map(|&st| k.find(&KNode { state: st, obs: *o, copy: false }))
                .collect();
            v.dedup();
            v
        })
        .collect();

    let mut out = BTreeSet::new();
    let mut cursor = vec![0usize; choices.len()];
    if choices.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    'outer: while out.len() < max {
        let run: Vec<usize> = cursor.iter().zip(&choices).map(|(&c, ch)| ch[c]).collect();
        if run.windows(2).all(|w| k.has_edge(w[0], w[1])) && k.is_initial(run[0]) {
            out.insert(run);
        }
        for pos in (0..cursor.len()).rev() {
            cursor[pos] += 1;
            if cursor[pos] < choices[pos].len() {
                continue 'outer;
            }
            cursor[pos] = 0;
        }
        break;
    }
    Ok(out)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT rendering. Initial nodes are drawn with a double border.
pub fn export_dot(k: &KripkeStructure) -> String {
    let mut out = String::new();
    let title = if k.modified { "modified_kripke" } else { "kripke" };
    let _ = writeln!(out, "digraph {title} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box, style=rounded];");
    for i in 0..k.num_nodes() {
        let name = dot_escape(&k.node_name(i));
        let label = dot_escape(&k.label_text(i));
        let extra = if k.is_initial(i) { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  \"{name}\" [label=\"{name}\\n{label}\"{extra}];");
    }
    for (a, b) in k.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\";",
            dot_escape(&k.node_name(a)),
            dot_escape(&k.node_name(b))
        );
    }
    out.push_str("}\n");
    out
}
