mod common;

use std::collections::{BTreeSet, VecDeque};

use common::*;
use hyperdes::des::{EventId, ObsId, StateId, StateSet, ValidatedFsa};
use hyperdes::kripke::{
    build_kripke, build_modified_kripke, compatible_runs, export_dot, KripkeError, KripkeStructure, Lasso,
};
use proptest::prelude::*;

fn edge_names(k: &KripkeStructure) -> BTreeSet<(String, String)> {
    k.edges().map(|(a, b)| (k.node_name(a), k.node_name(b))).collect()
}

fn name_set(items: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn node_names(k: &KripkeStructure) -> BTreeSet<String> {
    (0..k.num_nodes()).map(|i| k.node_name(i)).collect()
}

#[test]
fn g_diag_structure() {
    let k = build_kripke(&fixture("g_diag"));
    let init: BTreeSet<String> = k.initial_nodes().iter().map(|&i| k.node_name(i)).collect();
    assert_eq!(init, BTreeSet::from(["(0,ε)".to_string(), "(3,ε)".to_string()]));
    assert_eq!(k.num_nodes(), 8);
    let mut expected = Vec::new();
    for src in ["(0,ε)", "(3,ε)"] {
        for dst in ["(1,o1)", "(2,o1)", "(4,o1)", "(5,o1)"] {
            expected.push((src, dst));
        }
    }
    expected.extend([
        ("(1,o1)", "(2,o2)"),
        ("(2,o1)", "(2,o2)"),
        ("(4,o1)", "(2,o2)"),
        ("(4,o1)", "(5,o3)"),
        ("(5,o1)", "(5,o3)"),
        ("(2,o2)", "(2,o2)"),
        ("(5,o3)", "(5,o3)"),
    ]);
    assert_eq!(edge_names(&k), name_set(&expected));
    let labels: BTreeSet<String> = (0..k.num_nodes()).map(|i| k.label_text(i)).collect();
    assert!(labels.contains("{0}") && labels.contains("{2,o2}") && labels.contains("{5,o3}"));
}

#[test]
fn trivial_structure() {
    let k = build_kripke(&trivial());
    assert_eq!(node_names(&k), BTreeSet::from(["(x,ε)".to_string(), "(x,o)".to_string()]));
    assert_eq!(edge_names(&k), name_set(&[("(x,ε)", "(x,o)"), ("(x,o)", "(x,o)")]));
    let dot = export_dot(&k);
    assert_eq!(dot.matches(" -> ").count(), 2);
    assert_eq!(dot.matches("[label=").count(), 2);

    let m = build_modified_kripke(&k).unwrap();
    assert_eq!(m.num_nodes(), 4);
    let copy = m.find_by_name("(x^c,o^c)").unwrap();
    assert_eq!(m.label_text(copy), "{x,τ}");
    assert_eq!(m.label_text(m.find_by_name("(x^c,ε^c)").unwrap()), "{x,τ}");
}

#[test]
fn g_opa_structures() {
    let k = build_kripke(&fixture("g_opa"));
    let expected: BTreeSet<String> = ["(0,ε)", "(1,o1)", "(2,o2)", "(2,o3)", "(3,ε)", "(4,o1)", "(5,o4)", "(5,o3)"]
        .into_iter()
        .map(String::from)
        .collect();
    assert_eq!(node_names(&k), expected);
    let plain_edges = name_set(&[
        ("(0,ε)", "(1,o1)"),
        ("(3,ε)", "(4,o1)"),
        ("(1,o1)", "(2,o2)"),
        ("(4,o1)", "(2,o2)"),
        ("(4,o1)", "(5,o4)"),
        ("(2,o2)", "(2,o3)"),
        ("(2,o3)", "(2,o3)"),
        ("(5,o4)", "(5,o3)"),
        ("(5,o3)", "(5,o3)"),
    ]);
    assert_eq!(edge_names(&k), plain_edges);

    let m = build_modified_kripke(&k).unwrap();
    assert_eq!(m.num_nodes(), 2 * k.num_nodes());
    assert_eq!(m.initial_nodes(), k.initial_nodes());
    let mut expected_edges = plain_edges.clone();
    for i in 0..k.num_nodes() {
        let n = k.node_name(i);
        let (x, o) = n.trim_matches(|c| c == '(' || c == ')').split_once(',').unwrap();
        let c = format!("({x}^c,{o}^c)");
        assert_eq!(m.label_text(m.find_by_name(&c).unwrap()), format!("{{{x},τ}}"));
        expected_edges.insert((n.clone(), c.clone()));
        expected_edges.insert((c, n));
    }
    assert_eq!(edge_names(&m), expected_edges);
    assert_eq!(build_modified_kripke(&m).unwrap_err(), KripkeError::AlreadyModified);
}

#[test]
fn g_diag_modified_doubles() {
    let k = build_kripke(&fixture("g_diag"));
    assert_eq!(build_modified_kripke(&k).unwrap().num_nodes(), 16);
}

fn ev(g: &ValidatedFsa, names: &[&str]) -> Vec<EventId> {
    names.iter().map(|n| g.event_id(n).unwrap()).collect()
}

fn runs_named(k: &KripkeStructure, runs: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<String>> {
    runs.iter().map(|r| r.iter().map(|&i| k.node_name(i)).collect()).collect()
}

fn seq(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn compatible_runs_examples() {
    let g = fixture("g_diag");
    let k = build_kripke(&g);
    let x0 = g.state_id("0").unwrap();
    let runs = runs_named(&k, &compatible_runs(&g, &k, &ev(&g, &["u1", "b", "u2", "f", "d", "d"]), x0, 100).unwrap());
    assert!(runs.contains(&seq(&["(0,ε)", "(4,o1)", "(2,o2)", "(2,o2)"])));
    assert!(runs.contains(&seq(&["(3,ε)", "(1,o1)", "(2,o2)", "(2,o2)"])));

    let empty = runs_named(&k, &compatible_runs(&g, &k, &[], x0, 100).unwrap());
    assert_eq!(empty, BTreeSet::from([seq(&["(0,ε)"]), seq(&["(3,ε)"])]));

    let d = fixture("g_det");
    let kd = build_kripke(&d);
    let runs = runs_named(&kd, &compatible_runs(&d, &kd, &ev(&d, &["b", "a"]), d.state_id("0").unwrap(), 100).unwrap());
    assert_eq!(runs, BTreeSet::from([seq(&["(0,ε)", "(4,o1)", "(5,o1)"])]));

    assert!(compatible_runs(&g, &k, &ev(&g, &["d"]), x0, 10).is_err());
}

fn strings_up_to(g: &ValidatedFsa, x0: StateId, n: usize) -> Vec<Vec<EventId>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(x0, Vec::new())];
    for _ in 0..n {
        let mut next = Vec::new();
        for (x, s) in &frontier {
            for &(e, y) in g.successors(*x) {
                let mut t: Vec<EventId> = s.clone();
                t.push(e);
                out.push(t.clone());
                next.push((y, t));
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn every_string_has_compatible_runs() {
    for name in ["g_diag", "g_det", "g_opa"] {
        let g = fixture(name);
        let k = build_kripke(&g);
        for &x0 in g.initial_states() {
            for s in strings_up_to(&g, x0, 6) {
                let runs = compatible_runs(&g, &k, &s, x0, 16).unwrap();
                assert!(!runs.is_empty(), "{name}: no run for {s:?}");
                for r in runs {
                    assert!(k.is_initial(r[0]));
                    assert!(r.windows(2).all(|w| k.has_edge(w[0], w[1])));
                    assert_eq!(r.len(), 1 + g.project(&s).len());
                }
            }
        }
    }
}

#[test]
fn check_run_rejects_non_runs() {
    let k = build_kripke(&fixture("g_diag"));
    let n = |s: &str| k.find_by_name(s).unwrap();
    assert!(k.check_run(&Lasso::new(vec![n("(0,ε)"), n("(1,o1)")], vec![n("(2,o2)")])).is_ok());
    assert!(k.check_run(&Lasso::new(vec![n("(1,o1)")], vec![n("(2,o2)")])).is_err());
    assert!(k.check_run(&Lasso::new(vec![n("(0,ε)")], vec![n("(2,o2)")])).is_err());
    assert!(k.check_run(&Lasso::new(vec![n("(0,ε)"), n("(4,o1)")], vec![n("(5,o3)"), n("(2,o2)")])).is_err());
}

#[test]
fn dot_export_is_deterministic() {
    let k = build_modified_kripke(&build_kripke(&fixture("g_opa"))).unwrap();
    let dot = export_dot(&k);
    assert_eq!(dot, export_dot(&k));
    assert!(dot.starts_with("digraph modified_kripke {"));
    assert_eq!(dot.matches(" -> ").count(), k.num_edges());
    assert_eq!(dot.matches("peripheries=2").count(), 2);
    assert!(dot.contains("\"(4^c,o1^c)\" [label=\"(4^c,o1^c)\\n{4,τ}\"]"));
}

/// Shortest string from `x` to `y` whose projection is exactly `o`
/// (`None`: unobservable only).
fn segment(g: &ValidatedFsa, x: StateId, o: Option<ObsId>, y: StateId) -> Option<Vec<EventId>> {
    let mut queue = VecDeque::from([(x, false, Vec::new())]);
    let mut seen = BTreeSet::from([(x, false)]);
    while let Some((z, used, s)) = queue.pop_front() {
        if z == y && (used || o.is_none()) {
            return Some(s);
        }
        for &(e, w) in g.successors(z) {
            let used2 = match (g.mask(e), o) {
                (None, _) => used,
                (Some(m), Some(o)) if m == o && !used => true,
                _ => continue,
            };
            if seen.insert((w, used2)) {
                let mut t: Vec<EventId> = s.clone();
                t.push(e);
                queue.push_back((w, used2, t));
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Node bounds, labels and liveness, and every walk of `K_G` is
    /// compatible with some string of the automaton.
    #[test]
    fn walks_replay_into_the_automaton(seed in any::<u64>(), choices in proptest::collection::vec(any::<u8>(), 1..8)) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = hyperdes::oracle::random_fsa(&mut rng, 5, 4, 3);
        let k = build_kripke(&g);
        prop_assert!(k.num_nodes() <= g.num_states() * (g.num_observations() + 1));
        for i in 0..k.num_nodes() {
            prop_assert!(!k.successors(i).is_empty());
            let n = k.node(i);
            prop_assert_eq!(n.obs.is_none(), k.is_initial(i));
        }
        for (_, b) in k.edges() {
            prop_assert!(k.node(b).obs.is_some());
        }
        let m = build_modified_kripke(&k).unwrap();
        prop_assert_eq!(m.num_nodes(), 2 * k.num_nodes());

        let mut walk = vec![k.initial_nodes()[choices[0] as usize % k.initial_nodes().len()]];
        for &c in &choices[1..] {
            let s = k.successors(*walk.last().unwrap());
            walk.push(s[c as usize % s.len()]);
        }
        let first = k.node(walk[0]).state;
        let x0 = *g
            .initial_states()
            .iter()
            .find(|&&x| g.unobservable_reach(&StateSet::from([x])).contains(&first))
            .unwrap();
        let mut s = segment(&g, x0, None, first).unwrap();
        for w in walk.windows(2) {
            let (a, b) = (k.node(w[0]), k.node(w[1]));
            s.extend(segment(&g, a.state, b.obs, b.state).unwrap());
        }
        let runs = compatible_runs(&g, &k, &s, x0, usize::MAX).unwrap();
        prop_assert!(runs.contains(&walk), "walk {:?} not compatible with {:?}", walk, s);
    }
}
