mod common;

use common::*;
use hyperdes::formula::{eval_body, parse_formula, property_formula, LabelLasso, Ltl};
use hyperdes::hyper::ndfs::{find_accepting_lasso, is_empty, BuchiGraph};
use hyperdes::hyper::{
    self, check_exists_exists, check_exists_forall_bounded, check_forall_exists_sync, check_forall_forall,
    replay_witness, BState, BuchiAutomaton, EngineError, EngineId, Mode, SelfComposition, Truth, VerifyOptions,
    WeakRoute, Witness, WitnessKind,
};
use hyperdes::kripke::{build_kripke, build_modified_kripke, KripkeStructure, Label, Lasso, Symbols};
use hyperdes::{des::ValidatedFsa, Property};
use proptest::prelude::*;

fn formula(g: &ValidatedFsa, p: Property) -> (hyperdes::formula::HyperFormula, KripkeStructure) {
    let inst = hyper::instance(g, p).unwrap();
    (inst.formula, inst.structure)
}

/// Rotations of a cycle, for comparisons up to rotation.
fn rotations(c: &[String]) -> Vec<Vec<String>> {
    (0..c.len()).map(|i| c[i..].iter().chain(&c[..i]).cloned().collect()).collect()
}

fn labels_match(r: &hyperdes::kripke::RenderedLasso, stem: &[&str], cycle: &[&str]) -> bool {
    let cycle: Vec<String> = cycle.iter().map(|s| s.to_string()).collect();
    r.stem_labels == stem && rotations(&r.cycle_labels).contains(&cycle)
}

fn lasso(k: &KripkeStructure, stem: &[&str], cycle: &[&str]) -> Lasso {
    let ids = |v: &[&str]| v.iter().map(|n| k.find_by_name(n).unwrap_or_else(|| panic!("{n}"))).collect();
    Lasso::new(ids(stem), ids(cycle))
}

#[test]
fn diagnosability_of_g_diag() {
    let (f, k) = formula(&fixture("g_diag"), Property::Diagnosability);
    let v = check_forall_forall(&k, &f).unwrap();
    assert_eq!(v.holds, Truth::True);
    assert_eq!(v.mode, Mode::Exact);
    assert!(v.certified && v.witness.is_none());
}

#[test]
fn predictability_of_g_diag() {
    let (f, k) = formula(&fixture("g_diag"), Property::Predictability);
    let v = check_forall_forall(&k, &f).unwrap();
    assert_eq!(v.holds, Truth::False);
    let w = v.witness.as_ref().unwrap();
    assert_eq!(w.kind, WitnessKind::Refutation);
    assert!(labels_match(&w.rendered[0], &["{0}", "{1,o1}"], &["{2,o2}"]), "{:?}", w.rendered[0]);
    assert!(labels_match(&w.rendered[1], &["{3}", "{4,o1}"], &["{5,o3}"]), "{:?}", w.rendered[1]);
    assert!(replay_witness(&f, w, &k).unwrap());
}

#[test]
fn delayed_detectability_of_g_det() {
    let (f, k) = formula(&fixture("g_det"), Property::DelayedDetectability);
    let v = check_forall_forall(&k, &f).unwrap();
    assert_eq!(v.holds, Truth::False);
    assert!(replay_witness(&f, v.witness.as_ref().unwrap(), &k).unwrap());
    // The pair quoted for this example is a refutation as well.
    let w = Witness {
        kind: WitnessKind::Refutation,
        pi1: lasso(&k, &["(0,ε)", "(1,o1)", "(2,o2)"], &["(2,o3)"]),
        pi2: Some(lasso(&k, &["(0,ε)", "(4,o1)", "(2,o2)"], &["(2,o3)"])),
        rendered: vec![],
    };
    assert!(replay_witness(&f, &w, &k).unwrap());
}

#[test]
fn opacity_of_g_opa() {
    let g = fixture("g_opa");
    for (p, expected) in [
        (Property::InitialStateOpacity, Truth::True),
        (Property::CurrentStateOpacity, Truth::True),
        (Property::InfiniteStepOpacity, Truth::False),
    ] {
        let (f, k) = formula(&g, p);
        assert_eq!(k.is_modified(), p != Property::InitialStateOpacity);
        let v = check_forall_exists_sync(&k, &f).unwrap();
        assert_eq!(v.holds, expected, "{p}");
        assert_eq!(v.engine, EngineId::ForallExistsSync);
        if expected == Truth::False {
            let w = v.witness.as_ref().unwrap();
            assert!(w.pi2.is_none());
            assert!(
                labels_match(&w.rendered[0], &["{3}", "{4,o1}", "{4,τ}", "{4,o1}", "{5,o4}"], &["{5,o3}"]),
                "{:?}",
                w.rendered[0]
            );
            assert!(replay_witness(&f, w, &k).unwrap());
        }
    }
}

#[test]
fn weak_detectability_bounded() {
    let (f, k) = formula(&fixture("g_det"), Property::WeakDetectability);
    let v = check_exists_forall_bounded(&k, &f, 8).unwrap();
    assert_eq!(v.holds, Truth::True);
    assert_eq!(v.mode, Mode::Bounded(8));
    assert!(v.certified);
    assert!(replay_witness(&f, v.witness.as_ref().unwrap(), &k).unwrap());
    assert_eq!(check_exists_forall_bounded(&k, &f, 0).unwrap_err(), EngineError::ZeroBound);
}

#[test]
fn tautology_holds_with_the_smallest_lasso() {
    let k = build_kripke(&trivial());
    let f = parse_formula("exists p1. forall p2. true").unwrap();
    // Initial nodes never carry an observation, so no initial node has a
    // self-loop and the shortest lasso has two nodes.
    assert_eq!(check_exists_forall_bounded(&k, &f, 1).unwrap().holds, Truth::Inconclusive);
    let v = check_exists_forall_bounded(&k, &f, 2).unwrap();
    assert_eq!(v.holds, Truth::True);
    assert_eq!(v.witness.unwrap().pi1.size(), 2);
}

#[test]
fn two_state_system_with_distinguishable_runs() {
    // 0 loops on a/o1; 1 loops on b/o2; both initial.
    let fsa = hyperdes::des::Fsa::builder()
        .states(["0", "1"])
        .events(["a", "b"])
        .transition("0", "a", "0")
        .transition("1", "b", "1")
        .initial(["0", "1"])
        .mask("a", Some("o1"))
        .mask("b", Some("o2"))
        .build()
        .unwrap();
    let g = hyperdes::des::validate_fsa(fsa).unwrap();
    let k = build_kripke(&g);
    // No π1 matches the state of every π2.
    let f = parse_formula("exists p1. forall p2. G stateeq(p1,p2)").unwrap();
    let v = check_exists_forall_bounded(&k, &f, 6).unwrap();
    assert_eq!(v.holds, Truth::Inconclusive);
    assert_eq!(v.mode, Mode::Bounded(6));
    assert!(!v.certified);
    let j = hyperdes::io::verdict_value(&v);
    assert_eq!(j["mode"], "bounded");
    assert_eq!(j["bound"], 6);
    assert_eq!(j["holds"], serde_json::Value::Null);
    // Restricted to observation-equivalent π2 it holds.
    let f = parse_formula("exists p1. forall p2. G obseq(p1,p2) -> G stateeq(p1,p2)").unwrap();
    assert_eq!(check_exists_forall_bounded(&k, &f, 6).unwrap().holds, Truth::True);
    // Weak detectability by both routes.
    let exact = hyper::verify(&g, Property::WeakDetectability, &VerifyOptions::default()).unwrap();
    let bounded = hyper::verify(&g, Property::WeakDetectability, &VerifyOptions { weak_route: WeakRoute::Bounded(4) }).unwrap();
    assert_eq!(exact.holds, Truth::True);
    assert_eq!(exact.engine, EngineId::ObserverWeakDetectability);
    assert_eq!(bounded.holds, Truth::True);
    assert_eq!(bounded.engine, EngineId::ExistsForallBounded);
}

#[test]
fn verify_dispatch() {
    let opts = VerifyOptions::default();
    let v = hyper::verify(&fixture("g_diag"), Property::Diagnosability, &opts).unwrap();
    assert_eq!((v.holds, v.engine), (Truth::True, EngineId::ForallForall));
    assert_eq!(v.property, Some(Property::Diagnosability));
    assert!(v.formula.is_some());
    let v = hyper::verify(&fixture("g_det"), Property::StrongDetectability, &opts).unwrap();
    assert_eq!(v.holds, Truth::True);
    let v = hyper::verify(&fixture("g_opa"), Property::InfiniteStepOpacity, &opts).unwrap();
    assert_eq!((v.holds, v.engine), (Truth::False, EngineId::ForallExistsSync));
    assert!(hyper::verify(&fixture("g_det"), Property::Diagnosability, &opts).is_err());
}

#[test]
fn prefix_and_fragment_errors() {
    let k = build_kripke(&fixture("g_det"));
    let ee = parse_formula("exists p1. exists p2. G obseq(p1,p2)").unwrap();
    assert!(matches!(check_forall_forall(&k, &ee), Err(EngineError::PrefixMismatch { .. })));
    assert!(matches!(check_forall_exists_sync(&k, &ee), Err(EngineError::PrefixMismatch { .. })));
    assert!(matches!(check_exists_forall_bounded(&k, &ee, 3), Err(EngineError::PrefixMismatch { .. })));
    let general = parse_formula("forall p1. exists p2. G F x:2@p2").unwrap();
    assert!(matches!(check_forall_exists_sync(&k, &general), Err(EngineError::NotSynchronousFragment(_))));
}

#[test]
fn exists_exists_confirmation() {
    let k = build_kripke(&fixture("g_det"));
    let f = parse_formula("exists p1. exists p2. G obseq(p1,p2) & F !stateeq(p1,p2)").unwrap();
    let v = check_exists_exists(&k, &f).unwrap();
    assert_eq!(v.holds, Truth::True);
    let w = v.witness.as_ref().unwrap();
    assert_eq!(w.kind, WitnessKind::Confirmation);
    assert!(replay_witness(&f, w, &k).unwrap());
}

#[test]
fn replay_examples() {
    let g = fixture("g_diag");
    let (pre, k) = formula(&g, Property::Predictability);
    let pair = Witness {
        kind: WitnessKind::Refutation,
        pi1: lasso(&k, &["(0,ε)", "(1,o1)"], &["(2,o2)"]),
        pi2: Some(lasso(&k, &["(3,ε)", "(4,o1)"], &["(5,o3)"])),
        rendered: vec![],
    };
    assert!(replay_witness(&pre, &pair, &k).unwrap());
    let (dia, _) = formula(&g, Property::Diagnosability);
    assert!(!replay_witness(&dia, &pair, &k).unwrap());

    let same = Witness { kind: WitnessKind::Confirmation, pi2: Some(pair.pi1.clone()), ..pair.clone() };
    let eq = parse_formula("exists p1. exists p2. G obseq(p1,p2)").unwrap();
    assert!(replay_witness(&eq, &same, &k).unwrap());

    assert!(matches!(replay_witness(&eq, &pair, &k), Err(EngineError::PrefixMismatch { .. })));
    let bogus = Witness { pi1: lasso(&k, &["(1,o1)"], &["(2,o2)"]), ..pair };
    assert!(matches!(replay_witness(&pre, &bogus, &k), Err(EngineError::Kripke(_))));
}

#[test]
fn verdicts_are_deterministic() {
    for (name, p) in [
        ("g_diag", Property::Predictability),
        ("g_det", Property::DelayedDetectability),
        ("g_opa", Property::InfiniteStepOpacity),
        ("g_det", Property::WeakDetectability),
    ] {
        let g = fixture(name);
        let a = hyper::verify(&g, p, &VerifyOptions::default()).unwrap();
        let b = hyper::verify(&g, p, &VerifyOptions::default()).unwrap();
        assert_eq!(a.holds, b.holds);
        assert_eq!(a.witness, b.witness);
    }
}

/// Product of a label lasso with an automaton: acceptance of one word.
struct Word<'a> {
    aut: &'a BuchiAutomaton,
    letters: Vec<u64>,
    stem: usize,
}

impl Word<'_> {
    fn next(&self, i: usize) -> usize {
        if i + 1 < self.letters.len() { i + 1 } else { self.stem }
    }
}

impl BuchiGraph for Word<'_> {
    type State = (usize, BState);

    fn initial(&self) -> Vec<Self::State> {
        self.aut.initial(self.letters[0]).into_iter().map(|b| (0, b)).collect()
    }

    fn successors(&self, s: &Self::State) -> Vec<Self::State> {
        let j = self.next(s.0);
        self.aut.successors(&s.1, self.letters[j]).into_iter().map(|b| (j, b)).collect()
    }

    fn is_accepting(&self, s: &Self::State) -> bool {
        self.aut.is_accepting(&s.1)
    }
}

fn accepts(aut: &BuchiAutomaton, l1: &LabelLasso, l2: &LabelLasso) -> bool {
    let stem = l1.stem.len().max(l2.stem.len());
    let (c1, c2) = (l1.cycle.len(), l2.cycle.len());
    let period = (1..=c1 * c2).find(|p| p % c1 == 0 && p % c2 == 0).unwrap();
    // Unrolled twice so the lasso structure does not depend on the automaton.
    let letters = (0..stem + period).map(|i| aut.letter(&[l1.at(i), l2.at(i)])).collect();
    !is_empty(&Word { aut, letters, stem })
}

fn symbols() -> Symbols {
    Symbols { states: (0..3).map(|i| i.to_string()).collect(), observations: vec!["o1".into(), "o2".into()] }
}

fn arb_label() -> impl Strategy<Value = Label> {
    (0u32..3, proptest::option::of(0u32..2), any::<bool>()).prop_map(|(x, o, tau)| Label {
        state: hyperdes::des::StateId(x),
        obs: o.map(hyperdes::des::ObsId),
        tau,
    })
}

fn arb_lasso() -> impl Strategy<Value = LabelLasso> {
    (proptest::collection::vec(arb_label(), 0..4), proptest::collection::vec(arb_label(), 1..4))
        .prop_map(|(s, c)| LabelLasso::new(s, c))
}

fn arb_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("true".to_string()),
        (0..3, 1..3).prop_map(|(x, v)| format!("x:{x}@p{v}")),
        (1..3, 1..3).prop_map(|(o, v)| format!("o:o{o}@p{v}")),
        (1..3).prop_map(|v| format!("tau@p{v}")),
        Just("obseq(p1,p2)".to_string()),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| format!("!({a})")),
            inner.clone().prop_map(|a| format!("X({a})")),
            inner.clone().prop_map(|a| format!("F({a})")),
            inner.clone().prop_map(|a| format!("G({a})")),
            inner.clone().prop_map(|a| format!("F1({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) & ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) | ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) -> ({b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("({a}) U ({b})")),
        ]
    })
}

fn arb_small_body() -> impl Strategy<Value = Ltl> {
    arb_text()
        .prop_map(|t| Ltl::from_body(&parse_formula(&format!("forall p1. forall p2. {t}")).unwrap().body, &symbols()).unwrap())
        .prop_filter("closure size at most 10", |l| l.closure_size() <= 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Automaton acceptance of a lasso word agrees with direct evaluation.
    #[test]
    fn buchi_translation_agrees_with_eval(body in arb_small_body(), l1 in arb_lasso(), l2 in arb_lasso()) {
        let aut = BuchiAutomaton::new(&body).unwrap();
        prop_assert_eq!(accepts(&aut, &l1, &l2), eval_body(&body, &[&l1, &l2]), "{:?}", body);
        let neg = BuchiAutomaton::new(&body.negate()).unwrap();
        prop_assert_eq!(accepts(&neg, &l1, &l2), !eval_body(&body, &[&l1, &l2]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Accepting lassos of the self-composition project to runs of `K_G`,
    /// and the projected pair satisfies the body.
    #[test]
    fn self_composition_projects_to_runs(seed in any::<u64>(), t in arb_text()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = hyperdes::oracle::random_fsa(&mut rng, 4, 3, 2);
        let k = build_kripke(&g);
        let k = if t.contains("tau") { build_modified_kripke(&k).unwrap() } else { k };
        let f = parse_formula(&format!("exists p1. exists p2. {t}")).unwrap();
        // Propositions the random automaton lacks.
        let Ok(body) = Ltl::from_body(&f.body, k.symbols()) else { return Ok(()) };
        let sc = SelfComposition::new(&k, &body).unwrap();
        if let Some(l) = find_accepting_lasso(&sc) {
            let proj = |c: usize| {
                let pick = |s: &(u32, u32, BState)| (if c == 0 { s.0 } else { s.1 }) as usize;
                Lasso::new(l.stem.iter().map(pick).collect(), l.cycle.iter().map(pick).collect())
            };
            let (p1, p2) = (proj(0), proj(1));
            prop_assert!(k.check_run(&p1).is_ok());
            prop_assert!(k.check_run(&p2).is_ok());
            let ll = |l: &Lasso| { let (s, c) = k.lasso_labels(l); LabelLasso::new(s, c) };
            prop_assert!(eval_body(&body, &[&ll(&p1), &ll(&p2)]));
            let v = check_exists_exists(&k, &f).unwrap();
            prop_assert_eq!(v.holds, Truth::True);
            prop_assert!(replay_witness(&f, v.witness.as_ref().unwrap(), &k).unwrap());
        } else {
            prop_assert_eq!(check_exists_exists(&k, &f).unwrap().holds, Truth::False);
        }
    }
}

#[test]
fn templates_produce_the_documented_prefixes() {
    let g = fixture("g_opa");
    let (f, _) = property_formula(Property::InitialStateOpacity, &g, None).unwrap();
    assert_eq!(hyper::check_formula(&build_kripke(&g), &f, 4).unwrap().engine, EngineId::ForallExistsSync);
}
