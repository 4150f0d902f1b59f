mod common;

use common::*;
use hyperdes::des::{ObsId, StateId};
use hyperdes::formula::{
    eval_body, parse_formula, property_formula, Body, FormulaError, HyperFormula, LabelLasso, Ltl, Quantifier,
    StructureKind,
};
use hyperdes::kripke::{build_kripke, Label, Symbols};
use hyperdes::Property;
use proptest::prelude::*;

/// Parses `text` and expands its macros over `fsa`'s alphabets.
fn expanded(text: &str, fsa: &hyperdes::des::ValidatedFsa) -> HyperFormula {
    let mut f = parse_formula(text).unwrap();
    f.body = f.body.expand_macros(fsa.state_names(), fsa.obs_names());
    f
}

#[test]
fn parses_the_diagnosability_instance() {
    let g = fixture("g_diag");
    let f = parse_formula("forall p1. forall p2. (F x:2@p1 & G(obseq(p1,p2))) -> F x:2@p2").unwrap();
    assert_eq!(f.quantifiers(), (Quantifier::Forall, Quantifier::Forall));
    let (part_fsa, part) = g.refine_fault_partition().unwrap();
    let (t, kind) = property_formula(Property::Diagnosability, &part_fsa, Some(&part)).unwrap();
    assert_eq!(kind, StructureKind::Plain);
    assert_eq!(t, expanded("forall p1. forall p2. (F x:2@p1 & G(obseq(p1,p2))) -> F x:2@p2", &g));
}

#[test]
fn parser_accepts_odd_but_wellformed_bodies() {
    let f = parse_formula("forall p1. exists p2. tau@p1 U tau@p1").unwrap();
    assert_eq!(f.body, Body::tau(0).until(Body::tau(0)));
}

#[test]
fn parser_errors() {
    assert!(matches!(parse_formula("forall p1. p2"), Err(FormulaError::UnboundTraceVar(_)) | Err(FormulaError::SyntaxError { .. })));
    assert!(matches!(parse_formula("forall p1. x:0@p2"), Err(FormulaError::UnboundTraceVar(v)) if v == "p2"));
    assert!(matches!(parse_formula("forall p1. x:0@p1"), Err(FormulaError::ArityError(_))));
    assert!(matches!(
        parse_formula("forall p1. forall p2. forall p3. x:0@p1"),
        Err(FormulaError::ArityError(_))
    ));
    assert!(matches!(parse_formula("forall p1. forall p1. x:0@p1"), Err(FormulaError::ArityError(_))));
    match parse_formula("forall p1. forall p2. x:0@p1 &") {
        Err(FormulaError::SyntaxError { pos, .. }) => assert_eq!(pos, 30),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn precedence_and_associativity() {
    let f = parse_formula("forall a. forall b. !x:0@a U x:1@a & o:o@b | tau@b -> X x:0@b -> F x:1@a").unwrap();
    let x0a = || Body::state("0", 0);
    let expected = x0a()
        .not()
        .until(Body::state("1", 0))
        .and(Body::obs("o", 1))
        .or(Body::tau(1))
        .implies(x0a().next().implies(Body::state("1", 0).eventually()));
    // `X x:0@b`, not `x:0@a`.
    let expected = match expected {
        Body::Implies(l, _) => Body::Implies(l, Box::new(Body::state("0", 1).next().implies(Body::state("1", 0).eventually()))),
        _ => unreachable!(),
    };
    assert_eq!(f.body, expected);
    let u = parse_formula("forall a. forall b. x:0@a U x:1@a U x:2@a").unwrap();
    assert_eq!(u.body, Body::state("0", 0).until(Body::state("1", 0).until(Body::state("2", 0))));
    let q = parse_formula("forall a. forall b. x:\"s 1\"@a & F1 tau@b").unwrap();
    assert_eq!(q.body, Body::state("s 1", 0).and(Body::tau(1).once()));
}

#[test]
fn current_state_opacity_template() {
    let g = fixture("g_opa");
    let (t, kind) = property_formula(Property::CurrentStateOpacity, &g, None).unwrap();
    assert_eq!(kind, StructureKind::Modified);
    let text = "forall p1. exists p2. (F1 tau@p1 & G(tau@p1 -> (x:0@p1 | x:4@p1))) -> \
                (obseq(p1,p2) U tau@p1 & G(tau@p1 -> tau@p2 & (x:1@p2 | x:2@p2 | x:3@p2 | x:5@p2)))";
    assert_eq!(t, expanded(text, &g));
}

#[test]
fn weak_detectability_template() {
    let g = fixture("g_det");
    let (t, kind) = property_formula(Property::WeakDetectability, &g, None).unwrap();
    assert_eq!(kind, StructureKind::Plain);
    assert_eq!(t, expanded("exists p1. forall p2. G obseq(p1,p2) -> F G stateeq(p1,p2)", &g));
}

#[test]
fn missing_annotations() {
    let g = fixture("g_det");
    assert_eq!(
        property_formula(Property::InitialStateOpacity, &g, None).unwrap_err(),
        FormulaError::MissingAnnotation("secret states")
    );
    assert!(matches!(property_formula(Property::Diagnosability, &g, None), Err(FormulaError::MissingAnnotation(_))));
}

fn all_templates() -> Vec<(Property, HyperFormula, StructureKind)> {
    let mut out = Vec::new();
    for p in Property::ALL {
        let g = if p.needs_faults() { fixture("g_diag") } else if p.needs_secrets() { fixture("g_opa") } else { fixture("g_det") };
        let (g, part) = if p.needs_faults() {
            let (r, part) = g.refine_fault_partition().unwrap();
            (r, Some(part))
        } else {
            (g, None)
        };
        let (f, k) = property_formula(p, &g, part.as_ref()).unwrap();
        out.push((p, f, k));
    }
    out
}

#[test]
fn alternation_depths_and_structures() {
    for (p, f, kind) in all_templates() {
        let expected_depth = match p {
            Property::WeakDetectability
            | Property::InitialStateOpacity
            | Property::CurrentStateOpacity
            | Property::InfiniteStepOpacity => 1,
            _ => 0,
        };
        assert_eq!(f.alternation_depth(), expected_depth, "{p}");
        let modified = matches!(p, Property::CurrentStateOpacity | Property::InfiniteStepOpacity);
        assert_eq!(kind == StructureKind::Modified, modified, "{p}");
    }
}

#[test]
fn templates_round_trip_through_the_printer() {
    for (p, f, _) in all_templates() {
        let printed = f.to_string();
        assert_eq!(parse_formula(&printed).unwrap(), f, "{p}: {printed}");
    }
}

#[test]
fn observation_equality_is_vacuous_at_instant_zero() {
    for name in ["g_diag", "g_det", "g_opa"] {
        let g = fixture(name);
        let k = build_kripke(&g);
        let body = Body::ObsEq(0, 1);
        let ltl = Ltl::from_body(&body, k.symbols()).unwrap();
        for &a in k.initial_nodes() {
            for &b in k.initial_nodes() {
                assert!(ltl.eval_prop(&[k.label(a), k.label(b)]), "{name}");
            }
        }
    }
}

fn lbl(x: u32, o: Option<u32>, tau: bool) -> Label {
    Label { state: StateId(x), obs: o.map(ObsId), tau }
}

fn symbols() -> Symbols {
    Symbols { states: (0..6).map(|i| i.to_string()).collect(), observations: vec!["o1".into(), "o2".into(), "o3".into()] }
}

fn ltl(text: &str) -> Ltl {
    Ltl::from_body(&parse_formula(text).unwrap().body, &symbols()).unwrap()
}

#[test]
fn eval_examples() {
    let pi1 = LabelLasso::new(vec![lbl(0, None, false), lbl(1, Some(0), false)], vec![lbl(2, Some(1), false)]);
    assert!(eval_body(&ltl("forall p1. forall p2. F x:2@p1"), &[&pi1, &pi1]));
    assert!(eval_body(&ltl("forall p1. forall p2. G obseq(p1,p2)"), &[&pi1, &pi1]));
    // τ at instants 1 and 3.
    let twice = LabelLasso::new(
        vec![lbl(0, None, false), lbl(0, None, true), lbl(1, Some(0), false), lbl(1, None, true)],
        vec![lbl(2, Some(1), false)],
    );
    let once = LabelLasso::new(vec![lbl(0, None, false), lbl(0, None, true)], vec![lbl(2, Some(1), false)]);
    let f1 = ltl("forall p1. forall p2. F1 tau@p1");
    assert!(!eval_body(&f1, &[&twice, &twice]));
    assert!(eval_body(&f1, &[&once, &once]));
    let periodic = LabelLasso::new(vec![], vec![lbl(0, None, true), lbl(1, None, false)]);
    assert!(!eval_body(&f1, &[&periodic, &periodic]));
    assert!(!eval_body(&ltl("forall p1. forall p2. G F x:1@p1 -> F G x:1@p1"), &[&periodic, &periodic]));
}

/// Independent evaluator: recursion over positions, folding positions past
/// the stem into the first period and bounding `U` by one stem plus period.
fn naive(f: &Ltl, w: &[&LabelLasso], i: usize, stem: usize, period: usize) -> bool {
    let norm = |i: usize| if i < stem + period { i } else { stem + (i - stem) % period };
    let i = norm(i);
    match f {
        Ltl::True => true,
        Ltl::Atom(_) => f.eval_prop(&w.iter().map(|l| l.at(i)).collect::<Vec<_>>()),
        Ltl::Not(a) => !naive(a, w, i, stem, period),
        Ltl::Or(a, b) => naive(a, w, i, stem, period) || naive(b, w, i, stem, period),
        Ltl::Next(a) => naive(a, w, i + 1, stem, period),
        Ltl::Until(a, b) => {
            for j in i..i + stem + period + 1 {
                if naive(b, w, j, stem, period) {
                    return true;
                }
                if !naive(a, w, j, stem, period) {
                    return false;
                }
            }
            false
        }
    }
}

fn arb_label() -> impl Strategy<Value = Label> {
    (0u32..3, proptest::option::of(0u32..2), any::<bool>()).prop_map(|(x, o, t)| lbl(x, o, t))
}

fn arb_lasso() -> impl Strategy<Value = LabelLasso> {
    (proptest::collection::vec(arb_label(), 0..4), proptest::collection::vec(arb_label(), 1..4))
        .prop_map(|(s, c)| LabelLasso::new(s, c))
}

/// Random AST over states 0–2, observations o1/o2 and τ, with every
/// operator including the sugar and the macros.
pub fn arb_body() -> impl Strategy<Value = Body> {
    let leaf = prop_oneof![
        Just(Body::True),
        Just(Body::False),
        (0usize..3, 0usize..2).prop_map(|(x, v)| Body::state(&x.to_string(), v)),
        (1usize..3, 0usize..2).prop_map(|(o, v)| Body::obs(&format!("o{o}"), v)),
        (0usize..2).prop_map(Body::tau),
        (0usize..2, 0usize..2).prop_map(|(a, b)| Body::ObsEq(a, b)),
        (0usize..2, 0usize..2).prop_map(|(a, b)| Body::StateEq(a, b)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Body::not),
            inner.clone().prop_map(Body::next),
            inner.clone().prop_map(Body::eventually),
            inner.clone().prop_map(Body::always),
            inner.clone().prop_map(Body::once),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.until(b)),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = HyperFormula> {
    (any::<bool>(), any::<bool>(), arb_body()).prop_map(|(a, b, body)| {
        let q = |e: bool| if e { Quantifier::Exists } else { Quantifier::Forall };
        HyperFormula::new(q(a), q(b), body)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_formulas_round_trip(f in arb_formula()) {
        let printed = f.to_string();
        prop_assert_eq!(parse_formula(&printed).unwrap(), f, "{}", printed);
    }

    #[test]
    fn desugaring_is_idempotent(b in arb_body()) {
        let once = b.desugar();
        prop_assert_eq!(once.desugar(), once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eval_matches_naive_unrolling(b in arb_body(), l1 in arb_lasso(), l2 in arb_lasso()) {
        let f = Ltl::from_body(&b, &symbols()).unwrap();
        let w = [&l1, &l2];
        let stem = l1.stem.len().max(l2.stem.len());
        let (c1, c2) = (l1.cycle.len(), l2.cycle.len());
        let period = (1..=c1 * c2).find(|p| p % c1 == 0 && p % c2 == 0).unwrap();
        prop_assert_eq!(eval_body(&f, &w), naive(&f, &w, 0, stem, period), "{:?}", b);
    }
}
