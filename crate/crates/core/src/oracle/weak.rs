//! Weak detectability: some infinite observation keeps the current estimate
//! a singleton from some point on. Since estimates form a finite graph, this
//! is exactly a reachable cycle of singleton estimates.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{estimates, names, nonempty, obs_names, Outcome};
use crate::des::{ObsId, StateId, StateSet, ValidatedFsa};
use crate::hyper::{EngineId, Evidence, Verdict, Witness, WitnessKind};
use crate::kripke::{build_kripke, KNode, KripkeStructure, Lasso};

/// Shortest observation cycle from `start` back to itself through singleton
/// observer nodes.
fn singleton_cycle(
    nodes: &[StateSet],
    succ: &dyn Fn(usize) -> Vec<(ObsId, usize)>,
    start: usize,
) -> Option<Vec<(ObsId, usize)>> {
    let mut parent: BTreeMap<usize, (usize, ObsId)> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(v) = queue.pop_front() {
        for (o, w) in succ(v) {
            if nodes[w].len() != 1 {
                continue;
            }
            if w == start {
                let mut path = vec![(o, start)];
                let mut cur = v;
                while cur != start {
                    let (p, po) = parent[&cur];
                    path.push((po, cur));
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            if seen.insert(w) {
                parent.insert(w, (v, o));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Decides weak detectability exactly on the observer. A positive verdict
/// carries a `K_G` lasso whose observations keep the estimate a singleton
/// throughout the cycle.
pub fn weak_detectability_exact(fsa: &ValidatedFsa) -> Verdict {
    let obs = fsa.build_observer();
    let succ = |v: usize| obs.successors(v).collect::<Vec<_>>();
    // Breadth-first paths to every observer node.
    let mut path_to: Vec<Option<Vec<ObsId>>> = vec![None; obs.nodes.len()];
    path_to[0] = Some(Vec::new());
    let mut order = vec![0usize];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for (o, w) in succ(v) {
            if path_to[w].is_none() {
                let mut p = path_to[v].clone().unwrap();
                p.push(o);
                path_to[w] = Some(p);
                order.push(w);
            }
        }
        i += 1;
    }
    let found = order
        .iter()
        .filter(|&&v| obs.nodes[v].len() == 1)
        .find_map(|&v| singleton_cycle(&obs.nodes, &succ, v).map(|c| (v, c)));
    let Some((start, cycle)) = found else {
        let mut v = Verdict::exact(false, EngineId::ObserverWeakDetectability);
        v.evidence = Some(Evidence {
            note: "no reachable observer cycle consists of singleton estimates".into(),
            ..Evidence::default()
        });
        return v;
    };
    let stem_obs = path_to[start].clone().unwrap();
    let cycle_obs: Vec<ObsId> = cycle.iter().map(|p| p.0).collect();
    let k = build_kripke(fsa);
    let lasso = lift(fsa, &k, &stem_obs, &cycle_obs);
    let mut v = Verdict::exact(true, EngineId::ObserverWeakDetectability);
    v.evidence = Some(Evidence {
        observations: obs_names(fsa, &stem_obs),
        continuation: Some(obs_names(fsa, &cycle_obs)),
        estimate: names(fsa, &obs.nodes[start]),
        note: "observation stem leads to a cycle of singleton estimates".into(),
        ..Evidence::default()
    });
    if let Some(pi1) = lasso {
        let rendered = vec![k.render_lasso(&pi1)];
        v.witness = Some(Witness { kind: WitnessKind::Confirmation, pi1, pi2: None, rendered });
    }
    v
}

/// Lifts an observation lasso whose cycle estimates are singletons to a run
/// of `K_G`: the cycle is forced, the stem is recovered backwards through the
/// estimates.
fn lift(fsa: &ValidatedFsa, k: &KripkeStructure, stem: &[ObsId], cycle: &[ObsId]) -> Option<Lasso> {
    let mut ests = vec![fsa.initial_estimate()];
    for &o in stem.iter().chain(cycle) {
        let next = fsa.step_closed(ests.last().unwrap(), o);
        ests.push(next);
    }
    // ests[stem.len() ..= stem.len() + cycle.len()] are singletons, the last
    // equal to the one at the start of the cycle.
    let all: Vec<ObsId> = stem.iter().chain(cycle).copied().collect();
    let mut states: Vec<StateId> = vec![*ests.last()?.iter().next()?];
    for i in (0..all.len()).rev() {
        let next = *states.last().unwrap();
        let x = *ests[i].iter().find(|&&x| fsa.observable_step(&StateSet::from([x]), all[i]).contains(&next))?;
        states.push(x);
    }
    states.reverse();
    let node = |i: usize| {
        let obs = if i == 0 { None } else { Some(all[i - 1]) };
        k.find(&KNode { state: states[i], obs, copy: false })
    };
    let ids: Vec<usize> = (0..=all.len()).map(node).collect::<Option<_>>()?;
    // Position `stem.len()` and the last position hold the same state but
    // possibly different observations; edges depend only on the state, so
    // the cycle runs from the position after the stem to the last one.
    let (s, c) = (ids[..=stem.len()].to_vec(), ids[stem.len() + 1..].to_vec());
    let l = Lasso::new(s, c);
    k.check_run(&l).ok().map(|_| l)
}

/// Re-checks a positive weak-detectability verdict from scratch: the
/// witness must be a run of `K_G`, and along its observations the current
/// estimate must be the singleton of the run's state at every cycle instant.
pub fn revalidate_weak_witness(fsa: &ValidatedFsa, v: &Verdict) -> bool {
    let Some(w) = &v.witness else { return false };
    let k = build_kripke(fsa);
    if k.check_run(&w.pi1).is_err() {
        return false;
    }
    let l = &w.pi1;
    let horizon = l.stem.len() + 2 * l.cycle.len();
    let mut est = fsa.initial_estimate();
    for i in 0..horizon {
        let n = k.node(l.at(i));
        if i > 0 {
            match n.obs {
                Some(o) => est = fsa.step_closed(&est, o),
                None => return false,
            }
        }
        if !est.contains(&n.state) {
            return false;
        }
        if i >= l.stem.len() && est.len() != 1 {
            return false;
        }
    }
    true
}

/// Definitional check over reachable estimates, independent of the
/// observer structure.
pub(super) fn weak_detectability_definitional(fsa: &ValidatedFsa) -> Outcome {
    let (reach, _) = estimates(fsa, usize::MAX);
    let singles: Vec<StateId> = reach
        .iter()
        .filter(|(c, _)| c.len() == 1)
        .map(|(c, _)| *c.iter().next().unwrap())
        .collect();
    let step = |x: StateId| -> Vec<StateId> {
        fsa.obs_ids()
            .filter_map(|o| nonempty(fsa.step_closed(&StateSet::from([x]), o)))
            .filter(|c| c.len() == 1)
            .map(|c| *c.iter().next().unwrap())
            .collect()
    };
    let on_cycle = |x: StateId| {
        let mut seen = BTreeSet::new();
        let mut stack = step(x);
        while let Some(y) = stack.pop() {
            if y == x {
                return true;
            }
            if seen.insert(y) {
                stack.extend(step(y));
            }
        }
        false
    };
    match singles.iter().find(|&&x| on_cycle(x)) {
        Some(_) => Outcome::holds(true),
        None => Outcome::violated(
            true,
            Evidence { note: "no reachable cycle of singleton estimates".into(), ..Evidence::default() },
        ),
    }
}
