use std::collections::BTreeSet;

use super::domain::productive_linear;
use crate::state::StateId;
use crate::transducer::{dom_empty, LookaheadTransducer, Rule, Transducer};

/// States reachable from `roots` through rule calls.
fn reachable<'a>(t: &Transducer, roots: impl IntoIterator<Item = &'a StateId>) -> BTreeSet<StateId> {
    let mut seen: BTreeSet<StateId> = BTreeSet::new();
    let mut work: Vec<StateId> = roots.into_iter().cloned().collect();
    while let Some(q) = work.pop() {
        if !seen.insert(q.clone()) {
            continue;
        }
        for r in t.rules().iter().filter(|r| r.state == q) {
            for (p, _) in r.calls() {
                if !seen.contains(&p) {
                    work.push(p);
                }
            }
        }
    }
    seen
}

fn restrict(t: &Transducer, keep: &BTreeSet<StateId>, rules: Vec<Rule>) -> Transducer {
    Transducer::new(
        keep.iter().cloned(),
        t.input().clone(),
        t.output().clone(),
        rules,
        t.initial().clone(),
    )
    .expect("restriction of a valid machine is valid")
}

fn keep_reachable(t: &Transducer, rules: Vec<Rule>, roots: &[StateId]) -> Transducer {
    let tmp = restrict(t, t.states(), rules);
    let keep = reachable(&tmp, roots.iter().chain([t.initial()]));
    let rules = tmp
        .rules()
        .iter()
        .filter(|r| keep.contains(&r.state))
        .cloned()
        .collect();
    restrict(t, &keep, rules)
}

/// Removes states unreachable from the initial state and their rules.
pub fn prune(t: &Transducer) -> Transducer {
    keep_reachable(t, t.rules().to_vec(), &[])
}

/// States with non-empty domain.
fn productive(t: &Transducer) -> BTreeSet<StateId> {
    if t.is_linear() {
        productive_linear(t)
    } else {
        t.states().iter().filter(|q| !dom_empty(t, q)).cloned().collect()
    }
}

/// Removes states with empty domain (the initial state is always kept),
/// rules mentioning them, and then unreachable states.
pub fn prune_automaton(t: &Transducer) -> Transducer {
    prune_automaton_from(t, &[])
}

fn prune_automaton_from(t: &Transducer, roots: &[StateId]) -> Transducer {
    let live = productive(t);
    let rules = t
        .rules()
        .iter()
        .filter(|r| live.contains(&r.state) && r.calls().iter().all(|(p, _)| live.contains(p)))
        .cloned()
        .collect();
    let roots: Vec<StateId> = roots.iter().filter(|q| live.contains(*q)).cloned().collect();
    keep_reachable(t, rules, &roots)
}

/// Removes look-ahead states with empty domain and every rule annotated
/// with one, then unreachable states of both machines. The look-ahead
/// automaton keeps its initial state even when that state is dead.
pub fn prune_lookahead(m: &LookaheadTransducer) -> LookaheadTransducer {
    let live = productive(m.la());
    let rules: Vec<Rule> = m
        .base()
        .rules()
        .iter()
        .filter(|r| r.lookahead.iter().flatten().all(|l| live.contains(l)))
        .cloned()
        .collect();
    let base = keep_reachable(m.base(), rules, &[]);
    let used: BTreeSet<StateId> = base
        .rules()
        .iter()
        .flat_map(|r| r.lookahead.iter().flatten().cloned())
        .collect();
    let roots: Vec<StateId> = used.into_iter().collect();
    let la = prune_automaton_from(m.la(), &roots);
    LookaheadTransducer::from_parts(base, la)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_m, build_m_unpruned, domain_automaton};
    use crate::fixtures;

    #[test]
    fn reachable_machines_are_unchanged() {
        let t = fixtures::example1();
        assert_eq!(prune(&t), t);
        let (_, t2) = fixtures::example4();
        let a = domain_automaton(&t2);
        assert_eq!(prune_automaton(&a), a);
    }

    #[test]
    fn unreachable_states_go() {
        let t = fixtures::example1();
        let extra = Transducer::new(
            t.states().iter().cloned().chain([StateId::base("p")]),
            t.input().clone(),
            t.output().clone(),
            t.rules().to_vec(),
            t.initial().clone(),
        )
        .unwrap();
        assert_eq!(prune(&extra), t);
    }

    #[test]
    fn dead_lookahead_rule_is_dropped() {
        let (t1, t2) = fixtures::example4();
        let dead = "{(q0,{qh0})}(f(x1, x2)) -> f({(q1,{qh1,qh2})}(x1),{(q2,{}),(q3,{qh0})}(x2))";
        assert!(build_m_unpruned(&t1, &t2).unwrap().la().rendered_rules().contains(dead));
        let m = build_m(&t1, &t2).unwrap();
        assert!(!m.la().rendered_rules().contains(dead));
        assert_eq!(m.la().states().len(), 6);
    }
}
