use std::collections::{BTreeMap, BTreeSet};

use crate::state::StateId;
use crate::transducer::{states_at, Rule, Transducer};
use crate::tree::Tree;

/// Which right-hand-side combinations the power-set construction expands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhsChoice {
    /// One rule per choice of non-empty subsets of right-hand sides per member.
    AllSubsets,
    /// One rule per choice of a single right-hand side per member. Accepts
    /// the same domains, since a union over more right-hand sides only adds
    /// requirements, and avoids the exponential rule set.
    OnePerState,
}

/// The power-set automaton recognizing domains: state `S` accepts exactly
/// the trees in the domain of every member of `S`, and `{}` accepts every
/// tree. Only states reachable from `{q0}` are built.
pub fn domain_automaton(t: &Transducer) -> Transducer {
    let init = StateId::set([t.initial().clone()]);
    domain_automaton_from(t, [init.clone()], init, RhsChoice::AllSubsets)
}

/// Like [`domain_automaton`], exploring from every state in `roots` (set
/// states over `t`'s states) and using `initial` as the initial state.
pub(crate) fn domain_automaton_from(
    t: &Transducer,
    roots: impl IntoIterator<Item = StateId>,
    initial: StateId,
    choice: RhsChoice,
) -> Transducer {
    let mut states = BTreeSet::new();
    let mut rules = Vec::new();
    let mut work: Vec<StateId> = roots.into_iter().collect();
    work.push(initial.clone());
    while let Some(set) = work.pop() {
        if !states.insert(set.clone()) {
            continue;
        }
        let members = set.members().expect("domain automaton states are sets");
        for (a, k) in t.input().iter() {
            for children in child_sets(t, members, a, k, choice) {
                let rhs = Tree::new(
                    a.clone(),
                    children
                        .iter()
                        .enumerate()
                        .map(|(i, c)| Tree::state_var(c.clone(), i + 1))
                        .collect(),
                );
                for c in children {
                    if !states.contains(&c) {
                        work.push(c);
                    }
                }
                rules.push(Rule::new(set.clone(), a.clone(), rhs));
            }
        }
    }
    rules.sort();
    Transducer::new(states, t.input().clone(), t.input().clone(), rules, initial)
        .expect("domain automaton is well-formed")
}

/// For every choice of non-empty `Γj ⊆ rhs(qj, a)` per member, the vector
/// of child states `Si = ∪j Γj<xi>`, deduplicated. The empty set yields the
/// single all-empty vector.
fn child_sets(
    t: &Transducer,
    members: &[StateId],
    a: &crate::alphabet::Symbol,
    k: usize,
    choice: RhsChoice,
) -> BTreeSet<Vec<StateId>> {
    let mut acc: BTreeSet<Vec<BTreeSet<StateId>>> = BTreeSet::from([vec![BTreeSet::new(); k]]);
    for q in members {
        let per_rhs: Vec<Vec<BTreeSet<StateId>>> = t
            .rhs_for(q, a)
            .into_iter()
            .map(|rhs| (1..=k).map(|i| states_at(rhs, i)).collect())
            .collect();
        if per_rhs.is_empty() {
            return BTreeSet::new();
        }
        let unions = match choice {
            RhsChoice::AllSubsets => subset_unions(&per_rhs, k),
            RhsChoice::OnePerState => per_rhs.into_iter().collect(),
        };
        let mut next = BTreeSet::new();
        for prefix in &acc {
            for u in &unions {
                next.insert(union(prefix, u));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|v| v.into_iter().map(StateId::set).collect())
        .collect()
}

/// Distinct pointwise unions over all non-empty subsets, built
/// incrementally so that collapsing subsets are never enumerated twice.
fn subset_unions(items: &[Vec<BTreeSet<StateId>>], k: usize) -> BTreeSet<Vec<BTreeSet<StateId>>> {
    let mut seen: BTreeSet<Vec<BTreeSet<StateId>>> = BTreeSet::new();
    for item in items {
        let mut next = seen.clone();
        next.insert(item.clone());
        for prev in &seen {
            next.insert(union(prev, item));
        }
        seen = next;
    }
    debug_assert!(seen.iter().all(|v| v.len() == k));
    seen
}

fn union(a: &[BTreeSet<StateId>], b: &[BTreeSet<StateId>]) -> Vec<BTreeSet<StateId>> {
    a.iter().zip(b).map(|(x, y)| x.union(y).cloned().collect()).collect()
}

/// States of a linear machine whose domain is non-empty.
pub(crate) fn productive_linear(t: &Transducer) -> BTreeSet<StateId> {
    let mut by_state: BTreeMap<&StateId, Vec<&Rule>> = BTreeMap::new();
    for r in t.rules() {
        by_state.entry(&r.state).or_default().push(r);
    }
    let mut done = BTreeSet::new();
    loop {
        let before = done.len();
        for (q, rules) in &by_state {
            if !done.contains(*q) && rules.iter().any(|r| r.calls().iter().all(|(p, _)| done.contains(p))) {
                done.insert((*q).clone());
            }
        }
        if done.len() == before {
            return done;
        }
    }
}
