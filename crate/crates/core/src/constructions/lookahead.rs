use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::domain::{domain_automaton_from, RhsChoice};
use super::product::{build_hat_t1, product_n_rules};
use super::prune::prune;
use super::report::BuildReport;
use crate::alphabet::{RankedAlphabet, Symbol};
use crate::error::Result;
use crate::state::StateId;
use crate::transducer::{permits, states_at, LookaheadTransducer, Rule, Transducer};
use crate::tree::Tree;

/// The look-ahead transducer `M` for the composition of `t1` and `t2`:
/// the product of `T̂1` and `t2` over states `(q,S,q')` with `q' ∈ S`,
/// where a rule obtained from the `T̂1` rule `(q,S)(a(..)) -> ξ` is
/// annotated with `l_i = ξ<x_i>`, and the look-ahead automaton is the
/// domain automaton of `T̂1`.
pub fn build_m(t1: &Transducer, t2: &Transducer) -> Result<LookaheadTransducer> {
    Ok(build_m_report(t1, t2)?.0)
}

/// [`build_m`] together with a report on the construction.
pub fn build_m_report(t1: &Transducer, t2: &Transducer) -> Result<(LookaheadTransducer, BuildReport)> {
    build_m_report_with(t1, t2, RhsChoice::AllSubsets)
}

/// [`build_m_report`] with the given expansion of the look-ahead automaton.
/// Both choices give the same look-ahead translation.
pub fn build_m_report_with(
    t1: &Transducer,
    t2: &Transducer,
    choice: RhsChoice,
) -> Result<(LookaheadTransducer, BuildReport)> {
    let start = Instant::now();
    let unpruned = build_m_unpruned_with(t1, t2, choice)?;
    let m = super::prune::prune_lookahead(&unpruned);
    let report = BuildReport::for_lookahead("M", &unpruned, &m, start.elapsed());
    Ok((m, report))
}

/// [`build_m`] before removing dead look-ahead states and unreachable states.
pub fn build_m_unpruned(t1: &Transducer, t2: &Transducer) -> Result<LookaheadTransducer> {
    build_m_unpruned_with(t1, t2, RhsChoice::AllSubsets)
}

fn build_m_unpruned_with(t1: &Transducer, t2: &Transducer, choice: RhsChoice) -> Result<LookaheadTransducer> {
    let hat = build_hat_t1(t1, t2)?;
    let n = product_n_rules(&hat, t2)?;
    let mut annotations = BTreeSet::new();
    let rules: Vec<Rule> = n
        .rules
        .into_iter()
        .map(|(r, origin)| {
            let xi = &hat.rules()[origin].rhs;
            let k = hat.input().rank(&r.symbol).unwrap_or(0);
            let ls: Vec<StateId> = (1..=k).map(|i| StateId::set(states_at(xi, i))).collect();
            annotations.extend(ls.iter().cloned());
            r.with_lookahead(ls)
        })
        .collect();
    let base = Transducer::new(n.states, hat.input().clone(), t2.output().clone(), rules, n.initial)?;
    let la_initial = StateId::set([hat.initial().clone()]);
    let la = domain_automaton_from(&hat, annotations, la_initial, choice);
    LookaheadTransducer::new_unpruned(base, la)
}

/// The sets of look-ahead states that exactly describe some tree: for a
/// tree `s`, `{ l | s ∈ dom(l) }`. Computed bottom-up as the reachable
/// states of the subset construction.
pub(crate) fn lookahead_types(la: &Transducer) -> Vec<BTreeSet<StateId>> {
    let mut types: BTreeSet<BTreeSet<StateId>> = BTreeSet::new();
    loop {
        let known: Vec<BTreeSet<StateId>> = types.iter().cloned().collect();
        let mut added = false;
        for (a, k) in la.input().iter() {
            for tuple in tuples(&known, k) {
                let t = step(la, a, &tuple);
                if types.insert(t) {
                    added = true;
                }
            }
        }
        if !added {
            return types.into_iter().collect();
        }
    }
}

/// Bottom-up transition: the states accepting `a(s1,...,sk)` when each
/// `si` is accepted by exactly the states in `children[i]`.
fn step(la: &Transducer, a: &Symbol, children: &[&BTreeSet<StateId>]) -> BTreeSet<StateId> {
    la.rules()
        .iter()
        .filter(|r| &r.symbol == a)
        .filter(|r| {
            r.rhs
                .children
                .iter()
                .zip(children)
                .all(|(c, set)| matches!(&c.label, crate::tree::Label::StateVar(l, _) if set.contains(l)))
        })
        .map(|r| r.state.clone())
        .collect()
}

fn tuples<T>(items: &[T], k: usize) -> Vec<Vec<&T>> {
    let mut out: Vec<Vec<&T>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                items.iter().map(move |x| {
                    let mut p = p.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Splits a look-ahead transducer into a relabeling `R` and a plain
/// transducer `T` with `T(R(s))` equal to the look-ahead translation of `s`.
///
/// `R` runs the subset construction of the look-ahead automaton top-down:
/// its states are the exact look-ahead sets (plus a start state accepting
/// any), and it relabels `a(s1,...,sk)` by `<a,L1,...,Lk>` where `Li` is the
/// exact set of `si` restricted to the annotations that rules on `a` use at
/// position `i`. Each input has exactly one relabeling. `T` reads these
/// labels: an annotated rule applies to every label containing its
/// annotations.
pub fn decompose_la(m: &LookaheadTransducer) -> Result<(Transducer, Transducer)> {
    let la = m.la();
    let base = m.base();
    let types = lookahead_types(la);
    let type_state = |t: &BTreeSet<StateId>| StateId::set(t.iter().cloned());

    let mut used: BTreeMap<(Symbol, usize), BTreeSet<StateId>> = BTreeMap::new();
    for r in base.rules() {
        for (i, l) in r.lookahead.iter().flatten().enumerate() {
            used.entry((r.symbol.clone(), i)).or_default().insert(l.clone());
        }
    }
    let label_for = |a: &Symbol, children: &[&BTreeSet<StateId>]| {
        let ls = children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let relevant = used.get(&(a.clone(), i));
                StateId::set(c.iter().filter(|l| relevant.is_some_and(|u| u.contains(*l))).cloned())
            })
            .collect();
        Symbol::annotated(a.clone(), ls)
    };

    let start = StateId::base("start");
    let start = fresh(start, m.input(), &types.iter().map(type_state).collect());
    let mut r_rules = Vec::new();
    let mut labels = RankedAlphabet::new();
    for (a, k) in m.input().iter() {
        for tuple in tuples(&types, k) {
            let parent = step(la, a, &tuple);
            let label = label_for(a, &tuple);
            labels.insert(label.clone(), k)?;
            let rhs = Tree::new(
                label.clone(),
                tuple
                    .iter()
                    .enumerate()
                    .map(|(i, c)| Tree::state_var(type_state(c), i + 1))
                    .collect(),
            );
            r_rules.push(Rule::new(type_state(&parent), a.clone(), rhs.clone()));
            r_rules.push(Rule::new(start.clone(), a.clone(), rhs));
        }
    }
    let mut r_states: BTreeSet<StateId> = types.iter().map(type_state).collect();
    r_states.insert(start.clone());
    let relabeling = prune(&Transducer::new(
        r_states,
        m.input().clone(),
        labels.clone(),
        r_rules,
        start,
    )?);

    let mut t_rules = Vec::new();
    for (label, _) in labels.iter() {
        let ann = label.annotation().expect("labels are annotated");
        for r in base.rules() {
            if r.symbol == ann.base && permits(r, &ann.lookahead) {
                t_rules.push(Rule::new(r.state.clone(), label.clone(), r.rhs.clone()));
            }
        }
    }
    let t = Transducer::new(
        base.states().clone(),
        labels,
        base.output().clone(),
        t_rules,
        base.initial().clone(),
    )?;
    Ok((relabeling, t))
}

/// `base`, primed until it clashes with neither a symbol nor a given state.
pub(crate) fn fresh(base: StateId, alphabet: &RankedAlphabet, taken: &BTreeSet<StateId>) -> StateId {
    let mut q = base;
    while taken.contains(&q) || alphabet.contains(&Symbol::new(q.name())) {
        q = StateId::base(format!("{}'", q.name()));
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::transducer::{translate, translate_la};
    use crate::tree::enumerate_trees;

    fn composed(r: &Transducer, t: &Transducer, s: &Tree) -> BTreeSet<Tree> {
        let mut out = BTreeSet::new();
        for u in translate(r, s).unwrap() {
            out.extend(translate(t, &u).unwrap());
        }
        out
    }

    #[test]
    fn annotations_are_the_called_states() {
        let (t1, t2) = fixtures::example4();
        let m = build_m(&t1, &t2).unwrap();
        assert!(m.base().rendered_rules().contains(
            "(q0,{qh0},qh0)(f(x1:{(q1,{qh1,qh2})}, x2:{(q2,{})})) -> f((q1,{qh1,qh2},qh1)(x1),(q1,{qh1,qh2},qh2)(x1))"
        ));
        assert_eq!(m.la().initial().to_string(), "{(q0,{qh0})}");
    }

    #[test]
    fn dead_guess_is_pruned_in_the_deleting_pair() {
        let (t1, t2) = fixtures::deleting();
        let unpruned = build_m_unpruned(&t1, &t2).unwrap();
        assert!(unpruned
            .base()
            .rendered_rules()
            .contains("(q1,{q2},q2)(a(x1:{(q1',{q2})}, x2:{(q1''',{}),(q1'',{})})) -> (q1',{q2},q2)(x1)"));
        let m = build_m(&t1, &t2).unwrap();
        assert!(m.base().rules().is_empty());
        for s in enumerate_trees(t1.input(), 5) {
            assert!(translate_la(&m, &s).unwrap().is_empty());
        }
    }

    #[test]
    fn lookahead_types_partition_trees() {
        let (t1, t2) = fixtures::example4();
        let m = build_m(&t1, &t2).unwrap();
        let types = lookahead_types(m.la());
        for s in enumerate_trees(m.input(), 4) {
            let exact: BTreeSet<StateId> = m
                .la()
                .states()
                .iter()
                .filter(|l| crate::transducer::dom_member(m.la(), l, &s))
                .cloned()
                .collect();
            assert!(types.contains(&exact), "{s}");
        }
    }

    #[test]
    fn decomposition_matches_lookahead_translation() {
        for (t1, t2) in [fixtures::copying(), fixtures::deleting(), fixtures::example4()] {
            let m = build_m(&t1, &t2).unwrap();
            let (r, t) = decompose_la(&m).unwrap();
            assert!(r.is_linear_nondeleting());
            for s in enumerate_trees(m.input(), 4) {
                assert_eq!(composed(&r, &t, &s), translate_la(&m, &s).unwrap(), "{s}");
            }
        }
        let (t1, t2) = fixtures::example4();
        let (r, t) = decompose_la(&build_m(&t1, &t2).unwrap()).unwrap();
        let s = Tree::parse("f(e,d)").unwrap();
        assert_eq!(composed(&r, &t, &s), BTreeSet::from([Tree::leaf("d")]));
    }

    #[test]
    fn single_choice_lookahead_translates_the_same() {
        for (t1, t2) in [fixtures::copying(), fixtures::deleting(), fixtures::example4()] {
            let full = build_m(&t1, &t2).unwrap();
            let (single, _) = build_m_report_with(&t1, &t2, RhsChoice::OnePerState).unwrap();
            assert!(single.la().rules().len() <= full.la().rules().len());
            for s in enumerate_trees(full.input(), 5) {
                assert_eq!(
                    translate_la(&single, &s).unwrap(),
                    translate_la(&full, &s).unwrap(),
                    "{s}"
                );
            }
        }
    }

    #[test]
    fn universal_lookahead_relabels_uniformly() {
        let t = fixtures::example1();
        let m = LookaheadTransducer::trivial(&t).unwrap();
        let (r, rest) = decompose_la(&m).unwrap();
        let s = Tree::parse("a(a(e))").unwrap();
        let relabeled: Vec<String> = translate(&r, &s).unwrap().iter().map(|t| t.to_string()).collect();
        assert_eq!(relabeled, ["<a,{u}>(<a,{u}>(<e>))"]);
        assert_eq!(composed(&r, &rest, &s), translate(&t, &s).unwrap());
    }
}
