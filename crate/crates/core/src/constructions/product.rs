use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::domain::domain_automaton;
use crate::error::{Error, Result};
use crate::state::StateId;
use crate::transducer::{evaluate, Rule, Transducer};
use crate::tree::{Label, NodeAddress, Tree};

/// Rules of a product machine, each with the index of the first machine's
/// rule whose right-hand side was translated.
pub(crate) struct ProductRules {
    pub states: BTreeSet<StateId>,
    pub rules: Vec<(Rule, usize)>,
    pub initial: StateId,
}

/// Translates the right-hand sides of `t1` by `t2`, starting from the pair
/// of initial states and expanding only reachable pairs. `combine` names
/// the pair state; right-hand sides calling a pair rejected by `admit` are
/// dropped.
pub(crate) fn product_rules(
    t1: &Transducer,
    t2: &Transducer,
    combine: impl Fn(&StateId, &StateId) -> StateId,
    admit: impl Fn(&StateId, &StateId) -> bool,
) -> Result<ProductRules> {
    if t1.output() != t2.input() {
        return Err(Error::AlphabetMismatch(format!(
            "output alphabet {} of the first machine differs from input alphabet {} of the second",
            t1.output(),
            t2.input()
        )));
    }
    let mut by_state: HashMap<&StateId, Vec<usize>> = HashMap::new();
    for (i, r) in t1.rules().iter().enumerate() {
        by_state.entry(&r.state).or_default().push(i);
    }
    let initial = combine(t1.initial(), t2.initial());
    let mut states = BTreeSet::new();
    let mut rules = Vec::new();
    let mut work = vec![(t1.initial().clone(), t2.initial().clone())];
    let mut seen = BTreeSet::new();
    while let Some((q1, q2)) = work.pop() {
        if !seen.insert((q1.clone(), q2.clone())) {
            continue;
        }
        let head = combine(&q1, &q2);
        states.insert(head.clone());
        for &ri in by_state.get(&q1).map(Vec::as_slice).unwrap_or(&[]) {
            let rule = &t1.rules()[ri];
            let (xi, calls) = open_calls(&rule.rhs);
            for psi in evaluate(t2, &q2, &xi, &NodeAddress::root())? {
                let mut called = Vec::new();
                let mut ok = true;
                let gamma = close_calls(&psi, &mut |q2p, u| {
                    let (q1p, i) = &calls[u];
                    if !admit(q1p, q2p) {
                        ok = false;
                    }
                    called.push((q1p.clone(), q2p.clone()));
                    Tree::state_var(combine(q1p, q2p), *i)
                });
                if !ok {
                    continue;
                }
                for (a, b) in called {
                    states.insert(combine(&a, &b));
                    work.push((a, b));
                }
                let mut r = Rule::new(head.clone(), rule.symbol.clone(), gamma);
                r.lookahead = rule.lookahead.clone();
                rules.push((r, ri));
            }
        }
    }
    // deterministic rule order independent of worklist order
    rules.sort_by(|(a, ia), (b, ib)| (&a.state, ia, &a.rhs).cmp(&(&b.state, ib, &b.rhs)));
    rules.dedup_by(|(a, _), (b, _)| a == b);
    states.insert(initial.clone());
    Ok(ProductRules { states, rules, initial })
}

/// Replaces every `q(xi)` leaf by a placeholder, remembering the state and
/// variable found at each address.
fn open_calls(rhs: &Tree) -> (Tree, BTreeMap<NodeAddress, (StateId, usize)>) {
    fn go(t: &Tree, v: NodeAddress, calls: &mut BTreeMap<NodeAddress, (StateId, usize)>) -> Tree {
        if let Label::StateVar(q, i) = &t.label {
            calls.insert(v.clone(), (q.clone(), *i));
            return Tree::placeholder(&format!("{q}@{i}"));
        }
        Tree {
            label: t.label.clone(),
            children: t
                .children
                .iter()
                .enumerate()
                .map(|(i, c)| go(c, v.child(i + 1), calls))
                .collect(),
        }
    }
    let mut calls = BTreeMap::new();
    let t = go(rhs, NodeAddress::root(), &mut calls);
    (t, calls)
}

fn close_calls(t: &Tree, f: &mut impl FnMut(&StateId, &NodeAddress) -> Tree) -> Tree {
    if let Label::StateNode(q, u) = &t.label {
        return f(q, u);
    }
    Tree {
        label: t.label.clone(),
        children: t.children.iter().map(|c| close_calls(c, f)).collect(),
    }
}

fn assemble(t1: &Transducer, t2: &Transducer, p: ProductRules) -> Result<Transducer> {
    Transducer::new(
        p.states,
        t1.input().clone(),
        t2.output().clone(),
        p.rules.into_iter().map(|(r, _)| r),
        p.initial,
    )
}

/// The product construction: states `(q1,q2)`, and for every rule
/// `q1(a(..)) -> ξ` of `t1` and every translation `ψ` of `ξ` by `q2`, a rule
/// `(q1,q2)(a(..)) -> γ` where `γ` is `ψ` with each `q2'` at a node labeled
/// `q1'(xi)` replaced by `(q1',q2')(xi)`. It defines a superset of the
/// composition, which is exact when `t2` is linear and nondeleting.
pub fn p_construction(t1: &Transducer, t2: &Transducer) -> Result<Transducer> {
    let p = product_rules(t1, t2, |a, b| StateId::pair(a.clone(), b.clone()), |_, _| true)?;
    assemble(t1, t2, p)
}

/// `t1` restricted so that every state `(q,S)` only produces trees in the
/// domain of every member of `S`.
pub fn build_hat_t1(t1: &Transducer, t2: &Transducer) -> Result<Transducer> {
    p_construction(t1, &domain_automaton(t2))
}

pub(crate) fn hat_components(hat: &Transducer) -> Result<()> {
    for q in hat.states() {
        match q.as_pair() {
            Some((_, s)) if s.members().is_some() => {}
            _ => {
                return Err(Error::InvalidProvenance(format!(
                    "state {q} is not of the form (q,S) with S a set"
                )))
            }
        }
    }
    Ok(())
}

pub(crate) fn product_n_rules(hat: &Transducer, t2: &Transducer) -> Result<ProductRules> {
    hat_components(hat)?;
    let split = |h: &StateId| {
        let (q, s) = h.as_pair().expect("checked above");
        (q.clone(), s.clone())
    };
    product_rules(
        hat,
        t2,
        |h, q2| {
            let (q, s) = split(h);
            StateId::triple(q, s, q2.clone())
        },
        |h, q2| split(h).1.set_contains(q2),
    )
}

/// The product of `hat_t1` and `t2` over states `(q,S,q')` with `q' ∈ S`.
pub fn build_product_n(hat_t1: &Transducer, t2: &Transducer) -> Result<Transducer> {
    let p = product_n_rules(hat_t1, t2)?;
    assemble(hat_t1, t2, p)
}

/// Product with a linear nondeleting second machine, where the product
/// construction is exact.
pub fn compose_linear_nondeleting(t1: &Transducer, t2: &Transducer) -> Result<Transducer> {
    if !t2.is_linear_nondeleting() {
        return Err(Error::NotLinearNondeleting);
    }
    p_construction(t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::state::StateId;
    use crate::transducer::translate;
    use crate::tree::Tree;

    fn rules(t: &Transducer) -> Vec<String> {
        t.rendered_rules().into_iter().collect()
    }

    fn sorted(v: &[&str]) -> Vec<String> {
        let mut v: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn product_of_the_copying_pair() {
        let (t1, t2) = fixtures::copying();
        let n = p_construction(&t1, &t2).unwrap();
        assert_eq!(
            rules(&n),
            sorted(&[
                "(q1,q2)(a(x1)) -> f((q1,q2')(x1),(q1,q2'')(x1))",
                "(q1,q2')(e) -> e",
                "(q1,q2'')(e) -> e'",
                "(q1,q2'')(e) -> e",
            ])
        );
        let outs: Vec<String> = translate(&n, &Tree::parse("a(e)").unwrap())
            .unwrap()
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(outs.len(), 2);
    }

    #[test]
    fn product_of_the_deleting_pair() {
        let (t1, t2) = fixtures::deleting();
        let n = p_construction(&t1, &t2).unwrap();
        assert_eq!(
            rules(&n),
            sorted(&[
                "(q1,q2)(a(x1, x2)) -> (q1',q2)(x1)",
                "(q1',q2)(e) -> e1",
                "(q1',q2)(e) -> e2",
            ])
        );
    }

    #[test]
    fn hat_excludes_unacceptable_guesses() {
        let (t1, t2) = fixtures::copying();
        let hat = build_hat_t1(&t1, &t2).unwrap();
        assert_eq!(
            rules(&hat),
            sorted(&[
                "(q1,{q2})(a(x1)) -> b((q1,{q2',q2''})(x1))",
                "(q1,{q2',q2''})(e) -> e1",
                "(q1,{q2',q2''})(e) -> e2",
            ])
        );
    }

    #[test]
    fn triple_product_keeps_only_members() {
        let (t1, t2) = fixtures::copying();
        let n = build_product_n(&build_hat_t1(&t1, &t2).unwrap(), &t2).unwrap();
        assert_eq!(
            rules(&n),
            sorted(&[
                "(q1,{q2},q2)(a(x1)) -> f((q1,{q2',q2''},q2')(x1),(q1,{q2',q2''},q2'')(x1))",
                "(q1,{q2',q2''},q2')(e) -> e",
                "(q1,{q2',q2''},q2'')(e) -> e",
            ])
        );
        for q in n.states() {
            let (_, s, last) = q.as_triple().unwrap();
            assert!(s.set_contains(last));
        }
    }

    #[test]
    fn triple_product_needs_set_components() {
        let (t1, t2) = fixtures::copying();
        assert!(matches!(build_product_n(&t1, &t2), Err(Error::InvalidProvenance(_))));
    }

    #[test]
    fn identity_second_stage_preserves_rules() {
        let t = fixtures::example1();
        let id = Transducer::identity(t.output(), StateId::base("i"));
        let p = p_construction(&t, &id).unwrap();
        assert_eq!(p.rules().len(), t.rules().len());
        for s in ["e", "a(e)", "a(a(a(e)))"] {
            let s = Tree::parse(s).unwrap();
            assert_eq!(translate(&p, &s).unwrap(), translate(&t, &s).unwrap());
        }
    }

    #[test]
    fn fusion_requires_linear_nondeleting_second_stage() {
        let (t1, t2) = fixtures::copying();
        assert_eq!(
            compose_linear_nondeleting(&t1, &t2).unwrap_err(),
            Error::NotLinearNondeleting
        );
    }
}
