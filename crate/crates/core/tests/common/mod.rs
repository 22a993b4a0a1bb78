//! Brute-force reference semantics, independent of the library's evaluator.
//!
//! Terms are rewritten as sentential forms: a pending state application is
//! a `State` node holding the input subtree it still has to read. The
//! leftmost pending node is rewritten with every applicable rule; since
//! pending nodes never interact, fixing the order loses no outputs.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ttc::transducer::{LookaheadTransducer, Transducer};
use ttc::tree::{Label, Tree};
use ttc::{CompositionChain, StateId, Symbol};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Term {
    Sym(Symbol, Vec<Term>),
    State(String, Box<Term>),
}

fn term(t: &Tree) -> Term {
    match &t.label {
        Label::Symbol(s) => Term::Sym(s.clone(), t.children.iter().map(term).collect()),
        other => panic!("not a ground tree: {other}"),
    }
}

fn tree(t: &Term) -> Tree {
    match t {
        Term::Sym(s, cs) => Tree::new(s.clone(), cs.iter().map(tree).collect()),
        Term::State(..) => panic!("pending state in output"),
    }
}

/// Right-hand side with `q'(xi)` replaced by a pending `q'` on child `i`.
fn instantiate(rhs: &Tree, children: &[Term]) -> Term {
    match &rhs.label {
        Label::Symbol(s) => Term::Sym(
            s.clone(),
            rhs.children.iter().map(|c| instantiate(c, children)).collect(),
        ),
        Label::StateVar(q, i) => Term::State(q.to_string(), Box::new(children[i - 1].clone())),
        other => panic!("unexpected right-hand side label {other}"),
    }
}

/// Rewrites the leftmost pending node; `None` if the form is ground.
fn step(form: &Term, rules: &dyn Fn(&str, &Term) -> Vec<Term>) -> Option<Vec<Term>> {
    match form {
        Term::State(q, s) => Some(rules(q, s)),
        Term::Sym(a, cs) => {
            for (i, c) in cs.iter().enumerate() {
                if let Some(options) = step(c, rules) {
                    return Some(
                        options
                            .into_iter()
                            .map(|o| {
                                let mut cs = cs.clone();
                                cs[i] = o;
                                Term::Sym(a.clone(), cs)
                            })
                            .collect(),
                    );
                }
            }
            None
        }
    }
}

/// Sentential forms explored before the oracle gives up on an input.
pub const FORM_CAP: usize = 50_000;

fn normal_forms(start: Term, rules: &dyn Fn(&str, &Term) -> Vec<Term>, cap: usize) -> Option<BTreeSet<Term>> {
    let mut done = BTreeSet::new();
    let mut todo = vec![start];
    let mut seen = BTreeSet::new();
    while let Some(f) = todo.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        if seen.len() > cap {
            return None;
        }
        match step(&f, rules) {
            None => {
                done.insert(f);
            }
            Some(next) => todo.extend(next),
        }
    }
    Some(done)
}

type Guarded = (Option<Vec<StateId>>, Tree);

struct RuleTable {
    by_lhs: BTreeMap<(String, Symbol), Vec<Guarded>>,
}

impl RuleTable {
    fn new(t: &Transducer) -> Self {
        let mut by_lhs: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for r in t.rules() {
            by_lhs
                .entry((r.state.to_string(), r.symbol.clone()))
                .or_default()
                .push((r.lookahead.clone(), r.rhs.clone()));
        }
        RuleTable { by_lhs }
    }
}

fn outputs_with(
    t: &Transducer,
    q: &str,
    s: &Tree,
    admit: &dyn Fn(&[StateId], &[Term]) -> bool,
    cap: usize,
) -> Option<BTreeSet<Term>> {
    let table = RuleTable::new(t);
    let rules = |q: &str, s: &Term| -> Vec<Term> {
        let Term::Sym(a, cs) = s else { unreachable!() };
        table
            .by_lhs
            .get(&(q.to_string(), a.clone()))
            .map(|rs| {
                rs.iter()
                    .filter(|(la, _)| la.as_ref().is_none_or(|ls| admit(ls, cs)))
                    .map(|(_, rhs)| instantiate(rhs, cs))
                    .collect()
            })
            .unwrap_or_default()
    };
    normal_forms(Term::State(q.to_string(), Box::new(term(s))), &rules, cap)
}

fn to_trees(ts: BTreeSet<Term>) -> BTreeSet<Tree> {
    ts.iter().map(tree).collect()
}

/// Outputs of state `q` on `s` by sentential-form rewriting; `None` past
/// [`FORM_CAP`].
pub fn try_outputs_from(t: &Transducer, q: &StateId, s: &Tree) -> Option<BTreeSet<Tree>> {
    outputs_with(t, &q.to_string(), s, &|_, _| true, FORM_CAP).map(to_trees)
}

pub fn try_outputs(t: &Transducer, s: &Tree) -> Option<BTreeSet<Tree>> {
    try_outputs_from(t, t.initial(), s)
}

/// [`try_outputs`] giving up after `cap` sentential forms.
pub fn try_outputs_within(t: &Transducer, s: &Tree, cap: usize) -> Option<BTreeSet<Tree>> {
    outputs_with(t, &t.initial().to_string(), s, &|_, _| true, cap).map(to_trees)
}

pub fn outputs(t: &Transducer, s: &Tree) -> BTreeSet<Tree> {
    try_outputs(t, s).expect("oracle form cap exceeded")
}

/// `s` is in the domain of `q` iff some rule for `q` at the root has every
/// state call on `xi` accepting the `i`-th child. Enumerates no outputs.
pub fn in_domain(t: &Transducer, q: &StateId, s: &Tree) -> bool {
    let Label::Symbol(a) = &s.label else { return false };
    t.rules().iter().any(|r| {
        &r.state == q && &r.symbol == a && calls(&r.rhs).iter().all(|(p, i)| in_domain(t, p, &s.children[i - 1]))
    })
}

fn calls(rhs: &Tree) -> Vec<(StateId, usize)> {
    match &rhs.label {
        Label::StateVar(q, i) => vec![(q.clone(), *i)],
        _ => rhs.children.iter().flat_map(calls).collect(),
    }
}

/// Look-ahead translation: an annotated rule applies at `a(s1,...,sk)` iff
/// each `si` is in the domain of its annotation state.
pub fn try_outputs_la(m: &LookaheadTransducer, s: &Tree) -> Option<BTreeSet<Tree>> {
    let la = m.la();
    let admit = |ls: &[StateId], cs: &[Term]| ls.iter().zip(cs).all(|(l, c)| in_domain(la, l, &tree(c)));
    outputs_with(m.base(), &m.base().initial().to_string(), s, &admit, FORM_CAP).map(to_trees)
}

pub fn outputs_la(m: &LookaheadTransducer, s: &Tree) -> BTreeSet<Tree> {
    try_outputs_la(m, s).expect("oracle form cap exceeded")
}

/// Relational composition through every stage.
pub fn try_chain(c: &CompositionChain, s: &Tree) -> Option<BTreeSet<Tree>> {
    let mut current = BTreeSet::from([s.clone()]);
    for t in c.stages() {
        let mut next = BTreeSet::new();
        for u in &current {
            next.extend(try_outputs(t, u)?);
        }
        current = next;
    }
    Some(current)
}

pub fn chain(c: &CompositionChain, s: &Tree) -> BTreeSet<Tree> {
    try_chain(c, s).expect("oracle form cap exceeded")
}

/// Chain outputs for a pair.
pub fn try_pair(t1: &Transducer, t2: &Transducer, s: &Tree) -> Option<BTreeSet<Tree>> {
    let mut out = BTreeSet::new();
    for u in try_outputs(t1, s)? {
        out.extend(try_outputs(t2, &u)?);
    }
    Some(out)
}

pub fn pair(t1: &Transducer, t2: &Transducer, s: &Tree) -> BTreeSet<Tree> {
    try_pair(t1, t2, s).expect("oracle form cap exceeded")
}
