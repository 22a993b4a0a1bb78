//! Evaluation semantics.
//!
//! `⟦q⟧_v(s)` is computed bottom-up over the input with a memo table keyed
//! by `(state, address)`. Tables live inside an [`Evaluator`], which is tied
//! to a single input tree, so every public entry point is pure.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::{LookaheadTransducer, Rule, Transducer};
use crate::alphabet::{RankedAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::state::StateId;
use crate::tree::{canonical_vec, compositions, Label, NodeAddress, Tree};

/// Per-state output sets larger than this abort with a resource-limit error.
pub const DEFAULT_OUTPUT_CAP: usize = 1_000_000;

/// Largest input the eager look-ahead path will materialize annotations for.
pub const DEFAULT_EAGER_GUARD: usize = 12;

type Memo<V> = HashMap<(StateId, NodeAddress), V>;

/// Memoizing evaluator for one input tree.
pub struct Evaluator<'a> {
    machine: &'a Transducer,
    la: Option<&'a Transducer>,
    cap: usize,
    memo: Memo<Rc<Vec<Tree>>>,
    la_memo: Memo<bool>,
}

impl<'a> Evaluator<'a> {
    /// Plain semantics; look-ahead annotations on rules, if any, are ignored.
    pub fn new(machine: &'a Transducer) -> Self {
        Evaluator {
            machine,
            la: None,
            cap: DEFAULT_OUTPUT_CAP,
            memo: HashMap::new(),
            la_memo: HashMap::new(),
        }
    }

    /// Look-ahead semantics: a rule `q(a(x1:l1,...,xk:lk)) -> t` fires at a
    /// node iff every child subtree is in the domain of its `li`.
    pub fn with_lookahead(m: &'a LookaheadTransducer) -> Self {
        Evaluator {
            la: Some(m.la()),
            ..Self::new(m.base())
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// `⟦q⟧_v(s)`, where `s` is the subtree at `v` of this evaluator's input.
    pub fn eval(&mut self, q: &StateId, s: &Tree, v: &NodeAddress) -> Result<Rc<Vec<Tree>>> {
        if !self.machine.states().contains(q) {
            return Err(Error::UnknownState(q.to_string()));
        }
        let key = (q.clone(), v.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let result = Rc::new(self.eval_uncached(q, s, v)?);
        self.memo.insert(key, result.clone());
        Ok(result)
    }

    fn eval_uncached(&mut self, q: &StateId, s: &Tree, v: &NodeAddress) -> Result<Vec<Tree>> {
        let a = match &s.label {
            Label::Symbol(a) => a,
            _ => return Ok(vec![Tree::state_node(q.clone(), v.clone())]),
        };
        check_symbol(self.machine.input(), a, s.children.len())?;
        let machine = self.machine;
        let mut out = BTreeSet::new();
        for &ri in machine.rule_indices(q, a) {
            let rule = &machine.rules()[ri];
            if !self.lookahead_holds(rule, s, v) {
                continue;
            }
            let mut sets: HashMap<(StateId, usize), Rc<Vec<Tree>>> = HashMap::new();
            let mut product: usize = 1;
            let mut dead = false;
            for (q2, i) in rule.calls() {
                let set = match sets.get(&(q2.clone(), i)) {
                    Some(set) => set.clone(),
                    None => {
                        let set = self.eval(&q2, &s.children[i - 1], &v.child(i))?;
                        sets.insert((q2.clone(), i), set.clone());
                        set
                    }
                };
                if set.is_empty() {
                    dead = true;
                    break;
                }
                product = product.saturating_mul(set.len());
            }
            if dead {
                continue;
            }
            if product > self.cap {
                return Err(Error::ResourceLimit(format!(
                    "right-hand side of {rule} instantiates to {product} trees (cap {})",
                    self.cap
                )));
            }
            out.extend(rule.rhs.map_leaves(&mut |l| match l {
                Label::StateVar(q2, i) => Some(sets[&(q2.clone(), *i)].as_ref().clone()),
                _ => None,
            }));
            if out.len() > self.cap {
                return Err(Error::ResourceLimit(format!(
                    "state {q} produces more than {} trees",
                    self.cap
                )));
            }
        }
        Ok(out.into_iter().collect())
    }

    fn lookahead_holds(&mut self, rule: &Rule, s: &Tree, v: &NodeAddress) -> bool {
        let (Some(la), Some(ls)) = (self.la, &rule.lookahead) else {
            return true;
        };
        ls.iter()
            .enumerate()
            .all(|(i, l)| member(la, &mut self.la_memo, l, &s.children[i], &v.child(i + 1)))
    }
}

fn check_symbol(alphabet: &RankedAlphabet, a: &Symbol, arity: usize) -> Result<()> {
    match alphabet.rank(a) {
        Some(k) if k == arity => Ok(()),
        Some(k) => Err(Error::AlphabetMismatch(format!(
            "symbol {a} has rank {k} but occurs with {arity} children"
        ))),
        None => Err(Error::AlphabetMismatch(format!(
            "symbol {a} is not in the input alphabet {alphabet}"
        ))),
    }
}

/// Domain membership: some rule of `q` on the root symbol has every called
/// state's domain containing the corresponding child. Placeholder leaves
/// count as members. With `la` set, rule annotations are checked too.
struct Membership<'a> {
    machine: &'a Transducer,
    la: Option<&'a Transducer>,
    memo: Memo<bool>,
    la_memo: Memo<bool>,
}

impl<'a> Membership<'a> {
    fn new(machine: &'a Transducer, la: Option<&'a Transducer>) -> Self {
        Membership {
            machine,
            la,
            memo: HashMap::new(),
            la_memo: HashMap::new(),
        }
    }

    fn check(&mut self, q: &StateId, s: &Tree, v: &NodeAddress) -> bool {
        let Label::Symbol(a) = &s.label else {
            return true;
        };
        let key = (q.clone(), v.clone());
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let machine = self.machine;
        let mut found = false;
        if machine.input().rank(a) == Some(s.children.len()) {
            found = machine.rules_for(q, a).any(|rule| {
                if let (Some(la), Some(ls)) = (self.la, &rule.lookahead) {
                    let ok = ls
                        .iter()
                        .enumerate()
                        .all(|(i, l)| member(la, &mut self.la_memo, l, &s.children[i], &v.child(i + 1)));
                    if !ok {
                        return false;
                    }
                }
                rule.calls()
                    .into_iter()
                    .all(|(q2, i)| self.check(&q2, &s.children[i - 1], &v.child(i)))
            });
        }
        self.memo.insert(key, found);
        found
    }
}

/// Plain membership sharing a caller-owned memo table.
fn member(machine: &Transducer, memo: &mut Memo<bool>, q: &StateId, s: &Tree, v: &NodeAddress) -> bool {
    let mut m = Membership::new(machine, None);
    std::mem::swap(&mut m.memo, memo);
    let r = m.check(q, s, v);
    std::mem::swap(&mut m.memo, memo);
    r
}

/// `⟦q⟧_v(s)` for a possibly partial input `s` rooted at address `v`.
pub fn evaluate(t: &Transducer, q: &StateId, s: &Tree, v: &NodeAddress) -> Result<BTreeSet<Tree>> {
    let out = Evaluator::new(t).eval(q, s, v)?;
    Ok(out.iter().cloned().collect())
}

/// All outputs of state `q` on the ground tree `s`.
pub fn translate_from(t: &Transducer, q: &StateId, s: &Tree) -> Result<BTreeSet<Tree>> {
    s.check_over(t.input())?;
    evaluate(t, q, s, &NodeAddress::root())
}

/// `T(s)`: all ground outputs from the initial state.
pub fn translate(t: &Transducer, s: &Tree) -> Result<BTreeSet<Tree>> {
    translate_from(t, t.initial(), s)
}

/// `s ∈ dom(q)`. Symbols outside the input alphabet are simply not members.
pub fn dom_member(t: &Transducer, q: &StateId, s: &Tree) -> bool {
    Membership::new(t, None).check(q, s, &NodeAddress::root())
}

impl LookaheadTransducer {
    /// `s ∈ dom(q)` under look-ahead semantics.
    pub fn dom_member(&self, q: &StateId, s: &Tree) -> bool {
        Membership::new(self.base(), Some(self.la())).check(q, s, &NodeAddress::root())
    }
}

/// Lazy look-ahead semantics: rules are guarded by domain checks on the
/// children, nothing is relabeled.
pub fn translate_la(m: &LookaheadTransducer, s: &Tree) -> Result<BTreeSet<Tree>> {
    s.check_over(m.input())?;
    let out = Evaluator::with_lookahead(m).eval(m.base().initial(), s, &NodeAddress::root())?;
    Ok(out.iter().cloned().collect())
}

/// Eager two-phase look-ahead semantics. First every node `a(s1,...,sk)`
/// is relabeled by `<a,L1,...,Lk>` where `Li` is the set of all look-ahead
/// states whose domain contains `si`; then a rule annotated `(l1,...,lk)`
/// applies to that label iff every `li` is in `Li`. The relabeling is
/// unique, so a node visited by several copies sees one label that serves
/// all of them. Inputs larger than `guard` nodes are refused.
pub fn translate_la_eager(m: &LookaheadTransducer, s: &Tree, guard: usize) -> Result<BTreeSet<Tree>> {
    s.check_over(m.input())?;
    if s.size() > guard {
        return Err(Error::ResourceLimit(format!(
            "eager relabeling refused for input of size {} (guard {guard})",
            s.size()
        )));
    }
    let la = m.la();
    let mut memo = HashMap::new();
    let relabeled = relabel(la, &mut memo, s, &NodeAddress::root());

    let mut alphabet = RankedAlphabet::new();
    collect_symbols(&relabeled, &mut alphabet)?;
    let mut rules = Vec::new();
    for (label, _) in alphabet.iter() {
        let ann = label.annotation().expect("relabeled symbols are annotated");
        for r in m.base().rules() {
            if r.symbol == ann.base && permits(r, &ann.lookahead) {
                rules.push(Rule::new(r.state.clone(), label.clone(), r.rhs.clone()));
            }
        }
    }
    let plain = Transducer::new(
        m.base().states().clone(),
        alphabet,
        m.output().clone(),
        rules,
        m.base().initial().clone(),
    )?;
    translate(&plain, &relabeled)
}

/// Whether a look-ahead rule may fire under a label whose `i`-th component
/// is a set of look-ahead states.
pub(crate) fn permits(rule: &Rule, label: &[StateId]) -> bool {
    let ls = rule.lookahead.as_deref().unwrap_or(&[]);
    ls.len() == label.len() && ls.iter().zip(label).all(|(l, set)| set.set_contains(l))
}

fn collect_symbols(t: &Tree, alphabet: &mut RankedAlphabet) -> Result<()> {
    if let Label::Symbol(a) = &t.label {
        alphabet.insert(a.clone(), t.children.len())?;
    }
    t.children.iter().try_for_each(|c| collect_symbols(c, alphabet))
}

fn relabel(la: &Transducer, memo: &mut Memo<bool>, s: &Tree, v: &NodeAddress) -> Tree {
    let Label::Symbol(a) = &s.label else {
        return s.clone();
    };
    let mut children = Vec::new();
    let mut sets = Vec::new();
    for (i, c) in s.children.iter().enumerate() {
        let w = v.child(i + 1);
        children.push(relabel(la, memo, c, &w));
        sets.push(StateId::set(
            la.states().iter().filter(|l| member(la, memo, l, c, &w)).cloned(),
        ));
    }
    Tree::new(Symbol::annotated(a.clone(), sets), children)
}

fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut combos: Vec<Vec<T>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(combos.len() * list.len());
        for prefix in &combos {
            for x in list {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        combos = next;
    }
    combos
}

/// Conjunctions of states: a tree is in the domain of a set iff it is in the
/// domain of every member, and the empty set accepts every tree. For each
/// explored set and symbol, one alternative per choice of a single
/// right-hand side per member, giving the child sets.
type Alternatives = Vec<(Symbol, Vec<BTreeSet<StateId>>)>;

struct ConstraintSets<'a> {
    machine: &'a Transducer,
    alternatives: HashMap<BTreeSet<StateId>, Alternatives>,
}

impl<'a> ConstraintSets<'a> {
    fn explore(machine: &'a Transducer, root: BTreeSet<StateId>) -> Self {
        let mut cs = ConstraintSets {
            machine,
            alternatives: HashMap::new(),
        };
        let mut work = vec![root];
        while let Some(set) = work.pop() {
            if cs.alternatives.contains_key(&set) {
                continue;
            }
            let alts = cs.alternatives_of(&set);
            for (_, children) in &alts {
                for c in children {
                    if !cs.alternatives.contains_key(c) {
                        work.push(c.clone());
                    }
                }
            }
            cs.alternatives.insert(set, alts);
        }
        cs
    }

    fn alternatives_of(&self, set: &BTreeSet<StateId>) -> Vec<(Symbol, Vec<BTreeSet<StateId>>)> {
        let mut out = Vec::new();
        for (a, k) in self.machine.input().iter() {
            let per_member: Vec<Vec<&Tree>> = set.iter().map(|q| self.machine.rhs_for(q, a)).collect();
            if per_member.iter().any(Vec::is_empty) {
                continue;
            }
            let mut seen = BTreeSet::new();
            for choice in product(&per_member) {
                let children: Vec<BTreeSet<StateId>> = (1..=k)
                    .map(|i| choice.iter().flat_map(|rhs| super::states_at(rhs, i)).collect())
                    .collect();
                if seen.insert(children.clone()) {
                    out.push((a.clone(), children));
                }
            }
        }
        out
    }

    fn productive(&self) -> BTreeSet<BTreeSet<StateId>> {
        let mut done: BTreeSet<BTreeSet<StateId>> = BTreeSet::new();
        loop {
            let before = done.len();
            for (set, alts) in &self.alternatives {
                if !done.contains(set)
                    && alts
                        .iter()
                        .any(|(_, children)| children.iter().all(|c| done.contains(c)))
                {
                    done.insert(set.clone());
                }
            }
            if done.len() == before {
                return done;
            }
        }
    }
}

/// `dom(q) = ∅`, by a least fixpoint over the productive state sets
/// reachable from `{q}`. On linear machines only singletons arise and this
/// is the usual productive-state computation; copying rules make a child
/// satisfy several states at once, which is why sets are tracked.
/// Look-ahead annotations are ignored.
pub fn dom_empty(t: &Transducer, q: &StateId) -> bool {
    let root: BTreeSet<StateId> = [q.clone()].into_iter().collect();
    let cs = ConstraintSets::explore(t, root.clone());
    !cs.productive().contains(&root)
}

/// Every ground tree in `dom(q)` with at most `max_size` nodes, in canonical
/// order. Trees are generated from the rules, not filtered from all trees.
/// Look-ahead annotations are ignored, so for a look-ahead transducer's base
/// this yields a superset of its domain.
pub fn enumerate_domain(t: &Transducer, q: &StateId, max_size: usize) -> Vec<Tree> {
    let root: BTreeSet<StateId> = [q.clone()].into_iter().collect();
    let cs = ConstraintSets::explore(t, root.clone());
    let productive = cs.productive();
    let mut gen = Generator {
        sets: &cs,
        productive: &productive,
        memo: HashMap::new(),
    };
    let mut out = Vec::new();
    for n in 1..=max_size {
        out.extend(gen.trees(&root, n).iter().cloned());
    }
    canonical_vec(out)
}

struct Generator<'s, 'a> {
    sets: &'s ConstraintSets<'a>,
    productive: &'s BTreeSet<BTreeSet<StateId>>,
    memo: HashMap<(BTreeSet<StateId>, usize), Rc<Vec<Tree>>>,
}

impl Generator<'_, '_> {
    fn trees(&mut self, set: &BTreeSet<StateId>, n: usize) -> Rc<Vec<Tree>> {
        let key = (set.clone(), n);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut out = BTreeSet::new();
        if self.productive.contains(set) {
            let alts = self.sets.alternatives[set].clone();
            for (a, children) in alts {
                if children.iter().any(|c| !self.productive.contains(c)) {
                    continue;
                }
                for split in compositions(n - 1, children.len()) {
                    let options: Vec<Vec<Tree>> = children
                        .iter()
                        .zip(&split)
                        .map(|(c, &m)| self.trees(c, m).as_ref().clone())
                        .collect();
                    for kids in product(&options) {
                        out.insert(Tree::new(a.clone(), kids));
                    }
                }
            }
        }
        let v = Rc::new(out.into_iter().collect::<Vec<_>>());
        self.memo.insert(key, v.clone());
        v
    }
}
