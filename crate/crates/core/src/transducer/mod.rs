//! Transducers, automata, look-ahead transducers and composition chains.

mod eval;

pub(crate) use eval::permits;
pub use eval::{
    dom_empty, dom_member, enumerate_domain, evaluate, translate, translate_from, translate_la, translate_la_eager,
    Evaluator, DEFAULT_EAGER_GUARD, DEFAULT_OUTPUT_CAP,
};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::state::StateId;
use crate::tree::{Label, Tree};

/// `q(a(x1[:l1],...,xk[:lk])) -> rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub state: StateId,
    pub symbol: Symbol,
    pub lookahead: Option<Vec<StateId>>,
    pub rhs: Tree,
}

impl Rule {
    pub fn new(state: StateId, symbol: Symbol, rhs: Tree) -> Self {
        Rule {
            state,
            symbol,
            lookahead: None,
            rhs,
        }
    }

    pub fn with_lookahead(mut self, lookahead: Vec<StateId>) -> Self {
        self.lookahead = Some(lookahead);
        self
    }

    /// All `(q, i)` with `q(x_i)` occurring in the right-hand side, in
    /// pre-order, with repetitions.
    pub fn calls(&self) -> Vec<(StateId, usize)> {
        rhs_calls(&self.rhs)
    }

    /// `rhs<x_i>`: the states applied to variable `i`.
    pub fn states_at(&self, i: usize) -> BTreeSet<StateId> {
        states_at(&self.rhs, i)
    }
}

pub(crate) fn rhs_calls(rhs: &Tree) -> Vec<(StateId, usize)> {
    let mut out = Vec::new();
    collect_calls(rhs, &mut out);
    out
}

fn collect_calls(t: &Tree, out: &mut Vec<(StateId, usize)>) {
    if let Label::StateVar(q, i) = &t.label {
        out.push((q.clone(), *i));
    }
    for c in &t.children {
        collect_calls(c, out);
    }
}

pub(crate) fn states_at(rhs: &Tree, i: usize) -> BTreeSet<StateId> {
    rhs_calls(rhs)
        .into_iter()
        .filter(|(_, j)| *j == i)
        .map(|(q, _)| q)
        .collect()
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match &self.lookahead {
            Some(ls) => ls.len(),
            None => self.calls().iter().map(|(_, i)| *i).max().unwrap_or(0),
        };
        f.write_str(&render_rule(self, k))
    }
}

/// Renders a rule given the rank of its input symbol; [`Rule`]'s `Display`
/// cannot know the rank of plain rules.
pub fn render_rule(rule: &Rule, rank: usize) -> String {
    let mut s = format!("{}({}", rule.state, rule.symbol);
    if rank > 0 {
        s.push('(');
        for i in 1..=rank {
            if i > 1 {
                s.push_str(", ");
            }
            s.push_str(&format!("x{i}"));
            if let Some(ls) = &rule.lookahead {
                s.push_str(&format!(":{}", ls[i - 1]));
            }
        }
        s.push(')');
    }
    s.push_str(&format!(") -> {}", rule.rhs));
    s
}

/// A nondeterministic top-down tree transducer `(Q, Σ, Δ, R, q0)`.
///
/// Rules keep their insertion order (rule numbers in traces are 1-based
/// positions in that order); exact duplicates are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    states: BTreeSet<StateId>,
    input: RankedAlphabet,
    output: RankedAlphabet,
    rules: Vec<Rule>,
    initial: StateId,
    index: HashMap<(StateId, Symbol), Vec<usize>>,
}

impl Transducer {
    pub fn new(
        states: impl IntoIterator<Item = StateId>,
        input: RankedAlphabet,
        output: RankedAlphabet,
        rules: impl IntoIterator<Item = Rule>,
        initial: StateId,
    ) -> Result<Self> {
        let states: BTreeSet<StateId> = states.into_iter().collect();
        let mut seen = HashSet::new();
        let rules: Vec<Rule> = rules.into_iter().filter(|r| seen.insert(r.clone())).collect();
        let mut index: HashMap<(StateId, Symbol), Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            index.entry((r.state.clone(), r.symbol.clone())).or_default().push(i);
        }
        let t = Transducer {
            states,
            input,
            output,
            rules,
            initial,
            index,
        };
        t.validate()?;
        Ok(t)
    }

    /// Builds a transducer whose state set is inferred from the initial
    /// state and the rules.
    pub fn from_rules(
        input: RankedAlphabet,
        output: RankedAlphabet,
        rules: Vec<Rule>,
        initial: StateId,
    ) -> Result<Self> {
        let mut states = BTreeSet::new();
        states.insert(initial.clone());
        for r in &rules {
            states.insert(r.state.clone());
            states.extend(r.calls().into_iter().map(|(q, _)| q));
        }
        Self::new(states, input, output, rules, initial)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(m));
        if !self.states.contains(&self.initial) {
            return bad(format!("initial state {} is not a state", self.initial));
        }
        let with_la = self.rules.first().map(|r| r.lookahead.is_some());
        for r in &self.rules {
            if !self.states.contains(&r.state) {
                return Err(Error::UnknownState(r.state.to_string()));
            }
            let Some(k) = self.input.rank(&r.symbol) else {
                return Err(Error::AlphabetMismatch(format!(
                    "rule {r}: input symbol {} not in input alphabet",
                    r.symbol
                )));
            };
            if Some(r.lookahead.is_some()) != with_la {
                return bad("rules mix look-ahead and plain left-hand sides".into());
            }
            if let Some(ls) = &r.lookahead {
                if ls.len() != k {
                    return bad(format!("rule {r}: {} annotations for rank {k}", ls.len()));
                }
            }
            self.validate_rhs(r, &r.rhs, k)?;
        }
        let plain_names: HashSet<&str> = self
            .input
            .iter()
            .chain(self.output.iter())
            .filter_map(|(s, _)| s.plain_name())
            .collect();
        for q in &self.states {
            if plain_names.contains(q.name()) {
                return bad(format!("state {q} clashes with a symbol name"));
            }
        }
        Ok(())
    }

    fn validate_rhs(&self, r: &Rule, t: &Tree, k: usize) -> Result<()> {
        match &t.label {
            Label::Symbol(s) => match self.output.rank(s) {
                Some(n) if n == t.children.len() => {}
                Some(n) => {
                    return Err(Error::InvalidMachine(format!(
                        "rule {r}: output symbol {s} has rank {n}, used with {} children",
                        t.children.len()
                    )))
                }
                None => {
                    return Err(Error::AlphabetMismatch(format!(
                        "rule {r}: output symbol {s} not in output alphabet"
                    )))
                }
            },
            Label::StateVar(q, i) => {
                if !self.states.contains(q) {
                    return Err(Error::UnknownState(q.to_string()));
                }
                if *i == 0 || *i > k {
                    return Err(Error::InvalidMachine(format!(
                        "rule {r}: variable x{i} out of range for rank {k}"
                    )));
                }
            }
            other => {
                return Err(Error::InvalidMachine(format!(
                    "rule {r}: {other} cannot occur in a right-hand side"
                )))
            }
        }
        t.children.iter().try_for_each(|c| self.validate_rhs(r, c, k))
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.input
    }

    pub fn output(&self) -> &RankedAlphabet {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn initial(&self) -> &StateId {
        &self.initial
    }

    /// Rules in the `.ttc` rule syntax, sorted; handy for comparing rule sets.
    pub fn rendered_rules(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .map(|r| render_rule(r, self.input.rank(&r.symbol).unwrap_or(0)))
            .collect()
    }

    pub fn has_lookahead_rules(&self) -> bool {
        self.rules.iter().any(|r| r.lookahead.is_some())
    }

    /// Indices (into [`Transducer::rules`]) of the rules for `q` on `a`.
    pub fn rule_indices(&self, q: &StateId, a: &Symbol) -> &[usize] {
        self.index
            .get(&(q.clone(), a.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn rules_for<'a>(&'a self, q: &StateId, a: &Symbol) -> impl Iterator<Item = &'a Rule> {
        self.rule_indices(q, a).iter().map(move |&i| &self.rules[i])
    }

    /// `rhs_T(q, a)`, deduplicated, in rule order.
    pub fn rhs_for(&self, q: &StateId, a: &Symbol) -> Vec<&Tree> {
        let mut seen = HashSet::new();
        self.rules_for(q, a)
            .map(|r| &r.rhs)
            .filter(|t| seen.insert(*t))
            .collect()
    }

    /// `Σ = Δ` and every rule is `q(a(x1..xk)) -> a(q1(x1),...,qk(xk))`.
    pub fn is_automaton(&self) -> bool {
        self.input == self.output
            && self.rules.iter().all(|r| {
                r.rhs.label == Label::Symbol(r.symbol.clone())
                    && r.rhs
                        .children
                        .iter()
                        .enumerate()
                        .all(|(i, c)| c.children.is_empty() && matches!(&c.label, Label::StateVar(_, j) if *j == i + 1))
            })
    }

    /// Every variable of every rule occurs exactly once in its right-hand side.
    pub fn is_linear_nondeleting(&self) -> bool {
        self.rules.iter().all(|r| {
            let k = self.input.rank(&r.symbol).unwrap_or(0);
            let calls = r.calls();
            calls.len() == k && (1..=k).all(|i| calls.iter().filter(|(_, j)| *j == i).count() == 1)
        })
    }

    /// Every variable occurs at most once in each right-hand side.
    pub fn is_linear(&self) -> bool {
        self.rules.iter().all(|r| {
            let calls = r.calls();
            let vars: HashSet<usize> = calls.iter().map(|(_, i)| *i).collect();
            vars.len() == calls.len()
        })
    }

    /// The one-state automaton realizing the identity on `alphabet`.
    pub fn identity(alphabet: &RankedAlphabet, state: StateId) -> Self {
        let rules: Vec<Rule> = alphabet
            .iter()
            .map(|(a, k)| {
                Rule::new(
                    state.clone(),
                    a.clone(),
                    Tree::new(a.clone(), (1..=k).map(|i| Tree::state_var(state.clone(), i)).collect()),
                )
            })
            .collect();
        Self::new([state.clone()], alphabet.clone(), alphabet.clone(), rules, state)
            .expect("identity automaton is well-formed")
    }

    /// Same machine with a different initial state (which must be a state).
    pub fn with_initial(&self, initial: StateId) -> Result<Self> {
        Self::new(
            self.states.clone(),
            self.input.clone(),
            self.output.clone(),
            self.rules.clone(),
            initial,
        )
    }
}

/// A transducer whose rules carry look-ahead annotations, together with its
/// look-ahead automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookaheadTransducer {
    base: Transducer,
    la: Transducer,
}

impl LookaheadTransducer {
    /// Validates and prunes: look-ahead states with empty domain are removed
    /// together with every rule that mentions them.
    pub fn new(base: Transducer, la: Transducer) -> Result<Self> {
        Self::check(&base, &la)?;
        Ok(crate::constructions::prune_lookahead(&LookaheadTransducer { base, la }))
    }

    /// Like [`LookaheadTransducer::new`] but without pruning.
    pub fn new_unpruned(base: Transducer, la: Transducer) -> Result<Self> {
        Self::check(&base, &la)?;
        Ok(LookaheadTransducer { base, la })
    }

    fn check(base: &Transducer, la: &Transducer) -> Result<()> {
        if !la.is_automaton() {
            return Err(Error::InvalidMachine("look-ahead machine is not an automaton".into()));
        }
        if la.input() != base.input() {
            return Err(Error::AlphabetMismatch(
                "look-ahead automaton and transducer read different alphabets".into(),
            ));
        }
        for r in base.rules() {
            let Some(ls) = &r.lookahead else {
                return Err(Error::InvalidMachine(format!(
                    "rule {} has no look-ahead annotation",
                    render_rule(r, 0)
                )));
            };
            if let Some(l) = ls.iter().find(|l| !la.states().contains(*l)) {
                return Err(Error::UnknownState(format!("look-ahead state {l}")));
            }
        }
        Ok(())
    }

    pub(crate) fn from_parts(base: Transducer, la: Transducer) -> Self {
        LookaheadTransducer { base, la }
    }

    pub fn base(&self) -> &Transducer {
        &self.base
    }

    pub fn la(&self) -> &Transducer {
        &self.la
    }

    pub fn input(&self) -> &RankedAlphabet {
        self.base.input()
    }

    pub fn output(&self) -> &RankedAlphabet {
        self.base.output()
    }

    /// Wraps a plain transducer with the trivial look-ahead: a single
    /// universal state `u` annotating every child.
    pub fn trivial(t: &Transducer) -> Result<Self> {
        let u = crate::constructions::fresh(StateId::base("u"), t.input(), &BTreeSet::new());
        let la = Transducer::identity(t.input(), u.clone());
        let rules = t.rules().iter().map(|r| {
            let k = t.input().rank(&r.symbol).unwrap_or(0);
            let mut r = r.clone();
            r.lookahead = Some(vec![u.clone(); k]);
            r
        });
        let base = Transducer::new(
            t.states().clone(),
            t.input().clone(),
            t.output().clone(),
            rules,
            t.initial().clone(),
        )?;
        Self::new(base, la)
    }
}

/// An alphabet-compatible sequence of transducers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionChain {
    stages: Vec<Transducer>,
}

impl CompositionChain {
    pub fn new(stages: Vec<Transducer>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::EmptyChain);
        }
        for (i, w) in stages.windows(2).enumerate() {
            if w[0].output() != w[1].input() {
                return Err(Error::AlphabetMismatch(format!(
                    "output alphabet of stage {} {} differs from input alphabet of stage {} {}",
                    i + 1,
                    w[0].output(),
                    i + 2,
                    w[1].input()
                )));
            }
        }
        Ok(CompositionChain { stages })
    }

    pub fn stages(&self) -> &[Transducer] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn input(&self) -> &RankedAlphabet {
        self.stages[0].input()
    }

    pub fn output(&self) -> &RankedAlphabet {
        self.stages[self.stages.len() - 1].output()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn automaton_shape() {
        let t = fixtures::example1();
        assert!(!t.is_automaton());
        let empty = Transducer::new(
            [StateId::base("q")],
            t.input().clone(),
            t.input().clone(),
            [],
            StateId::base("q"),
        )
        .unwrap();
        assert!(empty.is_automaton());
        let id = Transducer::identity(t.input(), StateId::base("u"));
        assert!(id.is_automaton());
        assert!(id.is_linear_nondeleting());
    }

    #[test]
    fn linear_nondeleting_detection() {
        let (t1, t2) = fixtures::copying();
        // q2(b(x1)) -> f(q2'(x1), q2''(x1)) copies
        assert!(!t2.is_linear_nondeleting());
        assert!(t1.is_linear_nondeleting());
        let (_, d2) = fixtures::deleting();
        // q2(b(x1,x2,x3)) -> q2(x1) deletes
        assert!(!d2.is_linear_nondeleting());
    }

    #[test]
    fn rejects_bad_machines() {
        let sigma = RankedAlphabet::from_pairs([("a", 1), ("e", 0)]);
        let q = StateId::base("q");
        let bad_var = Rule::new(q.clone(), Symbol::new("e"), Tree::state_var(q.clone(), 1));
        assert!(Transducer::from_rules(sigma.clone(), sigma.clone(), vec![bad_var], q.clone()).is_err());
        let unknown = Rule::new(q.clone(), Symbol::new("a"), Tree::state_var(StateId::base("p"), 1));
        assert!(matches!(
            Transducer::new([q.clone()], sigma.clone(), sigma.clone(), [unknown], q.clone()),
            Err(Error::UnknownState(_))
        ));
        let clash = StateId::base("a");
        assert!(Transducer::new([clash.clone()], sigma.clone(), sigma, [], clash).is_err());
    }

    #[test]
    fn chain_requires_matching_alphabets() {
        let (t1, t2) = fixtures::copying();
        assert!(CompositionChain::new(vec![t1.clone(), t2.clone()]).is_ok());
        assert!(matches!(
            CompositionChain::new(vec![t2, t1]),
            Err(Error::AlphabetMismatch(_))
        ));
        assert!(CompositionChain::new(vec![]).is_err());
    }
}
