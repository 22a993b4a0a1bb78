//! The `.ttc` definition format and named workspaces.
//!
//! ```text
//! transducer T {
//!   input { a:1, e:0 }  output { f:2, a:1, e:0 }  initial q0
//!   rules { q0(a(x1)) -> f(q(x1), q0(x1)); q0(e) -> e; q(a(x1)) -> a(q(x1)); q(e) -> e; }
//! }
//! lookahead M { base T  la A  rules { q0(a(x1:l)) -> q(x1); q0(e) -> e; } }
//! chain tau { T1, T2 }
//! ```
//!
//! `|` separates alternative right-hand sides of one left-hand side. An
//! optional `states { ... }` block fixes the state set; without it the
//! states are the initial state plus every state mentioned by a rule.

mod parse;
pub(crate) mod write;

pub use parse::{parse_state, parse_tree};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::state::StateId;
use crate::transducer::{CompositionChain, LookaheadTransducer, Transducer};
use parse::{Parser, RawItem, RawMachine};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Transducer(Transducer),
    /// A look-ahead transducer and the name of its look-ahead automaton.
    Lookahead {
        la: String,
        machine: LookaheadTransducer,
    },
    Chain {
        stages: Vec<String>,
        chain: CompositionChain,
    },
}

/// Named machines and chains in definition order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Workspace {
    items: Vec<(String, Item)>,
    warnings: Vec<String>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut ws = Self::new();
        ws.extend(text)?;
        Ok(ws)
    }

    /// Adds the definitions of another source; later items may refer to
    /// earlier ones, including those of previously added sources.
    pub fn extend(&mut self, text: &str) -> Result<()> {
        for raw in Parser::new(text)?.items()? {
            self.add_raw(raw)?;
        }
        Ok(())
    }

    pub fn items(&self) -> &[(String, Item)] {
        &self.items
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(n, _)| n.as_str())
    }

    pub fn transducer(&self, name: &str) -> Result<&Transducer> {
        match self.get(name) {
            Some(Item::Transducer(t)) => Ok(t),
            Some(_) => Err(Error::UnknownName(format!("{name} is not a plain transducer"))),
            None => Err(Error::UnknownName(name.to_string())),
        }
    }

    pub fn lookahead(&self, name: &str) -> Result<&LookaheadTransducer> {
        match self.get(name) {
            Some(Item::Lookahead { machine, .. }) => Ok(machine),
            Some(_) => Err(Error::UnknownName(format!("{name} is not a look-ahead transducer"))),
            None => Err(Error::UnknownName(name.to_string())),
        }
    }

    /// A chain by name; a plain transducer name yields a one-stage chain.
    pub fn chain(&self, name: &str) -> Result<CompositionChain> {
        match self.get(name) {
            Some(Item::Chain { chain, .. }) => Ok(chain.clone()),
            Some(Item::Transducer(t)) => CompositionChain::new(vec![t.clone()]),
            Some(_) => Err(Error::UnknownName(format!("{name} is not a chain"))),
            None => Err(Error::UnknownName(name.to_string())),
        }
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.get(name).is_some() {
            Err(Error::InvalidMachine(format!("duplicate definition of {name}")))
        } else {
            Ok(())
        }
    }

    pub fn insert_transducer(&mut self, name: &str, t: Transducer) -> Result<()> {
        self.check_fresh(name)?;
        self.items.push((name.to_string(), Item::Transducer(t)));
        Ok(())
    }

    /// Adds a look-ahead transducer; its automaton is added as `NAME_la`.
    pub fn insert_lookahead(&mut self, name: &str, m: LookaheadTransducer) -> Result<()> {
        let la = format!("{name}_la");
        self.check_fresh(name)?;
        self.insert_transducer(&la, m.la().clone())?;
        self.items.push((name.to_string(), Item::Lookahead { la, machine: m }));
        Ok(())
    }

    /// Adds a chain over previously defined transducers.
    pub fn insert_chain(&mut self, name: &str, stages: Vec<String>) -> Result<()> {
        self.check_fresh(name)?;
        let machines = stages
            .iter()
            .map(|s| self.transducer(s).cloned())
            .collect::<Result<Vec<_>>>()?;
        let chain = CompositionChain::new(machines)?;
        self.items.push((name.to_string(), Item::Chain { stages, chain }));
        Ok(())
    }

    /// Canonical text; parsing it yields an equal workspace.
    pub fn to_text(&self) -> String {
        write::workspace(self)
    }

    fn add_raw(&mut self, raw: RawItem) -> Result<()> {
        match raw {
            RawItem::Transducer(m) => {
                let located = |message: String| Error::Validation {
                    machine: m.name.clone(),
                    line: m.line,
                    column: m.column,
                    message,
                };
                self.check_fresh(&m.name).map_err(|e| located(e.to_string()))?;
                let t = build_machine(&m, None)?;
                self.warnings
                    .extend(t.input().warnings().into_iter().map(|w| format!("{}: {w}", m.name)));
                self.items.push((m.name.clone(), Item::Transducer(t)));
            }
            RawItem::Lookahead(mut m) => {
                let located = |message: String, line: usize, column: usize| Error::Validation {
                    machine: m.name.clone(),
                    line,
                    column,
                    message,
                };
                self.check_fresh(&m.name)
                    .map_err(|e| located(e.to_string(), m.line, m.column))?;
                if let Some((b, line, column)) = m.base.clone() {
                    let base = self.transducer(&b).map_err(|e| located(e.to_string(), line, column))?;
                    m.input.get_or_insert_with(|| base.input().clone());
                    m.output.get_or_insert_with(|| base.output().clone());
                    m.initial.get_or_insert_with(|| base.initial().clone());
                }
                let Some((la_name, line, column)) = m.la.clone() else {
                    return Err(located("missing la section".into(), m.line, m.column));
                };
                let la = self
                    .transducer(&la_name)
                    .map_err(|e| located(e.to_string(), line, column))?
                    .clone();
                let base = build_machine(&m, Some(&la))?;
                let machine =
                    LookaheadTransducer::new(base, la).map_err(|e| located(e.to_string(), m.line, m.column))?;
                self.items
                    .push((m.name.clone(), Item::Lookahead { la: la_name, machine }));
            }
            RawItem::Chain {
                name,
                line,
                column,
                stages,
            } => {
                let names = stages.iter().map(|(n, ..)| n.clone()).collect();
                for (s, l, c) in &stages {
                    self.transducer(s).map_err(|e| Error::Validation {
                        machine: name.clone(),
                        line: *l,
                        column: *c,
                        message: e.to_string(),
                    })?;
                }
                self.insert_chain(&name, names).map_err(|e| Error::Validation {
                    machine: name.clone(),
                    line,
                    column,
                    message: e.to_string(),
                })?;
            }
        }
        Ok(())
    }
}

/// Validates rule by rule so that errors point at the offending rule, then
/// builds the whole machine.
fn build_machine(m: &RawMachine, la: Option<&Transducer>) -> Result<Transducer> {
    let at = |line: usize, column: usize, message: String| Error::Validation {
        machine: m.name.clone(),
        line,
        column,
        message,
    };
    let here = |message: &str| at(m.line, m.column, message.to_string());
    let input = m.input.clone().ok_or_else(|| here("missing input alphabet"))?;
    let output = m.output.clone().ok_or_else(|| here("missing output alphabet"))?;
    let initial = m.initial.clone().ok_or_else(|| here("missing initial state"))?;
    let states: BTreeSet<StateId> = match &m.states {
        Some(s) => s.iter().cloned().collect(),
        None => {
            let mut s = BTreeSet::from([initial.clone()]);
            for r in &m.rules {
                s.insert(r.rule.state.clone());
                s.extend(r.rule.calls().into_iter().map(|(q, _)| q));
            }
            s
        }
    };
    for r in &m.rules {
        let rank = input.rank(&r.rule.symbol).ok_or_else(|| {
            at(
                r.line,
                r.column,
                format!("input symbol {} is not in the input alphabet", r.rule.symbol),
            )
        })?;
        if rank != r.arity {
            return Err(at(
                r.line,
                r.column,
                format!(
                    "input symbol {} has rank {rank} but the rule binds {} variables",
                    r.rule.symbol, r.arity
                ),
            ));
        }
        if let (Some(la), Some(ls)) = (la, &r.rule.lookahead) {
            if let Some(l) = ls.iter().find(|l| !la.states().contains(*l)) {
                return Err(at(r.line, r.column, format!("unknown look-ahead state {l}")));
            }
        }
        let describe = |e: Error| match e {
            Error::UnknownState(q) => format!("undeclared state {q}"),
            other => other.to_string(),
        };
        if !states.contains(&r.rule.state) {
            return Err(at(r.line, r.column, format!("undeclared state {}", r.rule.state)));
        }
        Transducer::new(
            states.clone(),
            input.clone(),
            output.clone(),
            [r.rule.clone()],
            r.rule.state.clone(),
        )
        .map_err(|e| at(r.line, r.column, describe(e)))?;
    }
    Transducer::new(states, input, output, m.rules.iter().map(|r| r.rule.clone()), initial)
        .map_err(|e| at(m.line, m.column, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "
        transducer T {
          input { a:1, e:0 } output { f:2, a:1, e:0 } initial q0
          rules {
            q0(a(x1)) -> f(q(x1), q0(x1));  // copies x1
            q0(e) -> e;
            q(a(x1)) -> a(q(x1));
            q(e) -> e;
          }
        }";

    #[test]
    fn parses_a_transducer() {
        let ws = Workspace::parse(EXAMPLE).unwrap();
        let t = ws.transducer("T").unwrap();
        assert_eq!(t.states().len(), 2);
        assert_eq!(t.rules().len(), 4);
        assert_eq!(t.rules()[0].to_string(), "q0(a(x1)) -> f(q(x1),q0(x1))");
    }

    #[test]
    fn alternatives_expand_to_rules() {
        let ws =
            Workspace::parse("transducer T { input {e:0} output {e1:0,e2:0} initial q rules { q(e) -> e1 | e2; } }")
                .unwrap();
        assert_eq!(ws.transducer("T").unwrap().rules().len(), 2);
    }

    fn validation_message(text: &str) -> (usize, String) {
        match Workspace::parse(text) {
            Err(Error::Validation { line, message, .. }) => (line, message),
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_state_is_reported_at_its_rule() {
        let (line, msg) = validation_message(
            "transducer T { input {a:1,e:0} output {e:0} initial q states {q}\n rules {\n q(e) -> e;\n q(a(x1)) -> p(x1); } }",
        );
        assert_eq!(line, 4);
        assert!(msg.contains("undeclared state p"), "{msg}");
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let (_, msg) = validation_message(
            "transducer T { input {a:1,e:0} output {f:2,e:0} initial q rules { q(a(x1)) -> f(q(x1)); q(e) -> e; } }",
        );
        assert!(msg.contains("rank 2"), "{msg}");
        let (_, msg) =
            validation_message("transducer T { input {a:1,e:0} output {e:0} initial q rules { q(a(x1,x2)) -> e; } }");
        assert!(msg.contains("binds 2"), "{msg}");
    }

    #[test]
    fn state_symbol_clash_is_rejected() {
        let (_, msg) = validation_message("transducer T { input {e:0} output {e:0} initial e rules { e(e) -> e; } }");
        assert!(msg.contains("clashes"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match Workspace::parse("transducer T {\n  input { a:1 \n}") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chains_and_lookahead_resolve_names() {
        let text = format!(
            "{EXAMPLE}
            transducer U {{ input {{ f:2, a:1, e:0 }} output {{ e:0 }} initial p
              rules {{ p(e) -> e; p(a(x1)) -> p(x1); p(f(x1,x2)) -> p(x2); }} }}
            chain tau {{ T, U }}
            transducer A {{ input {{ a:1, e:0 }} output {{ a:1, e:0 }} initial l
              rules {{ l(a(x1)) -> a(l(x1)); l(e) -> e; }} }}
            lookahead M {{ base T la A rules {{ q0(a(x1:l)) -> q(x1); q0(e) -> e; q(e) -> e; }} }}"
        );
        let ws = Workspace::parse(&text).unwrap();
        assert_eq!(ws.chain("tau").unwrap().len(), 2);
        assert_eq!(ws.chain("T").unwrap().len(), 1);
        let m = ws.lookahead("M").unwrap();
        assert_eq!(m.base().initial().name(), "q0");
        assert!(matches!(ws.transducer("nope"), Err(Error::UnknownName(_))));
        let again = Workspace::parse(&ws.to_text()).unwrap();
        assert_eq!(again, ws);
        assert_eq!(again.to_text(), ws.to_text());
    }

    #[test]
    fn chain_rejects_incompatible_alphabets() {
        let text = format!("{EXAMPLE} chain bad {{ T, T }}");
        assert!(matches!(Workspace::parse(&text), Err(Error::Validation { .. })));
    }
}
