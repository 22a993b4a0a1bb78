//! Step-by-step derivations of a transducer on one input tree.
//!
//! A sentential form is a tree whose pending leaves are `q(v)`: state `q`
//! still has to process input node `v`. A step picks one such leaf (the
//! redex) and one rule for it. The possible maximal derivations are
//! ordered depth-first, trying redexes in pre-order and rules in rule order
//! at each step; `branch` selects one of them by that index.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::state::StateId;
use crate::transducer::Transducer;
use crate::tree::{Label, NodeAddress, Tree};

/// Distinct sentential forms explored before giving up.
pub const DEFAULT_FORM_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// 1-based rule number.
    pub rule: usize,
    #[serde(serialize_with = "display")]
    pub state: StateId,
    /// Input node the rule consumed.
    #[serde(serialize_with = "display")]
    pub input_node: NodeAddress,
    /// Position of the rewritten leaf in the previous form.
    #[serde(serialize_with = "display")]
    pub position: NodeAddress,
    /// Form after the step.
    #[serde(skip)]
    pub form: Tree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationTrace {
    #[serde(serialize_with = "display")]
    pub input: Tree,
    pub branch: usize,
    /// Number of maximal derivations (saturating).
    pub branches: usize,
    #[serde(skip)]
    pub start: Tree,
    pub steps: Vec<TraceStep>,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(t: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(t)
}

impl DerivationTrace {
    pub fn final_form(&self) -> &Tree {
        self.steps.last().map_or(&self.start, |s| &s.form)
    }

    /// Whether the derivation ended in an output tree rather than a stuck form.
    pub fn is_ground(&self) -> bool {
        self.final_form().is_ground()
    }

    pub fn rule_sequence(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    /// Every form from the start to the end, rendered with `q(subtree)`
    /// for pending leaves.
    pub fn rendered_forms(&self) -> Vec<String> {
        std::iter::once(&self.start)
            .chain(self.steps.iter().map(|s| &s.form))
            .map(|f| render_form(f, &self.input))
            .collect()
    }
}

/// Replaces each pending leaf `q(v)` by `q(s/v)` for display.
pub fn render_form(form: &Tree, input: &Tree) -> String {
    expand(form, input).to_string()
}

fn expand(form: &Tree, input: &Tree) -> Tree {
    match &form.label {
        Label::StateNode(q, v) => {
            let sub = input.get(v).cloned().unwrap_or_else(|| Tree::leaf("?"));
            Tree::new(Symbol::new(q.name()), vec![sub])
        }
        _ => Tree {
            label: form.label.clone(),
            children: form.children.iter().map(|c| expand(c, input)).collect(),
        },
    }
}

struct Choice {
    rule: usize,
    state: StateId,
    input_node: NodeAddress,
    position: NodeAddress,
    next: Tree,
}

struct Tracer<'a> {
    t: &'a Transducer,
    input: &'a Tree,
    cap: usize,
    counts: HashMap<Tree, usize>,
}

impl<'a> Tracer<'a> {
    fn new(t: &'a Transducer, input: &'a Tree, cap: usize) -> Result<Self> {
        input.check_over(t.input())?;
        Ok(Tracer {
            t,
            input,
            cap,
            counts: HashMap::new(),
        })
    }

    fn trace(&mut self, branch: usize) -> Result<DerivationTrace> {
        let start = Tree::state_node(self.t.initial().clone(), NodeAddress::root());
        let branches = self.count(&start)?;
        if branch >= branches {
            return Err(Error::NoSuchBranch {
                requested: branch,
                available: branches,
            });
        }
        let mut remaining = branch;
        let mut form = start.clone();
        let mut steps = Vec::new();
        loop {
            let choices = self.choices(&form)?;
            if choices.is_empty() {
                break;
            }
            let mut picked = None;
            for c in choices {
                let n = self.count(&c.next)?;
                if remaining < n {
                    picked = Some(c);
                    break;
                }
                remaining -= n;
            }
            let c = picked.expect("branch index is within the count");
            form = c.next.clone();
            steps.push(TraceStep {
                rule: c.rule,
                state: c.state,
                input_node: c.input_node,
                position: c.position,
                form: c.next,
            });
        }
        Ok(DerivationTrace {
            input: self.input.clone(),
            branch,
            branches,
            start,
            steps,
        })
    }

    fn pending(form: &Tree, at: NodeAddress, out: &mut Vec<(NodeAddress, StateId, NodeAddress)>) {
        if let Label::StateNode(q, v) = &form.label {
            out.push((at, q.clone(), v.clone()));
            return;
        }
        for (i, c) in form.children.iter().enumerate() {
            Self::pending(c, at.child(i + 1), out);
        }
    }

    fn choices(&self, form: &Tree) -> Result<Vec<Choice>> {
        let mut redexes = Vec::new();
        Self::pending(form, NodeAddress::root(), &mut redexes);
        let mut out = Vec::new();
        for (position, q, v) in redexes {
            let node = self.input.subtree_at(&v)?;
            let Some(a) = node.symbol() else { continue };
            for &i in self.t.rule_indices(&q, a) {
                let rhs = &self.t.rules()[i].rhs;
                let replaced = rhs.map_leaves(&mut |l| match l {
                    Label::StateVar(p, j) => Some(vec![Tree::state_node(p.clone(), v.child(*j))]),
                    _ => None,
                });
                let next = form.substitute_at(&BTreeMap::from([(position.clone(), replaced[0].clone())]))?;
                out.push(Choice {
                    rule: i + 1,
                    state: q.clone(),
                    input_node: v.clone(),
                    position: position.clone(),
                    next,
                });
            }
        }
        Ok(out)
    }

    /// Number of maximal derivations from `form`, saturating.
    fn count(&mut self, form: &Tree) -> Result<usize> {
        if let Some(&n) = self.counts.get(form) {
            return Ok(n);
        }
        if self.counts.len() >= self.cap {
            return Err(Error::ResourceLimit(format!(
                "derivation space exceeds {} sentential forms",
                self.cap
            )));
        }
        let choices = self.choices(form)?;
        let mut n: usize = if choices.is_empty() { 1 } else { 0 };
        for c in &choices {
            n = n.saturating_add(self.count(&c.next)?);
        }
        self.counts.insert(form.clone(), n);
        Ok(n)
    }
}

/// The `branch`-th maximal derivation of `t` on `s`, starting from
/// `q0(s)`. A derivation ends when no pending leaf has an applicable rule:
/// either the form is an output tree or it is stuck.
pub fn trace_derivation(t: &Transducer, s: &Tree, branch: usize) -> Result<DerivationTrace> {
    trace_derivation_capped(t, s, branch, DEFAULT_FORM_CAP)
}

pub fn trace_derivation_capped(t: &Transducer, s: &Tree, branch: usize, cap: usize) -> Result<DerivationTrace> {
    Tracer::new(t, s, cap)?.trace(branch)
}

/// Every maximal derivation in branch order, up to `limit` of them.
pub fn all_derivations(t: &Transducer, s: &Tree, limit: usize) -> Result<Vec<DerivationTrace>> {
    all_derivations_capped(t, s, limit, DEFAULT_FORM_CAP)
}

/// [`all_derivations`] giving up once `cap` sentential forms are counted.
pub fn all_derivations_capped(t: &Transducer, s: &Tree, limit: usize, cap: usize) -> Result<Vec<DerivationTrace>> {
    let mut tracer = Tracer::new(t, s, cap)?;
    let first = tracer.trace(0)?;
    let n = first.branches.min(limit);
    let mut out = vec![first];
    for b in 1..n {
        out.push(tracer.trace(b)?);
    }
    Ok(out)
}
