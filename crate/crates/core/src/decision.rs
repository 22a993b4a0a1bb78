//! Composition semantics and bounded functionality checking.
//!
//! Verdicts are relative to a bound on input size: "functional up to bound
//! k" says nothing about larger inputs.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::alphabet::RankedAlphabet;
use crate::constructions::{build_m_report_with, reduce_chain_report, BuildReport, RhsChoice};
use crate::error::Result;
use crate::transducer::{enumerate_domain, translate, translate_la, CompositionChain, LookaheadTransducer, Transducer};
use crate::tree::{canonical_vec, Tree};

/// `R(T1) ∘ ... ∘ R(Tn)` applied to `s`.
pub fn chain_outputs(chain: &CompositionChain, s: &Tree) -> Result<BTreeSet<Tree>> {
    let mut current: BTreeSet<Tree> = BTreeSet::from([s.clone()]);
    for t in chain.stages() {
        let mut next = BTreeSet::new();
        for u in &current {
            next.extend(translate(t, u)?);
        }
        if next.is_empty() {
            return Ok(next);
        }
        current = next;
    }
    Ok(current)
}

/// A finite-output tree relation that can be checked for functionality.
pub trait Relation {
    fn input_alphabet(&self) -> &RankedAlphabet;

    /// A superset of the domain restricted to trees of at most `max_size`
    /// nodes, in canonical order.
    fn candidates(&self, max_size: usize) -> Vec<Tree>;

    fn outputs(&self, s: &Tree) -> Result<BTreeSet<Tree>>;
}

impl Relation for Transducer {
    fn input_alphabet(&self) -> &RankedAlphabet {
        self.input()
    }

    fn candidates(&self, max_size: usize) -> Vec<Tree> {
        enumerate_domain(self, self.initial(), max_size)
    }

    fn outputs(&self, s: &Tree) -> Result<BTreeSet<Tree>> {
        translate(self, s)
    }
}

impl Relation for LookaheadTransducer {
    fn input_alphabet(&self) -> &RankedAlphabet {
        self.input()
    }

    fn candidates(&self, max_size: usize) -> Vec<Tree> {
        enumerate_domain(self.base(), self.base().initial(), max_size)
    }

    fn outputs(&self, s: &Tree) -> Result<BTreeSet<Tree>> {
        translate_la(self, s)
    }
}

impl Relation for CompositionChain {
    fn input_alphabet(&self) -> &RankedAlphabet {
        self.input()
    }

    fn candidates(&self, max_size: usize) -> Vec<Tree> {
        self.stages()[0].candidates(max_size)
    }

    fn outputs(&self, s: &Tree) -> Result<BTreeSet<Tree>> {
        chain_outputs(self, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "functional-up-to-bound")]
    FunctionalUpToBound,
    #[serde(rename = "not-functional")]
    NotFunctional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    #[serde(serialize_with = "tree_string")]
    pub input: Tree,
    /// Two distinct outputs for `input`, the canonically smallest ones.
    #[serde(serialize_with = "tree_strings")]
    pub outputs: [Tree; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub inputs_checked: usize,
    pub outputs_computed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub bound: usize,
    pub counterexample: Option<Counterexample>,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_functional(&self) -> bool {
        self.status == Status::FunctionalUpToBound
    }
}

fn tree_string<S: serde::Serializer>(t: &Tree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(t)
}

fn tree_strings<S: serde::Serializer>(ts: &[Tree; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ts.iter().map(|t| t.to_string()))
}

/// Checks every candidate input of at most `max_size` nodes in canonical
/// order and reports the first one with two distinct outputs.
pub fn check_functional_bounded<R: Relation + ?Sized>(target: &R, max_size: usize) -> Result<Verdict> {
    let mut stats = Stats::default();
    for s in target.candidates(max_size) {
        let out = target.outputs(&s)?;
        stats.inputs_checked += 1;
        stats.outputs_computed += out.len();
        if out.len() > 1 {
            let mut it = canonical_vec(out).into_iter();
            let first = it.next().expect("two outputs");
            let second = it.next().expect("two outputs");
            return Ok(Verdict {
                status: Status::NotFunctional,
                bound: max_size,
                counterexample: Some(Counterexample {
                    input: s,
                    outputs: [first, second],
                }),
                stats,
            });
        }
    }
    Ok(Verdict {
        status: Status::FunctionalUpToBound,
        bound: max_size,
        counterexample: None,
        stats,
    })
}

/// Reduces the chain to at most two stages, builds the look-ahead
/// transducer `M` for them (or wraps a single stage with trivial
/// look-ahead), and checks `M` up to the bound.
pub fn decide_functionality(chain: &CompositionChain, max_size: usize) -> Result<(Verdict, Vec<BuildReport>)> {
    let mut chain = chain.clone();
    let mut reports = Vec::new();
    while chain.len() > 2 {
        let (shorter, r) = reduce_chain_report(&chain)?;
        reports.extend(r);
        chain = shorter;
    }
    let m = match chain.stages() {
        [t] => LookaheadTransducer::trivial(t)?,
        [t1, t2] => {
            let (m, report) = build_m_report_with(t1, t2, RhsChoice::OnePerState)?;
            reports.push(report);
            m
        }
        _ => unreachable!("chains are non-empty"),
    };
    Ok((check_functional_bounded(&m, max_size)?, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::p_construction;
    use crate::fixtures;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn strings(set: &BTreeSet<Tree>) -> Vec<String> {
        canonical_vec(set.iter().cloned())
            .iter()
            .map(|t| t.to_string())
            .collect()
    }

    #[test]
    fn chain_semantics_on_fixtures() {
        let (c1, c2) = fixtures::copying();
        let chain = CompositionChain::new(vec![c1, c2]).unwrap();
        assert_eq!(strings(&chain_outputs(&chain, &t("a(e)")).unwrap()), ["f(e,e)"]);
        let (d1, d2) = fixtures::deleting();
        let chain = CompositionChain::new(vec![d1, d2]).unwrap();
        assert!(chain_outputs(&chain, &t("a(e,e)")).unwrap().is_empty());
        let (f1, f2) = fixtures::example4();
        let chain = CompositionChain::new(vec![f1, f2]).unwrap();
        assert_eq!(strings(&chain_outputs(&chain, &t("f(e,d)")).unwrap()), ["d"]);
    }

    #[test]
    fn product_is_not_functional_but_composition_is() {
        let (c1, c2) = fixtures::copying();
        let n = p_construction(&c1, &c2).unwrap();
        let v = check_functional_bounded(&n, 2).unwrap();
        assert_eq!(v.status, Status::NotFunctional);
        let ce = v.counterexample.unwrap();
        assert_eq!(ce.input.to_string(), "a(e)");
        assert_eq!(ce.outputs.map(|o| o.to_string()), ["f(e,e)", "f(e,e')"]);
        let chain = CompositionChain::new(vec![c1, c2]).unwrap();
        assert!(check_functional_bounded(&chain, 4).unwrap().is_functional());
    }

    #[test]
    fn verdict_json_shape() {
        let (c1, c2) = fixtures::copying();
        let n = p_construction(&c1, &c2).unwrap();
        let v = check_functional_bounded(&n, 2).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["status"], "not-functional");
        assert_eq!(json["bound"], 2);
        assert_eq!(json["counterexample"]["input"], "a(e)");
        assert_eq!(json["counterexample"]["outputs"][1], "f(e,e')");
        assert!(json["stats"]["inputs_checked"].as_u64().unwrap() >= 1);
    }

    #[test]
    fn decision_on_fixture_pairs() {
        for (t1, t2) in [fixtures::copying(), fixtures::deleting(), fixtures::example4()] {
            let chain = CompositionChain::new(vec![t1, t2]).unwrap();
            let (v, reports) = decide_functionality(&chain, 4).unwrap();
            assert!(v.is_functional());
            assert_eq!(reports.len(), 1);
        }
    }
}
