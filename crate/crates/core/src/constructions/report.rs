use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

use crate::state::{Provenance, StateId};
use crate::transducer::{LookaheadTransducer, Transducer};

/// How a constructed state was built from component states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateOrigin {
    pub kind: &'static str,
    pub parts: Vec<String>,
}

impl StateOrigin {
    pub fn of(q: &StateId) -> Self {
        let parts = match q.provenance() {
            Provenance::Base => Vec::new(),
            Provenance::Pair(a, b) => vec![a.to_string(), b.to_string()],
            Provenance::Set(m) => m.iter().map(|s| s.to_string()).collect(),
            Provenance::Triple(a, s, b) => vec![a.to_string(), s.to_string(), b.to_string()],
        };
        StateOrigin { kind: q.kind(), parts }
    }
}

/// Size statistics and state provenance of one construction step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub construction: String,
    pub states_before: usize,
    pub states_after: usize,
    pub rules_before: usize,
    pub rules_after: usize,
    pub provenance: BTreeMap<String, StateOrigin>,
    pub elapsed_micros: u64,
}

fn origins<'a>(states: impl IntoIterator<Item = &'a StateId>) -> BTreeMap<String, StateOrigin> {
    states
        .into_iter()
        .map(|q| (q.to_string(), StateOrigin::of(q)))
        .collect()
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}

impl BuildReport {
    pub fn for_transducer(name: &str, before: &Transducer, after: &Transducer, elapsed: Duration) -> Self {
        BuildReport {
            construction: name.to_string(),
            states_before: before.states().len(),
            states_after: after.states().len(),
            rules_before: before.rules().len(),
            rules_after: after.rules().len(),
            provenance: origins(after.states()),
            elapsed_micros: micros(elapsed),
        }
    }

    /// Counts cover the transducer and its look-ahead automaton together.
    pub fn for_lookahead(
        name: &str,
        before: &LookaheadTransducer,
        after: &LookaheadTransducer,
        elapsed: Duration,
    ) -> Self {
        let size = |m: &LookaheadTransducer| {
            (
                m.base().states().len() + m.la().states().len(),
                m.base().rules().len() + m.la().rules().len(),
            )
        };
        let (sb, rb) = size(before);
        let (sa, ra) = size(after);
        BuildReport {
            construction: name.to_string(),
            states_before: sb,
            states_after: sa,
            rules_before: rb,
            rules_after: ra,
            provenance: origins(after.base().states().iter().chain(after.la().states())),
            elapsed_micros: micros(elapsed),
        }
    }
}
