//! State identifiers.
//!
//! Constructions build states out of other states: pairs from the product
//! construction, sets from the power-set construction, and triples for the
//! look-ahead transducer. A [`StateId`] keeps that structure around and caches
//! its canonical rendering, which is also its identity: two states are equal
//! iff their canonical names are equal.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    Base,
    Pair(StateId, StateId),
    /// Members sorted by canonical name, no duplicates.
    Set(Vec<StateId>),
    Triple(StateId, StateId, StateId),
}

#[derive(Clone)]
pub struct StateId(Arc<Inner>);

struct Inner {
    name: String,
    provenance: Provenance,
}

impl StateId {
    pub fn base(name: impl Into<String>) -> Self {
        Self::from_parts(name.into(), Provenance::Base)
    }

    pub fn pair(left: StateId, right: StateId) -> Self {
        let name = format!("({},{})", left.name(), right.name());
        Self::from_parts(name, Provenance::Pair(left, right))
    }

    pub fn set<I: IntoIterator<Item = StateId>>(members: I) -> Self {
        let members: BTreeSet<StateId> = members.into_iter().collect();
        let members: Vec<StateId> = members.into_iter().collect();
        let mut name = String::from("{");
        for (i, m) in members.iter().enumerate() {
            if i > 0 {
                name.push(',');
            }
            name.push_str(m.name());
        }
        name.push('}');
        Self::from_parts(name, Provenance::Set(members))
    }

    pub fn empty_set() -> Self {
        Self::set(std::iter::empty())
    }

    pub fn triple(first: StateId, set: StateId, last: StateId) -> Self {
        let name = format!("({},{},{})", first.name(), set.name(), last.name());
        Self::from_parts(name, Provenance::Triple(first, set, last))
    }

    fn from_parts(name: String, provenance: Provenance) -> Self {
        StateId(Arc::new(Inner { name, provenance }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn provenance(&self) -> &Provenance {
        &self.0.provenance
    }

    pub fn is_base(&self) -> bool {
        matches!(self.0.provenance, Provenance::Base)
    }

    /// Members when this state is a set state.
    pub fn members(&self) -> Option<&[StateId]> {
        match &self.0.provenance {
            Provenance::Set(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&StateId, &StateId)> {
        match &self.0.provenance {
            Provenance::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_triple(&self) -> Option<(&StateId, &StateId, &StateId)> {
        match &self.0.provenance {
            Provenance::Triple(a, b, c) => Some((a, b, c)),
            _ => None,
        }
    }

    /// Set membership for set states; `false` for every other kind.
    pub fn set_contains(&self, q: &StateId) -> bool {
        self.members().map(|m| m.binary_search(q).is_ok()).unwrap_or(false)
    }

    pub fn kind(&self) -> &'static str {
        match self.0.provenance {
            Provenance::Base => "base",
            Provenance::Pair(..) => "pair",
            Provenance::Set(..) => "set",
            Provenance::Triple(..) => "triple",
        }
    }
}

impl PartialEq for StateId {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for StateId {}

impl Hash for StateId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl PartialOrd for StateId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StateId {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.name.cmp(&other.0.name)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateId({})", self.0.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_compound_states() {
        let q = StateId::base("q1");
        let s = StateId::set([StateId::base("q2''"), StateId::base("q2'")]);
        assert_eq!(s.name(), "{q2',q2''}");
        assert_eq!(StateId::pair(q.clone(), s.clone()).name(), "(q1,{q2',q2''})");
        assert_eq!(
            StateId::triple(q, s, StateId::base("q2'")).name(),
            "(q1,{q2',q2''},q2')"
        );
        assert_eq!(StateId::empty_set().name(), "{}");
    }

    #[test]
    fn equal_sets_are_equal_states() {
        let a = StateId::set([StateId::base("b"), StateId::base("a"), StateId::base("b")]);
        let b = StateId::set([StateId::base("a"), StateId::base("b")]);
        assert_eq!(a, b);
        assert_eq!(a.members().unwrap().len(), 2);
        assert!(a.set_contains(&StateId::base("a")));
        assert!(!a.set_contains(&StateId::base("c")));
    }
}
