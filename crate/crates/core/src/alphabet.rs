use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::state::StateId;

/// A node label of an input or output tree.
///
/// Annotated symbols `<a,l1,...,lk>` are produced by look-ahead relabeling;
/// they stay structured rather than being mangled into strings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Plain(Arc<str>),
    Annotated(Arc<Annotation>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Annotation {
    pub base: Symbol,
    /// One look-ahead state per child. Empty for a symbol of positive rank
    /// means "no look-ahead information".
    pub lookahead: Vec<StateId>,
}

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol::Plain(Arc::from(name))
    }

    pub fn annotated(base: Symbol, lookahead: Vec<StateId>) -> Self {
        Symbol::Annotated(Arc::new(Annotation { base, lookahead }))
    }

    pub fn plain_name(&self) -> Option<&str> {
        match self {
            Symbol::Plain(n) => Some(n),
            Symbol::Annotated(_) => None,
        }
    }

    pub fn annotation(&self) -> Option<&Annotation> {
        match self {
            Symbol::Annotated(a) => Some(a),
            Symbol::Plain(_) => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Plain(n) => f.write_str(n),
            Symbol::Annotated(a) => {
                write!(f, "<{}", a.base)?;
                for l in &a.lookahead {
                    write!(f, ",{l}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Finite map from symbols to ranks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RankedAlphabet {
    ranks: BTreeMap<Symbol, usize>,
}

impl RankedAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an alphabet from `(name, rank)` pairs. Panics on a rank
    /// conflict, so only use it with literal data.
    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, usize)>>(pairs: I) -> Self {
        let mut a = Self::new();
        for (n, r) in pairs {
            a.insert(Symbol::new(n), r).expect("rank conflict in literal alphabet");
        }
        a
    }

    pub fn insert(&mut self, symbol: Symbol, rank: usize) -> Result<()> {
        match self.ranks.get(&symbol) {
            Some(&r) if r != rank => Err(Error::RankConflict {
                symbol: symbol.to_string(),
                first: r,
                second: rank,
            }),
            _ => {
                self.ranks.insert(symbol, rank);
                Ok(())
            }
        }
    }

    pub fn rank(&self, symbol: &Symbol) -> Option<usize> {
        self.ranks.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.ranks.contains_key(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.ranks.iter().map(|(s, &r)| (s, r))
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn has_leaf_symbol(&self) -> bool {
        self.ranks.values().any(|&r| r == 0)
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.values().copied().max().unwrap_or(0)
    }

    /// Non-fatal problems: an alphabet without rank-0 symbols has no trees.
    pub fn warnings(&self) -> Vec<String> {
        if !self.is_empty() && !self.has_leaf_symbol() {
            vec!["alphabet has no symbol of rank 0, so no ground tree exists".to_string()]
        } else {
            Vec::new()
        }
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{ ")?;
        for (i, (s, r)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}:{r}")?;
        }
        f.write_str(" }")
    }
}
