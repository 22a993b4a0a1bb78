//! Ranked trees, partial trees, Dewey addresses and substitutions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::error::{Error, Result};
use crate::state::StateId;

/// Dewey address of a node; the empty path is the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeAddress(Vec<u32>);

impl NodeAddress {
    pub fn root() -> Self {
        NodeAddress(Vec::new())
    }

    /// Builds an address from 1-based child indices.
    pub fn from_path(path: Vec<u32>) -> Self {
        debug_assert!(path.iter().all(|&i| i >= 1));
        NodeAddress(path)
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i as u32);
        NodeAddress(p)
    }

    pub fn is_prefix_of(&self, other: &NodeAddress) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() || s == "ε" {
            return Ok(Self::root());
        }
        let path = s
            .split('.')
            .map(|p| match p.parse::<u32>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(Error::InvalidAddress {
                    address: s.to_string(),
                    tree: String::new(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NodeAddress(path))
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeAddress({self})")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Symbol(Symbol),
    /// `q(x_i)` in a right-hand side; the index is 1-based.
    StateVar(StateId, usize),
    /// `q(v)`: state `q` still has to process input node `v`.
    StateNode(StateId, NodeAddress),
    /// Leaf from an auxiliary set of the partial-tree semantics.
    Placeholder(Arc<str>),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Symbol(s) => write!(f, "{s}"),
            Label::StateVar(q, i) => write!(f, "{q}(x{i})"),
            Label::StateNode(q, v) => write!(f, "{q}({v})"),
            Label::Placeholder(b) => f.write_str(b),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    pub label: Label,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn new(symbol: Symbol, children: Vec<Tree>) -> Self {
        Tree {
            label: Label::Symbol(symbol),
            children,
        }
    }

    /// Plain-symbol node; shorthand used heavily by tests and fixtures.
    pub fn node(name: &str, children: Vec<Tree>) -> Self {
        Self::new(Symbol::new(name), children)
    }

    pub fn leaf(name: &str) -> Self {
        Self::node(name, Vec::new())
    }

    pub fn state_var(q: StateId, i: usize) -> Self {
        Tree {
            label: Label::StateVar(q, i),
            children: Vec::new(),
        }
    }

    pub fn state_node(q: StateId, v: NodeAddress) -> Self {
        Tree {
            label: Label::StateNode(q, v),
            children: Vec::new(),
        }
    }

    pub fn placeholder(id: &str) -> Self {
        Tree {
            label: Label::Placeholder(Arc::from(id)),
            children: Vec::new(),
        }
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match &self.label {
            Label::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }

    /// True iff the tree contains no state marker and no placeholder.
    pub fn is_ground(&self) -> bool {
        matches!(self.label, Label::Symbol(_)) && self.children.iter().all(Tree::is_ground)
    }

    /// The set `V(t)` of all node addresses.
    pub fn nodes(&self) -> BTreeSet<NodeAddress> {
        let mut out = BTreeSet::new();
        self.collect_nodes(&NodeAddress::root(), &mut out);
        out
    }

    fn collect_nodes(&self, at: &NodeAddress, out: &mut BTreeSet<NodeAddress>) {
        out.insert(at.clone());
        for (i, c) in self.children.iter().enumerate() {
            c.collect_nodes(&at.child(i + 1), out);
        }
    }

    pub fn get(&self, v: &NodeAddress) -> Option<&Tree> {
        let mut cur = self;
        for &step in v.path() {
            cur = cur.children.get((step as usize).checked_sub(1)?)?;
        }
        Some(cur)
    }

    /// `t/v`, the subtree rooted at `v`.
    pub fn subtree_at(&self, v: &NodeAddress) -> Result<&Tree> {
        self.get(v).ok_or_else(|| Error::InvalidAddress {
            address: v.to_string(),
            tree: self.to_string(),
        })
    }

    /// Replaces the subtree at every bound address. Addresses must be
    /// pairwise non-prefix and belong to the tree.
    pub fn substitute_at(&self, bindings: &BTreeMap<NodeAddress, Tree>) -> Result<Tree> {
        let addrs: Vec<&NodeAddress> = bindings.keys().collect();
        for v in &addrs {
            self.subtree_at(v)?;
        }
        // BTreeMap order is pre-order, so a prefix always directly precedes
        // some address it covers.
        for w in addrs.windows(2) {
            if w[0].is_prefix_of(w[1]) {
                return Err(Error::PrefixConflict {
                    first: w[0].to_string(),
                    second: w[1].to_string(),
                });
            }
        }
        Ok(self.replace_rec(&NodeAddress::root(), bindings))
    }

    fn replace_rec(&self, at: &NodeAddress, bindings: &BTreeMap<NodeAddress, Tree>) -> Tree {
        if let Some(t) = bindings.get(at) {
            return t.clone();
        }
        if !bindings.keys().any(|k| at.is_prefix_of(k)) {
            return self.clone();
        }
        Tree {
            label: self.label.clone(),
            children: self
                .children
                .iter()
                .enumerate()
                .map(|(i, c)| c.replace_rec(&at.child(i + 1), bindings))
                .collect(),
        }
    }

    /// `t[a <- T]`: every leaf labeled `leaf` is independently replaced by
    /// some member of `replacements`.
    pub fn substitute_leaves(&self, leaf: &Label, replacements: &[Tree]) -> BTreeSet<Tree> {
        let replacements: Vec<Tree> = replacements.to_vec();
        self.map_leaves(&mut |l| {
            if l == leaf {
                Some(replacements.clone())
            } else {
                None
            }
        })
        .into_iter()
        .collect()
    }

    /// Replaces every leaf for which `f` returns `Some(options)` by each of
    /// the options, taking all combinations. Leaves with an empty option list
    /// make the whole result empty.
    pub fn map_leaves<F>(&self, f: &mut F) -> Vec<Tree>
    where
        F: FnMut(&Label) -> Option<Vec<Tree>>,
    {
        if self.children.is_empty() {
            return f(&self.label).unwrap_or_else(|| vec![self.clone()]);
        }
        let mut combos: Vec<Vec<Tree>> = vec![Vec::new()];
        for c in &self.children {
            let options = c.map_leaves(f);
            if options.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(combos.len() * options.len());
            for prefix in &combos {
                for o in &options {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    next.push(p);
                }
            }
            combos = next;
        }
        combos
            .into_iter()
            .map(|children| Tree {
                label: self.label.clone(),
                children,
            })
            .collect()
    }

    /// Checks that every node is a symbol of `alphabet` with matching arity.
    pub fn check_over(&self, alphabet: &RankedAlphabet) -> Result<()> {
        match &self.label {
            Label::Symbol(s) => match alphabet.rank(s) {
                Some(r) if r == self.children.len() => {}
                Some(r) => {
                    return Err(Error::AlphabetMismatch(format!(
                        "symbol {s} has rank {r} but occurs with {} children",
                        self.children.len()
                    )))
                }
                None => {
                    return Err(Error::AlphabetMismatch(format!(
                        "symbol {s} is not in the alphabet {alphabet}"
                    )))
                }
            },
            other => return Err(Error::AlphabetMismatch(format!("{other} is not a ground symbol"))),
        }
        self.children.iter().try_for_each(|c| c.check_over(alphabet))
    }

    /// Size first, then root label text, then children left to right.
    pub fn canonical_cmp(&self, other: &Tree) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.structural_cmp(other))
    }

    fn structural_cmp(&self, other: &Tree) -> Ordering {
        self.label
            .to_string()
            .cmp(&other.label.to_string())
            .then_with(|| self.children.len().cmp(&other.children.len()))
            .then_with(|| {
                self.children
                    .iter()
                    .zip(&other.children)
                    .map(|(a, b)| a.canonical_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }

    pub fn parse(text: &str) -> Result<Tree> {
        crate::text::parse_tree(text)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tree::parse(s)
    }
}

/// Sorts trees by size, then by canonical rendering.
pub fn sort_canonical(trees: &mut [Tree]) {
    trees.sort_by(Tree::canonical_cmp);
}

pub fn canonical_vec<I: IntoIterator<Item = Tree>>(trees: I) -> Vec<Tree> {
    let mut v: Vec<Tree> = trees.into_iter().collect();
    sort_canonical(&mut v);
    v
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if total < parts {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every ground tree over `alphabet` with at most `max_size` nodes, in
/// canonical order.
pub fn enumerate_trees(alphabet: &RankedAlphabet, max_size: usize) -> Vec<Tree> {
    let mut by_size: HashMap<usize, Vec<Tree>> = HashMap::new();
    let mut out = Vec::new();
    for n in 1..=max_size {
        let mut level = Vec::new();
        for (sym, rank) in alphabet.iter() {
            for split in compositions(n - 1, rank) {
                let mut combos: Vec<Vec<Tree>> = vec![Vec::new()];
                for part in &split {
                    let options = &by_size[part];
                    let mut next = Vec::new();
                    for prefix in &combos {
                        for o in options {
                            let mut p = prefix.clone();
                            p.push(o.clone());
                            next.push(p);
                        }
                    }
                    combos = next;
                }
                level.extend(combos.into_iter().map(|c| Tree::new(sym.clone(), c)));
            }
        }
        sort_canonical(&mut level);
        out.extend(level.iter().cloned());
        by_size.insert(n, level);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn addr(s: &str) -> NodeAddress {
        NodeAddress::parse(s).unwrap()
    }

    fn rendered(set: BTreeSet<NodeAddress>) -> Vec<String> {
        set.into_iter().map(|v| v.to_string()).collect()
    }

    #[test]
    fn nodes_of_small_trees() {
        assert_eq!(rendered(t("f(a,f(a,b))").nodes()), ["ε", "1", "2", "2.1", "2.2"]);
        assert_eq!(rendered(t("e").nodes()), ["ε"]);
        assert_eq!(rendered(t("a(a(e))").nodes()), ["ε", "1", "1.1"]);
    }

    #[test]
    fn subtree_lookup() {
        let x = t("f(a,f(a,b))");
        assert_eq!(x.subtree_at(&addr("2.1")).unwrap(), &t("a"));
        assert_eq!(x.subtree_at(&NodeAddress::root()).unwrap(), &x);
        assert_eq!(t("f(a(e),f(e,e))").subtree_at(&addr("1")).unwrap(), &t("a(e)"));
        assert!(matches!(x.subtree_at(&addr("3")), Err(Error::InvalidAddress { .. })));
        assert!(x.subtree_at(&addr("1.1")).is_err());
    }

    #[test]
    fn substitute_at_positions() {
        let mut b = BTreeMap::new();
        b.insert(addr("1"), t("c"));
        assert_eq!(t("f(a,b)").substitute_at(&b).unwrap(), t("f(c,b)"));
        assert_eq!(t("f(a,b)").substitute_at(&BTreeMap::new()).unwrap(), t("f(a,b)"));

        let mut b = BTreeMap::new();
        b.insert(addr("2.1"), t("b"));
        b.insert(addr("2.2"), t("a"));
        assert_eq!(t("f(a,f(a,b))").substitute_at(&b).unwrap(), t("f(a,f(b,a))"));
    }

    #[test]
    fn substitute_at_errors() {
        let mut b = BTreeMap::new();
        b.insert(addr("2"), t("b"));
        b.insert(addr("2.1"), t("a"));
        assert!(matches!(
            t("f(a,f(a,b))").substitute_at(&b),
            Err(Error::PrefixConflict { .. })
        ));
        let mut b = BTreeMap::new();
        b.insert(addr("5"), t("b"));
        assert!(matches!(
            t("f(a,b)").substitute_at(&b),
            Err(Error::InvalidAddress { .. })
        ));
    }

    #[test]
    fn substitute_leaves_combinations() {
        let a = Label::Symbol(Symbol::new("a"));
        let got = t("f(a,a)").substitute_leaves(&a, &[t("b"), t("c")]);
        let want: BTreeSet<Tree> = ["f(b,b)", "f(b,c)", "f(c,b)", "f(c,c)"].into_iter().map(t).collect();
        assert_eq!(got, want);

        let got = t("f(b,b)").substitute_leaves(&a, &[t("c")]);
        assert_eq!(got, [t("f(b,b)")].into_iter().collect());

        assert!(t("f(a,b)").substitute_leaves(&a, &[]).is_empty());
        // no matching leaf: the empty replacement set still yields t
        assert_eq!(t("f(b,b)").substitute_leaves(&a, &[]).len(), 1);
    }

    #[test]
    fn enumerates_all_small_trees() {
        let sigma = RankedAlphabet::from_pairs([("a", 1), ("e", 0)]);
        let all: Vec<String> = enumerate_trees(&sigma, 3).iter().map(|t| t.to_string()).collect();
        assert_eq!(all, ["e", "a(e)", "a(a(e))"]);

        let sigma = RankedAlphabet::from_pairs([("f", 2), ("e", 0), ("d", 0)]);
        // sizes 1,3,5: 2, 4, 2*(2*4)=16
        assert_eq!(enumerate_trees(&sigma, 5).len(), 2 + 4 + 16);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(1, 2).is_empty());
    }

    #[test]
    fn address_rendering() {
        assert_eq!(addr("2.1").to_string(), "2.1");
        assert_eq!(NodeAddress::root().to_string(), "ε");
        assert!(NodeAddress::parse("0").is_err());
    }
}
