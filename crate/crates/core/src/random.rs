//! Seeded generation of small random transducers, pairs and chains.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{RankedAlphabet, Symbol};
use crate::state::StateId;
use crate::transducer::{CompositionChain, Rule, Transducer};
use crate::tree::Tree;

/// Size limits for generated machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_rules: usize,
    pub max_symbols: usize,
    pub max_rank: usize,
    /// Maximum depth of a right-hand side; a lone leaf has depth 0.
    pub max_rhs_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 3,
            max_rules: 6,
            max_symbols: 3,
            max_rank: 2,
            max_rhs_depth: 2,
        }
    }
}

/// Symbol names per alphabet position in a chain, so adjacent alphabets
/// are easy to tell apart.
const NAMES: [[&str; 3]; 4] = [["a", "b", "c"], ["f", "g", "h"], ["m", "n", "o"], ["u", "v", "w"]];

/// An alphabet with at least one leaf symbol.
pub fn random_alphabet(rng: &mut impl Rng, names: &[&str], limits: &Limits) -> RankedAlphabet {
    let n = rng.gen_range(1..=limits.max_symbols.min(names.len()));
    let mut a = RankedAlphabet::new();
    for (i, name) in names.iter().take(n).enumerate() {
        let rank = if i == 0 { 0 } else { rng.gen_range(0..=limits.max_rank) };
        a.insert(Symbol::new(name), rank).expect("fresh names");
    }
    a
}

fn random_rhs(rng: &mut impl Rng, output: &RankedAlphabet, states: &[StateId], k: usize, depth: usize) -> Tree {
    if k > 0 && (depth == 0 || rng.gen_bool(0.4)) {
        let q = states.choose(rng).expect("states are non-empty").clone();
        return Tree::state_var(q, rng.gen_range(1..=k));
    }
    let symbols: Vec<(&Symbol, usize)> = output.iter().filter(|&(_, r)| depth > 0 || r == 0).collect();
    let &(a, r) = symbols.choose(rng).expect("output has a leaf symbol");
    let children = (0..r).map(|_| random_rhs(rng, output, states, k, depth - 1)).collect();
    Tree::new(a.clone(), children)
}

/// A random transducer between the given alphabets. The first rule always
/// belongs to the initial state `q0`.
pub fn random_transducer(
    rng: &mut impl Rng,
    input: &RankedAlphabet,
    output: &RankedAlphabet,
    limits: &Limits,
) -> Transducer {
    let n_states = rng.gen_range(1..=limits.max_states);
    let states: Vec<StateId> = (0..n_states).map(|i| StateId::base(format!("q{i}"))).collect();
    let symbols: Vec<(&Symbol, usize)> = input.iter().collect();
    let n_rules = rng.gen_range(1..=limits.max_rules);
    let rules: Vec<Rule> = (0..n_rules)
        .map(|i| {
            let q = if i == 0 {
                states[0].clone()
            } else {
                states.choose(rng).unwrap().clone()
            };
            let &(a, k) = symbols.choose(rng).expect("input is non-empty");
            let depth = rng.gen_range(0..=limits.max_rhs_depth);
            Rule::new(q, a.clone(), random_rhs(rng, output, &states, k, depth))
        })
        .collect();
    Transducer::new(states.clone(), input.clone(), output.clone(), rules, states[0].clone())
        .expect("generated machines are well formed")
}

/// `len` composable random transducers from one seed.
pub fn random_chain_with(seed: u64, len: usize, limits: &Limits) -> CompositionChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabets: Vec<RankedAlphabet> = (0..=len)
        .map(|i| random_alphabet(&mut rng, &NAMES[i % NAMES.len()], limits))
        .collect();
    let stages = (0..len)
        .map(|i| random_transducer(&mut rng, &alphabets[i], &alphabets[i + 1], limits))
        .collect();
    CompositionChain::new(stages).expect("adjacent alphabets agree")
}

pub fn random_chain(seed: u64, len: usize) -> CompositionChain {
    random_chain_with(seed, len, &Limits::default())
}

/// A composable pair `(T1, T2)` from one seed.
pub fn random_pair(seed: u64) -> (Transducer, Transducer) {
    let chain = random_chain(seed, 2);
    (chain.stages()[0].clone(), chain.stages()[1].clone())
}
