//! Nondeterministic top-down tree transducers, look-ahead, the symbolic
//! constructions used to reduce a composition chain to a single
//! transducer with look-ahead, and a bounded functionality checker.

pub mod alphabet;
pub mod cli;
pub mod constructions;
pub mod decision;
pub mod error;
pub mod fixtures;
pub mod random;
pub mod render;
pub mod state;
pub mod text;
pub mod trace;
pub mod transducer;
pub mod tree;

pub use alphabet::{RankedAlphabet, Symbol};
pub use decision::{chain_outputs, check_functional_bounded, decide_functionality, Verdict};
pub use error::{Error, Result};
pub use state::StateId;
pub use text::Workspace;
pub use trace::{trace_derivation, DerivationTrace};
pub use transducer::{CompositionChain, LookaheadTransducer, Rule, Transducer};
pub use tree::{NodeAddress, Tree};
