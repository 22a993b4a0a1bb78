//! Symbolic constructions: domain automata, products, the look-ahead
//! transducer `M`, look-ahead removal, fusion, chain reduction and pruning.

mod chain;
mod domain;
mod lookahead;
mod product;
mod prune;
mod report;

pub use chain::{reduce_chain, reduce_chain_report};
pub use domain::{domain_automaton, RhsChoice};
pub use lookahead::{build_m, build_m_report, build_m_report_with, build_m_unpruned, decompose_la};
pub use product::{build_hat_t1, build_product_n, compose_linear_nondeleting, p_construction};
pub use prune::{prune, prune_automaton, prune_lookahead};
pub use report::{BuildReport, StateOrigin};

pub(crate) use lookahead::fresh;
