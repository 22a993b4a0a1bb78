use std::time::Instant;

use super::domain::RhsChoice;
use super::lookahead::{build_m_report_with, decompose_la};
use super::product::compose_linear_nondeleting;
use super::report::BuildReport;
use crate::error::{Error, Result};
use crate::transducer::CompositionChain;

/// Shortens a chain `T1,...,Tn` (`n ≥ 3`) to `T1,...,T(n-3),T̃,T`: the last
/// two stages become the look-ahead transducer `M`, `M` splits into a
/// relabeling `R` and a transducer `T`, and `R` is fused into `T(n-2)`.
/// Functionality of each input's output set is preserved.
pub fn reduce_chain(chain: &CompositionChain) -> Result<CompositionChain> {
    Ok(reduce_chain_report(chain)?.0)
}

/// [`reduce_chain`] with reports for building `M`, splitting it, and fusing.
pub fn reduce_chain_report(chain: &CompositionChain) -> Result<(CompositionChain, Vec<BuildReport>)> {
    let n = chain.len();
    if n < 3 {
        return Err(Error::ChainTooShort(n));
    }
    let s = chain.stages();
    let (m, m_report) = build_m_report_with(&s[n - 2], &s[n - 1], RhsChoice::OnePerState)?;

    let start = Instant::now();
    let (r, t) = decompose_la(&m)?;
    let split_elapsed = start.elapsed();
    let mut r_report = BuildReport::for_transducer("relabeling R", &r, &r, split_elapsed);
    r_report.states_before = m.la().states().len();
    r_report.rules_before = m.la().rules().len();
    let mut t_report = BuildReport::for_transducer("transducer T", &t, &t, split_elapsed);
    t_report.states_before = m.base().states().len();
    t_report.rules_before = m.base().rules().len();

    let start = Instant::now();
    let fused = compose_linear_nondeleting(&s[n - 3], &r)?;
    let fuse_report = BuildReport::for_transducer("fused", &fused, &fused, start.elapsed());

    let mut stages = s[..n - 3].to_vec();
    stages.push(fused);
    stages.push(t);
    Ok((
        CompositionChain::new(stages)?,
        vec![m_report, r_report, t_report, fuse_report],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::chain_outputs;
    use crate::fixtures;
    use crate::state::StateId;
    use crate::transducer::Transducer;
    use crate::tree::enumerate_trees;

    fn with_identity(t1: Transducer, t2: Transducer) -> CompositionChain {
        let id = Transducer::identity(t1.input(), StateId::base("i"));
        CompositionChain::new(vec![id, t1, t2]).unwrap()
    }

    #[test]
    fn too_short() {
        let (t1, t2) = fixtures::copying();
        let chain = CompositionChain::new(vec![t1, t2]).unwrap();
        assert_eq!(reduce_chain(&chain).unwrap_err(), Error::ChainTooShort(2));
    }

    #[test]
    fn reduction_keeps_singletons() {
        let chain = {
            let (t1, t2) = fixtures::example4();
            with_identity(t1, t2)
        };
        let (reduced, reports) = reduce_chain_report(&chain).unwrap();
        assert_eq!(reduced.len(), 2);
        assert_eq!(reports.len(), 4);
        for s in enumerate_trees(chain.input(), 5) {
            let a = chain_outputs(&chain, &s).unwrap().len() <= 1;
            let b = chain_outputs(&reduced, &s).unwrap().len() <= 1;
            assert_eq!(a, b, "{s}");
        }
    }

    #[test]
    fn deleting_tail_reduces_to_empty() {
        let (t1, t2) = fixtures::deleting();
        let reduced = reduce_chain(&with_identity(t1, t2)).unwrap();
        for s in enumerate_trees(reduced.input(), 5) {
            assert!(chain_outputs(&reduced, &s).unwrap().is_empty());
        }
    }

    #[test]
    fn identities_reduce_to_identity() {
        let (t1, _) = fixtures::example4();
        let id = |n: &str| Transducer::identity(t1.input(), StateId::base(n));
        let chain = CompositionChain::new(vec![id("i1"), id("i2"), id("i3")]).unwrap();
        let reduced = reduce_chain(&chain).unwrap();
        for s in enumerate_trees(chain.input(), 5) {
            let out = chain_outputs(&reduced, &s).unwrap();
            assert_eq!(out.into_iter().collect::<Vec<_>>(), [s]);
        }
    }
}
