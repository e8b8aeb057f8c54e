use std::time::Instant;

use crate::candidates::{
    build_support, collect_lower_candidates, enumerate_upper_subsets, prune_by_support, retain_lower_by_scope,
    CandidatePair, LowerScope, SubsetMode,
};
use crate::error::Result;
use crate::exec::map_with;
use crate::graph::{connected_component_of, keyword_filtered_mask, AttributedBipartiteGraph, KeywordScope, KeywordSet};
use crate::peel::PeelerPool;

use super::{finish, verify_batch, Best, QueryOutcome, QuerySpec, QueryStats, SearchConfig};

const CHUNK: usize = 4096;

/// Exhaustive baseline: every nonempty subset of `S` against every nonempty
/// subset of every lower vertex's keywords, each verified from the full
/// graph.
pub fn run_basic(g: &AttributedBipartiteGraph, spec: &QuerySpec, cfg: &SearchConfig) -> Result<QueryOutcome> {
    let started = Instant::now();
    spec.validate(g)?;
    let psi = enumerate_upper_subsets(&spec.keywords, cfg.subset_cap)?;
    let phi: Vec<KeywordSet> =
        collect_lower_candidates(g, LowerScope::AllLower, SubsetMode::AllSubsets, cfg.subset_cap, cfg.deadline)?
            .into_iter()
            .map(|c| c.set)
            .collect();

    let mut stats = QueryStats { candidates_generated: (psi.len() * phi.len()) as u64, ..Default::default() };
    let mut best = Best::default();
    let pool = PeelerPool::new(g);
    let (q, p) = (spec.q, spec.params);

    let total = psi.len() * phi.len();
    let mut start = 0;
    while start < total {
        cfg.deadline.check()?;
        let idx: Vec<usize> = (start..(start + CHUNK).min(total)).collect();
        start += idx.len();
        let deadline = cfg.deadline;
        let out = map_with(cfg.exec, &idx, || pool.get(), |peeler, &k| {
            if deadline.expired() {
                return Err(crate::error::Error::Timeout);
            }
            let (su, sv) = (&psi[k / phi.len()], &phi[k % phi.len()]);
            let filtered = keyword_filtered_mask(g, su, sv);
            let comp = connected_component_of(g, &filtered, q);
            let r = peeler.peel(g, &comp, q, p);
            Ok(r.exists.then_some(r))
        });
        stats.candidates_verified += idx.len() as u64;
        stats.peels_run += idx.len() as u64;
        for (k, r) in idx.iter().zip(out) {
            if let Some(r) = r? {
                best.offer(CandidatePair::new(psi[k / phi.len()].clone(), phi[k % phi.len()].clone()), r);
            }
        }
    }
    Ok(finish(g, spec, best, stats, started))
}

/// The baseline's verification order with the cheap generation-side
/// pruning: lower sets come from `q`'s neighbours, both layers are pruned by
/// support, and pairs are verified on the vertices holding them.
pub fn run_basic_plus(g: &AttributedBipartiteGraph, spec: &QuerySpec, cfg: &SearchConfig) -> Result<QueryOutcome> {
    let started = Instant::now();
    spec.validate(g)?;
    let (q, p) = (spec.q, spec.params);
    let psi = enumerate_upper_subsets(&spec.keywords, cfg.subset_cap)?;
    let mut lower =
        collect_lower_candidates(g, LowerScope::NeighborsOf(q), SubsetMode::AllSubsets, cfg.subset_cap, cfg.deadline)?;
    retain_lower_by_scope(&mut lower, p.alpha);
    cfg.deadline.check()?;
    let index = prune_by_support(build_support(g, &psi, &lower), p);
    let psi: Vec<&KeywordSet> = index.upper_sets().collect();
    let phi: Vec<&KeywordSet> = index.lower_sets().collect();

    let mut stats = QueryStats { candidates_generated: (psi.len() * phi.len()) as u64, ..Default::default() };
    let mut best = Best::default();
    let pool = PeelerPool::new(g);
    let total = psi.len() * phi.len();
    let mut start = 0;
    while start < total {
        cfg.deadline.check()?;
        let idx: Vec<usize> = (start..(start + CHUNK).min(total)).collect();
        start += idx.len();
        let out = verify_batch(g, &pool, cfg, q, p, &idx, |&k| {
            KeywordScope::new(g, psi[k / phi.len()], phi[k % phi.len()])
        })?;
        stats.candidates_verified += idx.len() as u64;
        stats.peels_run += idx.len() as u64;
        for (k, r) in idx.iter().zip(out) {
            if let Some(r) = r {
                best.offer(CandidatePair::new(psi[k / phi.len()].clone(), phi[k % phi.len()].clone()), r);
            }
        }
    }
    Ok(finish(g, spec, best, stats, started))
}
