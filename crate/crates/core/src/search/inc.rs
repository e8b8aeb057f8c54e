use std::collections::HashSet;
use std::time::Instant;

use crate::candidates::{
    all_subpairs_qualified, build_support, collect_lower_candidates, combine_level, prune_by_support,
    restrict_support, retain_lower_by_scope, upper_singletons, CandidatePair, LowerScope, QualifiedLevel, SubsetMode,
};
use crate::error::Result;
use crate::graph::{AttributedBipartiteGraph, KeywordScope, KeywordSet};
use crate::peel::PeelerPool;

use super::{finish, plain_community, verify_batch, Best, QueryOutcome, QuerySpec, QueryStats, SearchConfig};

/// Qualified pairs discovered at each level, in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IncTrace {
    pub levels: Vec<Vec<CandidatePair>>,
}

pub fn run_inc(g: &AttributedBipartiteGraph, spec: &QuerySpec, cfg: &SearchConfig) -> Result<QueryOutcome> {
    run_inc_traced(g, spec, cfg).map(|(o, _)| o)
}

/// Level-wise search from singleton pairs upwards. Level `l` holds the
/// qualified pairs of size `l + 2`; each candidate at the next level is the
/// union of two qualified pairs and is verified inside the intersection of
/// their communities, where every vertex already holds the union's keywords.
pub fn run_inc_traced(
    g: &AttributedBipartiteGraph,
    spec: &QuerySpec,
    cfg: &SearchConfig,
) -> Result<(QueryOutcome, IncTrace)> {
    let started = Instant::now();
    spec.validate(g)?;
    let (q, p) = (spec.q, spec.params);
    let psi = upper_singletons(&spec.keywords);
    let Some(plain) = plain_community(g, spec) else {
        return Ok((finish(g, spec, Best::default(), QueryStats::default(), started), IncTrace::default()));
    };
    let within = &plain.mask;
    let mut lower = collect_lower_candidates(
        g,
        LowerScope::NeighborsIn(q, within),
        SubsetMode::Singletons,
        cfg.subset_cap,
        cfg.deadline,
    )?;
    retain_lower_by_scope(&mut lower, p.alpha);
    let index = prune_by_support(restrict_support(build_support(g, &psi, &lower), within), p);
    let psi: Vec<&KeywordSet> = index.upper_sets().collect();
    let phi: Vec<&KeywordSet> = index.lower_sets().collect();

    let mut stats = QueryStats::default();
    let mut trace = IncTrace::default();
    let pool = PeelerPool::new(g);

    let seeds: Vec<CandidatePair> = psi
        .iter()
        .flat_map(|u| phi.iter().map(move |v| CandidatePair::new((*u).clone(), (*v).clone())))
        .collect();
    stats.candidates_generated += seeds.len() as u64;
    let out = verify_batch(g, &pool, cfg, q, p, &seeds, |c| KeywordScope::new(g, &c.upper, &c.lower).within(within))?;
    stats.candidates_verified += seeds.len() as u64;
    stats.peels_run += seeds.len() as u64;
    let mut level = QualifiedLevel {
        level: 0,
        entries: seeds.into_iter().zip(out).filter_map(|(c, r)| r.map(|r| (c, r))).collect(),
    };

    let mut visited: HashSet<CandidatePair> = level.entries.iter().map(|(c, _)| c.clone()).collect();
    let mut best = Best::default();
    while !level.entries.is_empty() {
        cfg.deadline.check()?;
        trace.levels.push(level.entries.iter().map(|(c, _)| c.clone()).collect());
        let qualified: HashSet<CandidatePair> = level.entries.iter().map(|(c, _)| c.clone()).collect();
        let mut next = combine_level(&level);
        stats.candidates_generated += next.len() as u64;
        next.retain(|c| visited.insert(c.pair.clone()) && all_subpairs_qualified(&c.pair, &qualified));

        let out = verify_batch(g, &pool, cfg, q, p, &next, |c| c.scope.clone())?;
        stats.candidates_verified += next.len() as u64;
        stats.peels_run += next.len() as u64;
        let entries: Vec<_> = next.into_iter().zip(out).filter_map(|(c, r)| r.map(|r| (c.pair, r))).collect();
        #[cfg(debug_assertions)]
        for (c, r) in &entries {
            let ks = KeywordScope::new(g, &c.upper, &c.lower);
            use crate::graph::Scope;
            debug_assert!(r.upper.iter().all(|&u| ks.upper_alive(u)) && r.lower.iter().all(|&v| ks.lower_alive(v)));
        }
        if entries.is_empty() {
            for (c, r) in level.entries {
                best.offer(c, r);
            }
            break;
        }
        level = QualifiedLevel { level: level.level + 1, entries };
    }
    Ok((finish(g, spec, best, stats, started), trace))
}
