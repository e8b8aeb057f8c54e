//! Exhaustive reference search for desk-scale graphs. Shares nothing with the
//! fast path beyond the graph accessors: keyword containment uses merge-scan,
//! peeling is a whole-graph rescan to a fixed point.

use std::collections::VecDeque;
use std::time::Instant;

use crate::candidates::CandidatePair;
use crate::error::{Error, Result};
use crate::graph::{AttributedBipartiteGraph, KeywordId, KeywordSet, VertexRef};
use crate::peel::{CoreParams, PeelResult};

use super::{finish, Best, QueryOutcome, QuerySpec, QueryStats, SearchConfig};

pub const ORACLE_MAX_S: usize = 10;
pub const ORACLE_MAX_LOWER_VOCAB: usize = 12;

/// Repeatedly delete every vertex below its threshold until nothing changes,
/// then keep the component of `q`. Returns sorted `(upper, lower)` survivors.
pub fn naive_peel(
    g: &AttributedBipartiteGraph,
    alive_upper: &[bool],
    alive_lower: &[bool],
    q: VertexRef,
    p: CoreParams,
) -> Option<(Vec<u32>, Vec<u32>)> {
    let mut au = alive_upper.to_vec();
    let mut al = alive_lower.to_vec();
    loop {
        let mut changed = false;
        for u in 0..au.len() {
            if au[u] && g.upper_neighbors(u as u32).iter().filter(|&&v| al[v as usize]).count() < p.alpha as usize {
                au[u] = false;
                changed = true;
            }
        }
        for v in 0..al.len() {
            if al[v] && g.lower_neighbors(v as u32).iter().filter(|&&u| au[u as usize]).count() < p.beta as usize {
                al[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !au[q.index as usize] {
        return None;
    }
    let mut seen_u = vec![false; au.len()];
    let mut seen_l = vec![false; al.len()];
    seen_u[q.index as usize] = true;
    let mut queue = VecDeque::from([q]);
    while let Some(x) = queue.pop_front() {
        if x.is_upper() {
            for &v in g.upper_neighbors(x.index) {
                if al[v as usize] && !seen_l[v as usize] {
                    seen_l[v as usize] = true;
                    queue.push_back(VertexRef::lower(v));
                }
            }
        } else {
            for &u in g.lower_neighbors(x.index) {
                if au[u as usize] && !seen_u[u as usize] {
                    seen_u[u as usize] = true;
                    queue.push_back(VertexRef::upper(u));
                }
            }
        }
    }
    let pick = |s: &[bool]| s.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32).collect();
    Some((pick(&seen_u), pick(&seen_l)))
}

fn subsets(ids: &[KeywordId]) -> impl Iterator<Item = KeywordSet> + '_ {
    (1u32..(1 << ids.len()))
        .map(move |bits| KeywordSet::from_ids((0..ids.len()).filter(|i| bits >> i & 1 == 1).map(|i| ids[i])))
}

/// Every nonempty `S_u ⊆ S` against every nonempty subset of the lower
/// vocabulary, each verified from scratch on the full graph.
pub fn run_oracle(g: &AttributedBipartiteGraph, spec: &QuerySpec, cfg: &SearchConfig) -> Result<QueryOutcome> {
    let started = Instant::now();
    spec.validate(g)?;
    if spec.keywords.len() > ORACLE_MAX_S {
        return Err(Error::OracleGuard(format!("|S| = {} > {ORACLE_MAX_S}", spec.keywords.len())));
    }
    let vocab = KeywordSet::from_ids(g.lower_keywords().iter().flat_map(|s| s.iter()));
    if vocab.len() > ORACLE_MAX_LOWER_VOCAB {
        return Err(Error::OracleGuard(format!(
            "lower vocabulary of {} keywords > {ORACLE_MAX_LOWER_VOCAB}",
            vocab.len()
        )));
    }
    let (q, p) = (spec.q, spec.params);
    let mut stats = QueryStats::default();
    let mut best = Best::default();
    for su in subsets(spec.keywords.ids()) {
        let au: Vec<bool> = g.upper_keywords().iter().map(|w| su.is_subset(w)).collect();
        for sv in subsets(vocab.ids()) {
            cfg.deadline.check()?;
            stats.candidates_generated += 1;
            stats.candidates_verified += 1;
            stats.peels_run += 1;
            let al: Vec<bool> = g.lower_keywords().iter().map(|w| sv.is_subset(w)).collect();
            if let Some((upper, lower)) = naive_peel(g, &au, &al, q, p) {
                let mask = crate::graph::SubgraphMask::from_vertices(g, &upper, &lower);
                best.offer(CandidatePair::new(su.clone(), sv), PeelResult { exists: true, mask, upper, lower });
            }
        }
    }
    Ok(finish(g, spec, best, stats, started))
}
