use std::time::Instant;

use crate::candidates::{
    build_support, collect_lower_candidates, enumerate_upper_subsets, prune_by_support, restrict_support,
    retain_lower_by_scope, CandidatePair, LowerScope, SubsetMode,
};
use crate::error::Result;
use crate::graph::{AttributedBipartiteGraph, KeywordScope, KeywordSet};
use crate::peel::PeelerPool;

use super::{finish, plain_community, verify_batch, Best, QueryOutcome, QuerySpec, QueryStats, SearchConfig};

/// Group set indices by set size; `out[s]` lists the sets of size `s`.
fn by_size(sets: &[&KeywordSet]) -> Vec<Vec<usize>> {
    let max = sets.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut out = vec![Vec::new(); max + 1];
    for (i, s) in sets.iter().enumerate() {
        out[s.len()].push(i);
    }
    out
}

/// Largest pairs first. The first size class holding any qualified pair is
/// the answer; smaller classes are never verified.
pub fn run_dec(g: &AttributedBipartiteGraph, spec: &QuerySpec, cfg: &SearchConfig) -> Result<QueryOutcome> {
    let started = Instant::now();
    spec.validate(g)?;
    let (q, p) = (spec.q, spec.params);
    let psi = enumerate_upper_subsets(&spec.keywords, cfg.subset_cap)?;
    let Some(plain) = plain_community(g, spec) else {
        return Ok(finish(g, spec, Best::default(), QueryStats::default(), started));
    };
    let within = &plain.mask;
    let mut lower = collect_lower_candidates(
        g,
        LowerScope::NeighborsIn(q, within),
        SubsetMode::AllSubsets,
        cfg.subset_cap,
        cfg.deadline,
    )?;
    retain_lower_by_scope(&mut lower, p.alpha);
    cfg.deadline.check()?;
    let index = prune_by_support(restrict_support(build_support(g, &psi, &lower), within), p);
    let psi: Vec<&KeywordSet> = index.upper_sets().collect();
    let phi: Vec<&KeywordSet> = index.lower_sets().collect();

    let mut stats = QueryStats { candidates_generated: (psi.len() * phi.len()) as u64, ..Default::default() };
    let mut best = Best::default();
    let pool = PeelerPool::new(g);
    let (psi_sz, phi_sz) = (by_size(&psi), by_size(&phi));
    let max_size = (psi_sz.len() - 1) + (phi_sz.len() - 1);

    for size in (2..=max_size).rev() {
        if best.size() > size {
            break;
        }
        cfg.deadline.check()?;
        // The size class, in canonical pair order.
        let mut class: Vec<(usize, usize)> = Vec::new();
        for (a, us) in psi_sz.iter().enumerate().skip(1) {
            let Some(b) = size.checked_sub(a) else { continue };
            let Some(vs) = phi_sz.get(b) else { continue };
            if b == 0 {
                continue;
            }
            class.extend(us.iter().flat_map(|&i| vs.iter().map(move |&j| (i, j))));
        }
        if class.is_empty() {
            continue;
        }
        class.sort_by(|x, y| (psi[x.0], phi[x.1]).cmp(&(psi[y.0], phi[y.1])));
        let out = verify_batch(g, &pool, cfg, q, p, &class, |&(i, j)| KeywordScope::new(g, psi[i], phi[j]).within(within))?;
        stats.candidates_verified += class.len() as u64;
        stats.peels_run += class.len() as u64;
        for (&(i, j), r) in class.iter().zip(out) {
            if let Some(r) = r {
                best.offer(CandidatePair::new(psi[i].clone(), phi[j].clone()), r);
            }
        }
    }
    Ok(finish(g, spec, best, stats, started))
}
