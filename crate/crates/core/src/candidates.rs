//! Candidate keyword-pair generation and pruning.
//!
//! A candidate is a pair `(upper set, lower set)`, both nonempty. Upper sets
//! are subsets of the query keyword set; lower sets come from the keyword
//! sets of lower vertices (all of them for the exhaustive baseline, only the
//! neighbours of `q` otherwise). Support lists record which vertices contain
//! each set, and a candidate whose support is too small to reach the degree
//! thresholds can never be qualified.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Deadline;
use crate::graph::{AttributedBipartiteGraph, KeywordId, KeywordSet, Layer, SubgraphMask, VertexRef};
use crate::peel::{CoreParams, PeelResult};

/// Largest keyword set whose power set we are willing to enumerate.
pub const DEFAULT_SUBSET_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidatePair {
    pub upper: KeywordSet,
    pub lower: KeywordSet,
}

impl CandidatePair {
    pub fn new(upper: KeywordSet, lower: KeywordSet) -> Self {
        CandidatePair { upper, lower }
    }

    pub fn size(&self) -> usize {
        self.upper.len() + self.lower.len()
    }

    /// Layer-wise union.
    pub fn union(&self, other: &CandidatePair) -> CandidatePair {
        CandidatePair { upper: self.upper.union(&other.upper), lower: self.lower.union(&other.lower) }
    }

    pub fn union_size(&self, other: &CandidatePair) -> usize {
        self.upper.union_len(&other.upper) + self.lower.union_len(&other.lower)
    }

    /// Layer-wise containment.
    pub fn is_subpair_of(&self, other: &CandidatePair) -> bool {
        self.upper.is_subset(&other.upper) && self.lower.is_subset(&other.lower)
    }
}

/// Nonempty subsets of `ids`, ordered by size and then lexicographically.
fn power_set(ids: &[KeywordId]) -> Vec<KeywordSet> {
    let k = ids.len();
    let mut out: Vec<KeywordSet> = (1u32..(1u32 << k))
        .map(|bits| KeywordSet::from_ids((0..k).filter(|i| bits >> i & 1 == 1).map(|i| ids[i])))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// All `2^|S| - 1` nonempty subsets of `s`, by size then lexicographic order.
pub fn enumerate_upper_subsets(s: &KeywordSet, cap: usize) -> Result<Vec<KeywordSet>> {
    if s.len() > cap {
        return Err(Error::QueryKeywordCap { size: s.len(), cap });
    }
    Ok(power_set(s.ids()))
}

pub fn upper_singletons(s: &KeywordSet) -> Vec<KeywordSet> {
    s.iter().map(KeywordSet::singleton).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerScope<'a> {
    AllLower,
    NeighborsOf(VertexRef),
    /// Neighbours of the vertex that are also in the mask.
    NeighborsIn(VertexRef, &'a SubgraphMask),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    Singletons,
    AllSubsets,
}

/// A lower keyword set and how many in-scope vertices contain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerCandidate {
    pub set: KeywordSet,
    pub in_scope: usize,
}

/// Union of per-vertex singletons or power sets over the in-scope lower
/// vertices, each set listed once. Because a vertex contributes every subset
/// of its own keywords, `in_scope` equals the number of in-scope vertices
/// containing the set.
pub fn collect_lower_candidates(
    g: &AttributedBipartiteGraph,
    scope: LowerScope,
    mode: SubsetMode,
    cap: usize,
    deadline: Deadline,
) -> Result<Vec<LowerCandidate>> {
    let vertices: Vec<u32> = match scope {
        LowerScope::AllLower => (0..g.lower_count() as u32).collect(),
        LowerScope::NeighborsOf(q) => {
            debug_assert_eq!(q.layer, Layer::Upper);
            g.neighbors(q).to_vec()
        }
        LowerScope::NeighborsIn(q, m) => {
            debug_assert_eq!(q.layer, Layer::Upper);
            g.neighbors(q).iter().copied().filter(|&v| m.contains(VertexRef::lower(v))).collect()
        }
    };
    let mut counts: HashMap<KeywordSet, usize> = HashMap::new();
    for (i, &v) in vertices.iter().enumerate() {
        if i % 256 == 0 {
            deadline.check()?;
        }
        let w = g.keywords(VertexRef::lower(v));
        match mode {
            SubsetMode::Singletons => {
                for id in w.iter() {
                    *counts.entry(KeywordSet::singleton(id)).or_default() += 1;
                }
            }
            SubsetMode::AllSubsets => {
                if w.len() > cap {
                    return Err(Error::VertexKeywordCap {
                        vertex: g.label(VertexRef::lower(v)).to_owned(),
                        size: w.len(),
                        cap,
                    });
                }
                for set in power_set(w.ids()) {
                    *counts.entry(set).or_default() += 1;
                }
            }
        }
    }
    let mut out: Vec<LowerCandidate> =
        counts.into_iter().map(|(set, in_scope)| LowerCandidate { set, in_scope }).collect();
    out.sort_by(|a, b| a.set.len().cmp(&b.set.len()).then_with(|| a.set.cmp(&b.set)));
    Ok(out)
}

/// Drop lower candidates held by fewer than `alpha` in-scope vertices. This
/// is the lower half of [`prune_by_support`], applied before support lists
/// are built so that hopeless candidates never cost a graph scan.
pub fn retain_lower_by_scope(cands: &mut Vec<LowerCandidate>, alpha: u32) {
    cands.retain(|c| c.in_scope >= alpha as usize);
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportEntry {
    #[serde(skip)]
    pub set: KeywordSet,
    /// Sorted dense ids (in the entry's layer) of vertices containing `set`.
    pub vertices: Vec<u32>,
    /// Support counted over the generation scope. Equal to `vertices.len()`
    /// for upper entries and for lower entries collected from all of V.
    pub scope_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportIndex {
    pub upper: Vec<SupportEntry>,
    pub lower: Vec<SupportEntry>,
}

impl SupportIndex {
    pub fn upper_sets(&self) -> impl Iterator<Item = &KeywordSet> {
        self.upper.iter().map(|e| &e.set)
    }

    pub fn lower_sets(&self) -> impl Iterator<Item = &KeywordSet> {
        self.lower.iter().map(|e| &e.set)
    }
}

/// Support lists for one layer. Chooses between scanning every vertex per
/// candidate and enumerating, per vertex, the candidate subsets it holds.
fn layer_support(g: &AttributedBipartiteGraph, layer: Layer, cands: &[KeywordSet]) -> Vec<Vec<u32>> {
    let n = g.layer_count(layer);
    let mut lists = vec![Vec::new(); cands.len()];
    if cands.is_empty() {
        return lists;
    }
    let universe: Vec<KeywordId> = {
        let mut all: Vec<KeywordId> = cands.iter().flat_map(|c| c.iter()).collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    let pos: HashMap<KeywordId, u32> =
        universe.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();

    if universe.len() <= 24 {
        let to_bits = |s: &KeywordSet| s.iter().fold(0u32, |acc, k| acc | 1 << pos[&k]);
        let index: HashMap<u32, usize> = cands.iter().enumerate().map(|(i, c)| (to_bits(c), i)).collect();
        let held: Vec<u32> = (0..n as u32)
            .map(|x| {
                g.keywords(VertexRef { layer, index: x })
                    .iter()
                    .filter_map(|k| pos.get(&k))
                    .fold(0u32, |acc, p| acc | 1 << p)
            })
            .collect();
        let enum_cost: u64 = held.iter().map(|h| 1u64 << h.count_ones()).sum();
        let scan_cost = cands.len() as u64 * n as u64;
        if enum_cost <= scan_cost {
            for (x, &h) in held.iter().enumerate() {
                // Walk all nonempty submasks of h.
                let mut sub = h;
                while sub != 0 {
                    if let Some(&i) = index.get(&sub) {
                        lists[i].push(x as u32);
                    }
                    sub = (sub - 1) & h;
                }
            }
            for l in &mut lists {
                l.sort_unstable();
            }
            return lists;
        }
    }
    for (i, c) in cands.iter().enumerate() {
        let m = g.keyword_mask(c);
        lists[i] = (0..n as u32)
            .filter(|&x| match layer {
                Layer::Upper => g.upper_has(x, &m),
                Layer::Lower => g.lower_has(x, &m),
            })
            .collect();
    }
    lists
}

/// Exact support lists (P_i for upper sets, Q_j for lower sets).
pub fn build_support(
    g: &AttributedBipartiteGraph,
    upper: &[KeywordSet],
    lower: &[LowerCandidate],
) -> SupportIndex {
    let up = layer_support(g, Layer::Upper, upper);
    let lower_sets: Vec<KeywordSet> = lower.iter().map(|c| c.set.clone()).collect();
    let low = layer_support(g, Layer::Lower, &lower_sets);
    SupportIndex {
        upper: upper
            .iter()
            .zip(up)
            .map(|(s, v)| SupportEntry { set: s.clone(), scope_count: v.len(), vertices: v })
            .collect(),
        lower: lower
            .iter()
            .zip(low)
            .map(|(c, v)| SupportEntry { set: c.set.clone(), scope_count: c.in_scope, vertices: v })
            .collect(),
    }
}

/// Keep only support-list vertices inside `mask`. Upper counts follow the
/// lists; lower scope counts are left as collected.
pub fn restrict_support(mut index: SupportIndex, mask: &SubgraphMask) -> SupportIndex {
    for e in &mut index.upper {
        e.vertices.retain(|&u| mask.contains(VertexRef::upper(u)));
        e.scope_count = e.vertices.len();
    }
    for e in &mut index.lower {
        e.vertices.retain(|&v| mask.contains(VertexRef::lower(v)));
    }
    index
}

/// Remove upper sets held by fewer than β vertices and lower sets held by
/// fewer than α in-scope vertices.
pub fn prune_by_support(mut index: SupportIndex, p: CoreParams) -> SupportIndex {
    index.upper.retain(|e| e.vertices.len() >= p.beta as usize);
    index.lower.retain(|e| e.scope_count >= p.alpha as usize);
    index
}

/// Qualified pairs of one size, each with its community.
#[derive(Clone, Debug)]
pub struct QualifiedLevel {
    pub level: usize,
    pub entries: Vec<(CandidatePair, PeelResult)>,
}

impl QualifiedLevel {
    pub fn pair_size(&self) -> Option<usize> {
        self.entries.first().map(|(c, _)| c.size())
    }
}

/// A combined candidate and the scope it must be verified in: the
/// intersection of its two parents' communities.
#[derive(Clone, Debug)]
pub struct Combined {
    pub pair: CandidatePair,
    pub scope: SubgraphMask,
}

/// All distinct layer-wise unions of two entries whose size is exactly one
/// more than the level's pair size, in canonical pair order.
pub fn combine_level(level: &QualifiedLevel) -> Vec<Combined> {
    let Some(k) = level.pair_size() else { return Vec::new() };
    debug_assert!(level.entries.iter().all(|(c, _)| c.size() == k));
    let mut seen: HashSet<CandidatePair> = HashSet::new();
    let mut out = Vec::new();
    let es = &level.entries;
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            let (c1, r1) = &es[i];
            let (c2, r2) = &es[j];
            if c1.union_size(c2) != k + 1 {
                continue;
            }
            let pair = c1.union(c2);
            if seen.insert(pair.clone()) {
                out.push(Combined { pair, scope: r1.mask.intersect(&r2.mask) });
            }
        }
    }
    out.sort_by(|a, b| a.pair.cmp(&b.pair));
    out
}

/// Apriori check: every sub-pair one element smaller with both layers
/// nonempty must be qualified at the previous level.
pub fn all_subpairs_qualified(pair: &CandidatePair, qualified: &HashSet<CandidatePair>) -> bool {
    let drop_one = |s: &KeywordSet, k: KeywordId| KeywordSet::from_ids(s.iter().filter(|&x| x != k));
    if pair.upper.len() > 1 {
        for k in pair.upper.iter() {
            let sub = CandidatePair::new(drop_one(&pair.upper, k), pair.lower.clone());
            if !qualified.contains(&sub) {
                return false;
            }
        }
    }
    if pair.lower.len() > 1 {
        for k in pair.lower.iter() {
            let sub = CandidatePair::new(pair.upper.clone(), drop_one(&pair.lower, k));
            if !qualified.contains(&sub) {
                return false;
            }
        }
    }
    true
}
