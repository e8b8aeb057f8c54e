//! Attributed (α,β)-community search.
//!
//! Every algorithm answers the same question: among nonempty keyword pairs
//! `(S_u ⊆ S, S_v)` for which the degree-constrained connected community of
//! `q` exists inside the vertices containing the pair, which pairs have the
//! largest `|S_u| + |S_v|`, and what are their communities? They differ only
//! in how candidates are generated and in which order and scope they are
//! verified.

mod basic;
mod dec;
mod inc;
mod oracle;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::candidates::{CandidatePair, DEFAULT_SUBSET_CAP};
use crate::error::{Error, Result};
use crate::exec::{map_with, Deadline, Exec};
use crate::graph::{AttributedBipartiteGraph, KeywordSet, Layer, Scope, SubgraphMask, VertexRef};
use crate::peel::{CoreParams, PeelResult, PeelerPool};

pub use basic::{run_basic, run_basic_plus};
pub use dec::run_dec;
pub use inc::{run_inc, run_inc_traced, IncTrace};
pub use oracle::{naive_peel, run_oracle, ORACLE_MAX_LOWER_VOCAB, ORACLE_MAX_S};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Basic,
    #[serde(rename = "basic+")]
    BasicPlus,
    Inc,
    Dec,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Basic, Algorithm::BasicPlus, Algorithm::Inc, Algorithm::Dec, Algorithm::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Basic => "basic",
            Algorithm::BasicPlus => "basic+",
            Algorithm::Inc => "inc",
            Algorithm::Dec => "dec",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "basic" => Ok(Algorithm::Basic),
            "basic+" | "basicplus" | "basic-plus" => Ok(Algorithm::BasicPlus),
            "inc" => Ok(Algorithm::Inc),
            "dec" => Ok(Algorithm::Dec),
            "oracle" => Ok(Algorithm::Oracle),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub q: VertexRef,
    pub params: CoreParams,
    pub keywords: KeywordSet,
    pub algorithm: Algorithm,
}

impl QuerySpec {
    pub fn new(q: VertexRef, params: CoreParams, keywords: KeywordSet, algorithm: Algorithm) -> Self {
        QuerySpec { q, params, keywords, algorithm }
    }

    /// `q` must be an existing upper vertex and `S` a nonempty subset of its
    /// keywords.
    pub fn validate(&self, g: &AttributedBipartiteGraph) -> Result<()> {
        if self.q.layer != Layer::Upper {
            return Err(Error::InvalidQuery("query vertex must be in the upper layer".into()));
        }
        if !g.contains_vertex(self.q) {
            return Err(Error::InvalidQuery(format!("query vertex {} does not exist", self.q)));
        }
        if self.keywords.is_empty() {
            return Err(Error::InvalidQuery("query keyword set is empty".into()));
        }
        let own = g.keywords(self.q);
        if let Some(k) = self.keywords.iter().find(|k| !own.contains(*k)) {
            return Err(Error::InvalidQuery(format!(
                "keyword {:?} is not held by the query vertex {}",
                g.keyword_table().word(k),
                g.label(self.q)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub exec: Exec,
    pub deadline: Deadline,
    pub subset_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { exec: Exec::default(), deadline: Deadline::NONE, subset_cap: DEFAULT_SUBSET_CAP }
    }
}

impl SearchConfig {
    pub fn sequential() -> Self {
        SearchConfig { exec: Exec::Sequential, ..Self::default() }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Deadline::after(limit);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommunityResult {
    pub pair: CandidatePair,
    pub upper_vertices: Vec<VertexRef>,
    pub lower_vertices: Vec<VertexRef>,
    pub shared_upper: KeywordSet,
    pub shared_lower: KeywordSet,
    pub size: usize,
}

impl CommunityResult {
    /// Build from a verified pair, recomputing the shared keyword sets from
    /// the vertex sets.
    pub fn from_peel(g: &AttributedBipartiteGraph, s: &KeywordSet, pair: CandidatePair, r: &PeelResult) -> Self {
        debug_assert!(r.exists);
        let upper_vertices: Vec<VertexRef> = r.upper.iter().map(|&u| VertexRef::upper(u)).collect();
        let lower_vertices: Vec<VertexRef> = r.lower.iter().map(|&v| VertexRef::lower(v)).collect();
        let shared_upper = upper_vertices
            .iter()
            .fold(s.clone(), |acc, &u| acc.intersection(g.keywords(u)));
        let shared_lower = match lower_vertices.split_first() {
            None => KeywordSet::new(),
            Some((first, rest)) => rest
                .iter()
                .fold(g.keywords(*first).clone(), |acc, &v| acc.intersection(g.keywords(v))),
        };
        let size = shared_upper.len() + shared_lower.len();
        CommunityResult { pair, upper_vertices, lower_vertices, shared_upper, shared_lower, size }
    }

    /// The triple that algorithms must agree on.
    pub fn key(&self) -> (&CandidatePair, &[VertexRef], &[VertexRef]) {
        (&self.pair, &self.upper_vertices, &self.lower_vertices)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryStats {
    pub candidates_generated: u64,
    pub candidates_verified: u64,
    pub peels_run: u64,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub algorithm: Option<Algorithm>,
}

#[derive(Clone, Debug)]
pub struct QueryOutcome {
    /// All maximum-size communities in canonical pair order.
    pub results: Vec<CommunityResult>,
    pub stats: QueryStats,
    /// When no keyword pair qualifies: the plain (α,β)-community of `q`,
    /// if one exists.
    pub plain_community: Option<PeelResult>,
}

/// Run the algorithm named in `spec`.
pub fn run(g: &AttributedBipartiteGraph, spec: &QuerySpec, cfg: &SearchConfig) -> Result<QueryOutcome> {
    match spec.algorithm {
        Algorithm::Basic => run_basic(g, spec, cfg),
        Algorithm::BasicPlus => run_basic_plus(g, spec, cfg),
        Algorithm::Inc => run_inc(g, spec, cfg),
        Algorithm::Dec => run_dec(g, spec, cfg),
        Algorithm::Oracle => run_oracle(g, spec, cfg),
    }
}

/// Keeps only the pairs of the largest qualified size seen so far.
#[derive(Default)]
pub(crate) struct Best {
    size: usize,
    hits: Vec<(CandidatePair, PeelResult)>,
}

impl Best {
    pub(crate) fn offer(&mut self, pair: CandidatePair, r: PeelResult) {
        debug_assert!(r.exists);
        let s = pair.size();
        if s > self.size {
            self.size = s;
            self.hits.clear();
        }
        if s == self.size {
            self.hits.push((pair, r));
        }
    }

    pub(crate) fn size(&self) -> usize {
        self.size
    }
}

/// Verify a batch of pairs, each in the scope built by `scope`, returning
/// the qualified ones. Honours the deadline per item.
pub(crate) fn verify_batch<T, S, F>(
    g: &AttributedBipartiteGraph,
    pool: &PeelerPool<'_>,
    cfg: &SearchConfig,
    q: VertexRef,
    p: CoreParams,
    items: &[T],
    scope: F,
) -> Result<Vec<Option<PeelResult>>>
where
    T: Sync,
    S: Scope,
    F: Fn(&T) -> S + Sync + Send,
{
    let deadline = cfg.deadline;
    let out = map_with(cfg.exec, items, || pool.get(), |peeler, item| {
        if deadline.expired() {
            return Err(Error::Timeout);
        }
        let sc = scope(item);
        let r = peeler.peel(g, &sc, q, p);
        Ok(r.exists.then_some(r))
    });
    out.into_iter().collect()
}

/// The (α,β)-community of `q` ignoring keywords. Every attributed community
/// of `q` lies inside it, so it can bound both candidates and peels.
pub(crate) fn plain_community(g: &AttributedBipartiteGraph, spec: &QuerySpec) -> Option<PeelResult> {
    let r = crate::peel::Peeler::new(g).peel(g, &SubgraphMask::full(g), spec.q, spec.params);
    r.exists.then_some(r)
}

pub(crate) fn finish(
    g: &AttributedBipartiteGraph,
    spec: &QuerySpec,
    best: Best,
    mut stats: QueryStats,
    started: Instant,
) -> QueryOutcome {
    let mut results: Vec<CommunityResult> = best
        .hits
        .into_iter()
        .map(|(pair, r)| CommunityResult::from_peel(g, &spec.keywords, pair, &r))
        .collect();
    results.sort_by(|a, b| a.pair.cmp(&b.pair));
    for r in &results {
        debug_assert!(r.upper_vertices.contains(&spec.q));
        // A strictly larger shared set would be a larger qualified pair.
        debug_assert_eq!(r.shared_upper, r.pair.upper, "shared upper keywords exceed the pair");
        debug_assert_eq!(r.shared_lower, r.pair.lower, "shared lower keywords exceed the pair");
    }
    let plain_community = if results.is_empty() {
        plain_community(g, spec)
    } else {
        None
    };
    stats.elapsed = started.elapsed();
    stats.algorithm = Some(spec.algorithm);
    QueryOutcome { results, stats, plain_community }
}
