//! Attributed bipartite graph model.
//!
//! Vertices live in two layers with dense, per-layer `u32` indices. Keywords
//! are interned into a single table owned by the graph; every vertex carries a
//! sorted [`KeywordSet`] plus a packed bit row used for fast containment
//! tests. Subgraphs are never materialised: algorithms work on
//! [`SubgraphMask`] views or on any other [`Scope`].

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    Upper,
    Lower,
}

impl Layer {
    pub fn other(self) -> Layer {
        match self {
            Layer::Upper => Layer::Lower,
            Layer::Lower => Layer::Upper,
        }
    }
}

/// A vertex handle: layer tag plus dense index within that layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexRef {
    pub layer: Layer,
    pub index: u32,
}

impl VertexRef {
    pub fn upper(index: u32) -> Self {
        VertexRef { layer: Layer::Upper, index }
    }

    pub fn lower(index: u32) -> Self {
        VertexRef { layer: Layer::Lower, index }
    }

    pub fn is_upper(self) -> bool {
        self.layer == Layer::Upper
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.layer {
            Layer::Upper => write!(f, "U{}", self.index),
            Layer::Lower => write!(f, "L{}", self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeywordId(pub u32);

/// Bidirectional string <-> [`KeywordId`] map. Ids are dense and allocated in
/// first-seen order.
#[derive(Clone, Debug, Default)]
pub struct KeywordTable {
    words: Vec<String>,
    index: HashMap<String, KeywordId>,
}

impl KeywordTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, word: &str) -> KeywordId {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = KeywordId(self.words.len() as u32);
        self.words.push(word.to_owned());
        self.index.insert(word.to_owned(), id);
        id
    }

    pub fn get(&self, word: &str) -> Option<KeywordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: KeywordId) -> &str {
        &self.words[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A sorted, duplicate-free set of keyword ids.
///
/// Ordering is lexicographic on the id sequence, which is the canonical order
/// used for candidates and results.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeywordSet(Vec<KeywordId>);

impl KeywordSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<I: IntoIterator<Item = KeywordId>>(ids: I) -> Self {
        let mut v: Vec<KeywordId> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        KeywordSet(v)
    }

    pub fn singleton(id: KeywordId) -> Self {
        KeywordSet(vec![id])
    }

    pub fn ids(&self) -> &[KeywordId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: KeywordId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    /// Merge-scan subset test.
    pub fn is_subset(&self, other: &KeywordSet) -> bool {
        let mut it = other.0.iter();
        'outer: for x in &self.0 {
            for y in it.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &KeywordSet) -> KeywordSet {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        KeywordSet(out)
    }

    pub fn intersection(&self, other: &KeywordSet) -> KeywordSet {
        KeywordSet(self.0.iter().copied().filter(|id| other.contains(*id)).collect())
    }

    /// Size of the union without allocating it.
    pub fn union_len(&self, other: &KeywordSet) -> usize {
        self.0.len() + other.0.iter().filter(|id| !self.contains(**id)).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = KeywordId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<KeywordId> for KeywordSet {
    fn from_iter<I: IntoIterator<Item = KeywordId>>(iter: I) -> Self {
        KeywordSet::from_ids(iter)
    }
}

/// Packed bit row of a keyword set, `words_per_row` u64 words wide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeywordMask(Vec<u64>);

impl KeywordMask {
    /// True if every bit of `self` is set in `row`.
    #[inline]
    pub fn is_within(&self, row: &[u64]) -> bool {
        self.0.iter().zip(row).all(|(m, r)| m & !r == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
}

/// Immutable attributed bipartite graph in CSR form.
#[derive(Clone, Debug)]
pub struct AttributedBipartiteGraph {
    upper_offsets: Vec<usize>,
    upper_adj: Vec<u32>,
    lower_offsets: Vec<usize>,
    lower_adj: Vec<u32>,
    upper_keywords: Vec<KeywordSet>,
    lower_keywords: Vec<KeywordSet>,
    upper_rows: Vec<u64>,
    lower_rows: Vec<u64>,
    row_words: usize,
    keywords: KeywordTable,
    upper_labels: Vec<String>,
    lower_labels: Vec<String>,
    upper_by_label: HashMap<String, u32>,
    lower_by_label: HashMap<String, u32>,
}

/// Degree statistics, used for reporting only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub upper_count: usize,
    pub lower_count: usize,
    pub edge_count: usize,
    pub max_upper_degree: usize,
    pub max_lower_degree: usize,
}

fn csr(n: usize, pairs: impl Iterator<Item = (u32, u32)>) -> (Vec<usize>, Vec<u32>) {
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (a, b) in pairs {
        buckets[a as usize].push(b);
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut adj = Vec::new();
    offsets.push(0);
    for mut b in buckets {
        b.sort_unstable();
        b.dedup();
        adj.extend_from_slice(&b);
        offsets.push(adj.len());
    }
    (offsets, adj)
}

impl AttributedBipartiteGraph {
    /// Build a graph from dense parts. Edges are `(upper, lower)` index pairs
    /// and are deduplicated. Labels default to 1-based decimal indices.
    pub fn from_parts(
        upper_count: usize,
        lower_count: usize,
        edges: &[(u32, u32)],
        upper_keywords: Vec<KeywordSet>,
        lower_keywords: Vec<KeywordSet>,
        keywords: KeywordTable,
        labels: Option<(Vec<String>, Vec<String>)>,
    ) -> Result<Self> {
        if upper_keywords.len() != upper_count || lower_keywords.len() != lower_count {
            return Err(Error::InvalidGraph(
                "keyword set count does not match layer size".into(),
            ));
        }
        for &(u, v) in edges {
            if u as usize >= upper_count || v as usize >= lower_count {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range")));
            }
        }
        for set in upper_keywords.iter().chain(&lower_keywords) {
            if let Some(last) = set.ids().last() {
                if last.0 as usize >= keywords.len() {
                    return Err(Error::InvalidGraph(format!(
                        "keyword id {} not in table",
                        last.0
                    )));
                }
            }
        }
        let (upper_labels, lower_labels) = match labels {
            Some((u, l)) => {
                if u.len() != upper_count || l.len() != lower_count {
                    return Err(Error::InvalidGraph("label count mismatch".into()));
                }
                (u, l)
            }
            None => (
                (1..=upper_count).map(|i| i.to_string()).collect(),
                (1..=lower_count).map(|i| i.to_string()).collect(),
            ),
        };
        let upper_by_label = index_labels(&upper_labels, Layer::Upper)?;
        let lower_by_label = index_labels(&lower_labels, Layer::Lower)?;

        let (upper_offsets, upper_adj) = csr(upper_count, edges.iter().copied());
        let (lower_offsets, lower_adj) = csr(lower_count, edges.iter().map(|&(u, v)| (v, u)));

        let row_words = keywords.len().div_ceil(64).max(1);
        let pack = |sets: &[KeywordSet]| {
            let mut rows = vec![0u64; sets.len() * row_words];
            for (i, s) in sets.iter().enumerate() {
                for id in s.iter() {
                    rows[i * row_words + id.0 as usize / 64] |= 1 << (id.0 % 64);
                }
            }
            rows
        };
        let upper_rows = pack(&upper_keywords);
        let lower_rows = pack(&lower_keywords);

        Ok(AttributedBipartiteGraph {
            upper_offsets,
            upper_adj,
            lower_offsets,
            lower_adj,
            upper_keywords,
            lower_keywords,
            upper_rows,
            lower_rows,
            row_words,
            keywords,
            upper_labels,
            lower_labels,
            upper_by_label,
            lower_by_label,
        })
    }

    pub fn upper_count(&self) -> usize {
        self.upper_keywords.len()
    }

    pub fn lower_count(&self) -> usize {
        self.lower_keywords.len()
    }

    pub fn layer_count(&self, layer: Layer) -> usize {
        match layer {
            Layer::Upper => self.upper_count(),
            Layer::Lower => self.lower_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.upper_adj.len()
    }

    /// Lower neighbours of upper vertex `u`, sorted.
    #[inline]
    pub fn upper_neighbors(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.upper_adj[self.upper_offsets[u]..self.upper_offsets[u + 1]]
    }

    /// Upper neighbours of lower vertex `v`, sorted.
    #[inline]
    pub fn lower_neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.lower_adj[self.lower_offsets[v]..self.lower_offsets[v + 1]]
    }

    /// Neighbour indices of `x`; they live in the other layer.
    #[inline]
    pub fn neighbors(&self, x: VertexRef) -> &[u32] {
        match x.layer {
            Layer::Upper => self.upper_neighbors(x.index),
            Layer::Lower => self.lower_neighbors(x.index),
        }
    }

    pub fn degree(&self, x: VertexRef) -> usize {
        self.neighbors(x).len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.upper_neighbors(u).binary_search(&v).is_ok()
    }

    pub fn contains_vertex(&self, x: VertexRef) -> bool {
        (x.index as usize) < self.layer_count(x.layer)
    }

    pub fn keywords(&self, x: VertexRef) -> &KeywordSet {
        match x.layer {
            Layer::Upper => &self.upper_keywords[x.index as usize],
            Layer::Lower => &self.lower_keywords[x.index as usize],
        }
    }

    pub fn upper_keywords(&self) -> &[KeywordSet] {
        &self.upper_keywords
    }

    pub fn lower_keywords(&self) -> &[KeywordSet] {
        &self.lower_keywords
    }

    pub fn keyword_table(&self) -> &KeywordTable {
        &self.keywords
    }

    /// Compile a keyword set into a bit row comparable with vertex rows.
    pub fn keyword_mask(&self, set: &KeywordSet) -> KeywordMask {
        let mut words = vec![0u64; self.row_words];
        for id in set.iter() {
            words[id.0 as usize / 64] |= 1 << (id.0 % 64);
        }
        KeywordMask(words)
    }

    #[inline]
    pub fn upper_has(&self, u: u32, mask: &KeywordMask) -> bool {
        let start = u as usize * self.row_words;
        mask.is_within(&self.upper_rows[start..start + self.row_words])
    }

    #[inline]
    pub fn lower_has(&self, v: u32, mask: &KeywordMask) -> bool {
        let start = v as usize * self.row_words;
        mask.is_within(&self.lower_rows[start..start + self.row_words])
    }

    pub fn label(&self, x: VertexRef) -> &str {
        match x.layer {
            Layer::Upper => &self.upper_labels[x.index as usize],
            Layer::Lower => &self.lower_labels[x.index as usize],
        }
    }

    pub fn labels(&self, layer: Layer) -> &[String] {
        match layer {
            Layer::Upper => &self.upper_labels,
            Layer::Lower => &self.lower_labels,
        }
    }

    pub fn find(&self, layer: Layer, label: &str) -> Option<VertexRef> {
        let map = match layer {
            Layer::Upper => &self.upper_by_label,
            Layer::Lower => &self.lower_by_label,
        };
        map.get(label).map(|&index| VertexRef { layer, index })
    }

    /// Resolve a list of keyword strings against the table. Unknown words
    /// yield `None`.
    pub fn keyword_set<'a, I: IntoIterator<Item = &'a str>>(&self, words: I) -> Option<KeywordSet> {
        words
            .into_iter()
            .map(|w| self.keywords.get(w))
            .collect::<Option<Vec<_>>>()
            .map(KeywordSet::from_ids)
    }

    pub fn keyword_words(&self, set: &KeywordSet) -> Vec<String> {
        set.iter().map(|id| self.keywords.word(id).to_owned()).collect()
    }

    /// Every `(upper, lower)` edge in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.upper_count() as u32)
            .flat_map(move |u| self.upper_neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn stats(&self) -> GraphStats {
        let max_deg = |offsets: &[usize]| offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        GraphStats {
            upper_count: self.upper_count(),
            lower_count: self.lower_count(),
            edge_count: self.edge_count(),
            max_upper_degree: max_deg(&self.upper_offsets),
            max_lower_degree: max_deg(&self.lower_offsets),
        }
    }
}

fn index_labels(labels: &[String], layer: Layer) -> Result<HashMap<String, u32>> {
    let mut map = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if map.insert(l.clone(), i as u32).is_some() {
            return Err(Error::InvalidGraph(format!("duplicate {layer:?} label {l:?}")));
        }
    }
    Ok(map)
}

/// Sort key placing all-integer label sets in numeric order.
pub(crate) fn label_order(labels: &mut [String]) {
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
    } else {
        labels.sort();
    }
}

/// Label-level builder. Vertices are created on first mention and assigned
/// dense ids in label order when the graph is built.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    keywords: KeywordTable,
    upper: HashMap<String, Vec<KeywordId>>,
    lower: HashMap<String, Vec<KeywordId>>,
    edges: Vec<(String, String)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, word: &str) -> KeywordId {
        self.keywords.intern(word)
    }

    pub fn add_vertex(&mut self, layer: Layer, label: &str) -> &mut Self {
        self.layer_map(layer).entry(label.to_owned()).or_default();
        self
    }

    pub fn has_vertex(&self, layer: Layer, label: &str) -> bool {
        match layer {
            Layer::Upper => self.upper.contains_key(label),
            Layer::Lower => self.lower.contains_key(label),
        }
    }

    pub fn add_edge(&mut self, upper: &str, lower: &str) -> &mut Self {
        self.add_vertex(Layer::Upper, upper);
        self.add_vertex(Layer::Lower, lower);
        self.edges.push((upper.to_owned(), lower.to_owned()));
        self
    }

    /// Append keywords to a vertex, creating it if needed.
    pub fn add_keywords<'a, I: IntoIterator<Item = &'a str>>(
        &mut self,
        layer: Layer,
        label: &str,
        words: I,
    ) -> &mut Self {
        let ids: Vec<KeywordId> = words.into_iter().map(|w| self.keywords.intern(w)).collect();
        self.layer_map(layer).entry(label.to_owned()).or_default().extend(ids);
        self
    }

    fn layer_map(&mut self, layer: Layer) -> &mut HashMap<String, Vec<KeywordId>> {
        match layer {
            Layer::Upper => &mut self.upper,
            Layer::Lower => &mut self.lower,
        }
    }

    pub fn build(self) -> Result<AttributedBipartiteGraph> {
        let mut upper_labels: Vec<String> = self.upper.keys().cloned().collect();
        let mut lower_labels: Vec<String> = self.lower.keys().cloned().collect();
        label_order(&mut upper_labels);
        label_order(&mut lower_labels);
        let uidx: HashMap<&str, u32> =
            upper_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as u32)).collect();
        let lidx: HashMap<&str, u32> =
            lower_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i as u32)).collect();
        let edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|(u, v)| (uidx[u.as_str()], lidx[v.as_str()]))
            .collect();
        let upper_kw = upper_labels
            .iter()
            .map(|l| KeywordSet::from_ids(self.upper[l].iter().copied()))
            .collect();
        let lower_kw = lower_labels
            .iter()
            .map(|l| KeywordSet::from_ids(self.lower[l].iter().copied()))
            .collect();
        AttributedBipartiteGraph::from_parts(
            upper_labels.len(),
            lower_labels.len(),
            &edges,
            upper_kw,
            lower_kw,
            self.keywords,
            Some((upper_labels, lower_labels)),
        )
    }
}

/// A restriction of the graph: which vertices and edges are alive.
pub trait Scope {
    fn upper_alive(&self, u: u32) -> bool;
    fn lower_alive(&self, v: u32) -> bool;
    #[inline]
    fn edge_alive(&self, _u: u32, _v: u32) -> bool {
        true
    }

    #[inline]
    fn alive(&self, x: VertexRef) -> bool {
        match x.layer {
            Layer::Upper => self.upper_alive(x.index),
            Layer::Lower => self.lower_alive(x.index),
        }
    }
}

/// Vertex/edge liveness view over a graph. Cloning is a bitset copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphMask {
    upper: FixedBitSet,
    lower: FixedBitSet,
    removed_edges: HashSet<(u32, u32)>,
}

impl SubgraphMask {
    pub fn full(g: &AttributedBipartiteGraph) -> Self {
        let mut upper = FixedBitSet::with_capacity(g.upper_count());
        let mut lower = FixedBitSet::with_capacity(g.lower_count());
        upper.insert_range(..);
        lower.insert_range(..);
        SubgraphMask { upper, lower, removed_edges: HashSet::new() }
    }

    pub fn empty(g: &AttributedBipartiteGraph) -> Self {
        SubgraphMask {
            upper: FixedBitSet::with_capacity(g.upper_count()),
            lower: FixedBitSet::with_capacity(g.lower_count()),
            removed_edges: HashSet::new(),
        }
    }

    pub fn from_vertices(g: &AttributedBipartiteGraph, upper: &[u32], lower: &[u32]) -> Self {
        let mut m = Self::empty(g);
        for &u in upper {
            m.upper.insert(u as usize);
        }
        for &v in lower {
            m.lower.insert(v as usize);
        }
        m
    }

    pub fn contains(&self, x: VertexRef) -> bool {
        match x.layer {
            Layer::Upper => self.upper.contains(x.index as usize),
            Layer::Lower => self.lower.contains(x.index as usize),
        }
    }

    pub fn insert(&mut self, x: VertexRef) {
        match x.layer {
            Layer::Upper => self.upper.insert(x.index as usize),
            Layer::Lower => self.lower.insert(x.index as usize),
        }
    }

    pub fn remove(&mut self, x: VertexRef) {
        match x.layer {
            Layer::Upper => self.upper.set(x.index as usize, false),
            Layer::Lower => self.lower.set(x.index as usize, false),
        }
    }

    pub fn remove_edge(&mut self, u: u32, v: u32) {
        self.removed_edges.insert((u, v));
    }

    pub fn removed_edges(&self) -> &HashSet<(u32, u32)> {
        &self.removed_edges
    }

    pub fn upper_len(&self) -> usize {
        self.upper.count_ones(..)
    }

    pub fn lower_len(&self) -> usize {
        self.lower.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_clear() && self.lower.is_clear()
    }

    pub fn upper_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.upper.ones().map(|i| i as u32)
    }

    pub fn lower_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.lower.ones().map(|i| i as u32)
    }

    /// Layer-wise vertex intersection; removed edges are unioned.
    pub fn intersect(&self, other: &SubgraphMask) -> SubgraphMask {
        let mut upper = self.upper.clone();
        upper.intersect_with(&other.upper);
        let mut lower = self.lower.clone();
        lower.intersect_with(&other.lower);
        let removed_edges = self.removed_edges.union(&other.removed_edges).copied().collect();
        SubgraphMask { upper, lower, removed_edges }
    }

    /// Vertex-set containment, layer by layer.
    pub fn is_subset(&self, other: &SubgraphMask) -> bool {
        self.upper.is_subset(&other.upper) && self.lower.is_subset(&other.lower)
    }
}

impl Scope for SubgraphMask {
    #[inline]
    fn upper_alive(&self, u: u32) -> bool {
        self.upper.contains(u as usize)
    }

    #[inline]
    fn lower_alive(&self, v: u32) -> bool {
        self.lower.contains(v as usize)
    }

    #[inline]
    fn edge_alive(&self, u: u32, v: u32) -> bool {
        self.removed_edges.is_empty() || !self.removed_edges.contains(&(u, v))
    }
}

/// Vertices containing a pair of keyword sets, evaluated lazily. Equivalent to
/// the subgraph induced on the support lists of the two sets, optionally
/// intersected with a mask.
pub struct KeywordScope<'g> {
    graph: &'g AttributedBipartiteGraph,
    upper: KeywordMask,
    lower: KeywordMask,
    within: Option<&'g SubgraphMask>,
}

impl<'g> KeywordScope<'g> {
    pub fn new(graph: &'g AttributedBipartiteGraph, upper: &KeywordSet, lower: &KeywordSet) -> Self {
        KeywordScope { graph, upper: graph.keyword_mask(upper), lower: graph.keyword_mask(lower), within: None }
    }

    /// Also require membership in `mask`.
    pub fn within(mut self, mask: &'g SubgraphMask) -> Self {
        self.within = Some(mask);
        self
    }
}

impl Scope for KeywordScope<'_> {
    #[inline]
    fn upper_alive(&self, u: u32) -> bool {
        self.within.is_none_or(|m| m.upper_alive(u)) && self.graph.upper_has(u, &self.upper)
    }

    #[inline]
    fn lower_alive(&self, v: u32) -> bool {
        self.within.is_none_or(|m| m.lower_alive(v)) && self.graph.lower_has(v, &self.lower)
    }
}

/// Number of live, non-removed edges at `x`. A dead `x` has degree 0.
pub fn effective_degree<S: Scope>(g: &AttributedBipartiteGraph, scope: &S, x: VertexRef) -> usize {
    debug_assert!(scope.alive(x), "effective_degree queried on dead vertex {x}");
    if !scope.alive(x) {
        return 0;
    }
    match x.layer {
        Layer::Upper => g
            .upper_neighbors(x.index)
            .iter()
            .filter(|&&v| scope.lower_alive(v) && scope.edge_alive(x.index, v))
            .count(),
        Layer::Lower => g
            .lower_neighbors(x.index)
            .iter()
            .filter(|&&u| scope.upper_alive(u) && scope.edge_alive(u, x.index))
            .count(),
    }
}

/// Mask of vertices whose keyword sets contain `upper` (upper layer) and
/// `lower` (lower layer). Empty sets impose no constraint.
pub fn keyword_filtered_mask(
    g: &AttributedBipartiteGraph,
    upper: &KeywordSet,
    lower: &KeywordSet,
) -> SubgraphMask {
    let mut mask = SubgraphMask::empty(g);
    let um = g.keyword_mask(upper);
    let lm = g.keyword_mask(lower);
    for u in 0..g.upper_count() as u32 {
        if g.upper_has(u, &um) {
            mask.upper.insert(u as usize);
        }
    }
    for v in 0..g.lower_count() as u32 {
        if g.lower_has(v, &lm) {
            mask.lower.insert(v as usize);
        }
    }
    mask
}

/// The connected component of `q` within `mask`, or the empty mask if `q`
/// is dead. Removed edges carry over.
pub fn connected_component_of(
    g: &AttributedBipartiteGraph,
    mask: &SubgraphMask,
    q: VertexRef,
) -> SubgraphMask {
    let mut out = SubgraphMask::empty(g);
    if !g.contains_vertex(q) || !mask.contains(q) {
        return out;
    }
    out.removed_edges = mask.removed_edges.clone();
    let mut queue = VecDeque::new();
    out.insert(q);
    queue.push_back(q);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            let (yref, u, v) = match x.layer {
                Layer::Upper => (VertexRef::lower(y), x.index, y),
                Layer::Lower => (VertexRef::upper(y), y, x.index),
            };
            if mask.contains(yref) && mask.edge_alive(u, v) && !out.contains(yref) {
                out.insert(yref);
                queue.push_back(yref);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AttributedBipartiteGraph {
        let mut b = GraphBuilder::new();
        b.add_edge("1", "1").add_edge("1", "2").add_edge("1", "3").add_edge("2", "1");
        b.add_keywords(Layer::Upper, "1", ["a", "b"]);
        b.add_keywords(Layer::Upper, "2", ["b"]);
        b.add_keywords(Layer::Lower, "1", ["x"]);
        b.build().unwrap()
    }

    #[test]
    fn intern_is_idempotent_and_injective() {
        let mut t = KeywordTable::new();
        let a = t.intern("drama");
        assert_eq!(t.intern("drama"), a);
        let b = t.intern("romance");
        assert_ne!(a, b);
    }

    #[test]
    fn intern_assigns_first_seen_order() {
        let mut t = KeywordTable::new();
        let ids: Vec<u32> = ["a", "b", "c", "w", "x", "y", "b"].iter().map(|w| t.intern(w).0).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4, 5, 1]);
    }

    #[test]
    fn degrees_under_masks() {
        let g = small();
        let u1 = g.find(Layer::Upper, "1").unwrap();
        let full = SubgraphMask::full(&g);
        assert_eq!(effective_degree(&g, &full, u1), 3);
        let mut m = full.clone();
        m.remove(g.find(Layer::Lower, "2").unwrap());
        assert_eq!(effective_degree(&g, &m, u1), 2);
        m.remove_edge(0, 0);
        assert_eq!(effective_degree(&g, &m, u1), 1);
    }

    #[test]
    fn degree_sums_match() {
        let g = small();
        let m = SubgraphMask::full(&g);
        let su: usize = (0..g.upper_count() as u32).map(|u| effective_degree(&g, &m, VertexRef::upper(u))).sum();
        let sl: usize = (0..g.lower_count() as u32).map(|v| effective_degree(&g, &m, VertexRef::lower(v))).sum();
        assert_eq!(su, g.edge_count());
        assert_eq!(sl, g.edge_count());
    }

    #[test]
    fn empty_constraint_keeps_everything() {
        let g = small();
        let m = keyword_filtered_mask(&g, &KeywordSet::new(), &KeywordSet::new());
        assert_eq!(m, SubgraphMask::full(&g));
    }

    #[test]
    fn keyword_filter_is_exact() {
        let g = small();
        let b = g.keyword_set(["b"]).unwrap();
        let m = keyword_filtered_mask(&g, &b, &KeywordSet::new());
        assert_eq!(m.upper_len(), 2);
        let ab = g.keyword_set(["a", "b"]).unwrap();
        let m = keyword_filtered_mask(&g, &ab, &KeywordSet::new());
        assert_eq!(m.upper_vertices().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn component_of_dead_vertex_is_empty() {
        let g = small();
        let mut m = SubgraphMask::full(&g);
        m.remove(VertexRef::upper(0));
        assert!(connected_component_of(&g, &m, VertexRef::upper(0)).is_empty());
    }

    #[test]
    fn subset_and_union() {
        let s = |v: &[u32]| KeywordSet::from_ids(v.iter().map(|&i| KeywordId(i)));
        assert!(s(&[1, 3]).is_subset(&s(&[0, 1, 2, 3])));
        assert!(!s(&[1, 4]).is_subset(&s(&[0, 1, 2, 3])));
        assert!(s(&[]).is_subset(&s(&[])));
        assert_eq!(s(&[1, 3]).union(&s(&[2, 3])), s(&[1, 2, 3]));
        assert_eq!(s(&[1, 3]).union_len(&s(&[2, 3])), 3);
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let mut b = GraphBuilder::new();
        b.add_edge("10", "2").add_edge("9", "1");
        let g = b.build().unwrap();
        assert_eq!(g.labels(Layer::Upper), &["9".to_string(), "10".to_string()]);
    }
}
