//! File formats, synthetic attributes and samplers.
//!
//! Edge lists follow the KONECT `out.*` convention: one `upper lower` pair per
//! line, `%` comment lines, extra columns (weights, timestamps) ignored. Ids
//! are opaque tokens; KONECT uses positive integers. Attribute files hold one
//! vertex per line as `<id>\t<kw1>,<kw2>,...`, one file per layer.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedBipartiteGraph, GraphBuilder, KeywordId, KeywordSet, KeywordTable, Layer, VertexRef};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_owned(), source })
}

fn layer_name(layer: Layer) -> &'static str {
    match layer {
        Layer::Upper => "upper",
        Layer::Lower => "lower",
    }
}

/// Add the edges of an edge-list text to `b`.
pub fn parse_edge_list(b: &mut GraphBuilder, text: &str, path: &Path) -> Result<()> {
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        match (cols.next(), cols.next()) {
            (Some(u), Some(v)) => {
                b.add_edge(u, v);
            }
            _ => {
                return Err(Error::Parse {
                    path: path.to_owned(),
                    line: i + 1,
                    msg: format!("expected two vertex ids, got {line:?}"),
                })
            }
        }
    }
    Ok(())
}

/// Add the keyword lines of an attribute file to `b`. With `declare` unset,
/// ids must already exist in the builder.
pub fn parse_attributes(b: &mut GraphBuilder, layer: Layer, text: &str, path: &Path, declare: bool) -> Result<()> {
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() || raw.starts_with('%') {
            continue;
        }
        let (id, rest) = match raw.split_once('\t') {
            Some((id, rest)) => (id.trim(), rest),
            None => (raw.trim(), ""),
        };
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: i + 1,
                msg: format!("expected \"<id>\\t<keywords>\", got {raw:?}"),
            });
        }
        if !declare && !b.has_vertex(layer, id) {
            return Err(Error::UnknownVertex { path: path.to_owned(), layer: layer_name(layer), id: id.to_owned() });
        }
        let words = rest.split(',').map(str::trim).filter(|w| !w.is_empty());
        b.add_keywords(layer, id, words);
    }
    Ok(())
}

fn load(edges: &Path, attrs_u: Option<&Path>, attrs_v: Option<&Path>, declare: bool) -> Result<AttributedBipartiteGraph> {
    let mut b = GraphBuilder::new();
    parse_edge_list(&mut b, &read(edges)?, edges)?;
    if let Some(p) = attrs_u {
        parse_attributes(&mut b, Layer::Upper, &read(p)?, p, declare)?;
    }
    if let Some(p) = attrs_v {
        parse_attributes(&mut b, Layer::Lower, &read(p)?, p, declare)?;
    }
    b.build()
}

/// Load an edge list plus optional attribute files. Vertices missing from
/// the attribute files get empty keyword sets; attribute lines naming a
/// vertex absent from the edge list are an error.
pub fn load_graph(edges: &Path, attrs_u: Option<&Path>, attrs_v: Option<&Path>) -> Result<AttributedBipartiteGraph> {
    load(edges, attrs_u, attrs_v, false)
}

/// Paths of the three files making up a serialized graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFiles {
    pub edges: PathBuf,
    pub attrs_u: PathBuf,
    pub attrs_v: PathBuf,
}

impl GraphFiles {
    /// `<dir>/<stem>.edges`, `<stem>.attrs_u`, `<stem>.attrs_v`.
    pub fn in_dir(dir: &Path, stem: &str) -> Self {
        GraphFiles {
            edges: dir.join(format!("{stem}.edges")),
            attrs_u: dir.join(format!("{stem}.attrs_u")),
            attrs_v: dir.join(format!("{stem}.attrs_v")),
        }
    }
}

/// Read a graph written by [`write_graph`]. Attribute files list every
/// vertex, so isolated vertices survive the round trip.
pub fn read_graph(files: &GraphFiles) -> Result<AttributedBipartiteGraph> {
    load(&files.edges, Some(&files.attrs_u), Some(&files.attrs_v), true)
}

pub fn edge_list_text(g: &AttributedBipartiteGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "% bip unweighted");
    let _ = writeln!(s, "% {} {} {}", g.edge_count(), g.upper_count(), g.lower_count());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{} {}", g.label(VertexRef::upper(u)), g.label(VertexRef::lower(v)));
    }
    s
}

pub fn attributes_text(g: &AttributedBipartiteGraph, layer: Layer) -> String {
    let mut s = String::new();
    for i in 0..g.layer_count(layer) as u32 {
        let x = VertexRef { layer, index: i };
        let mut words = g.keyword_words(g.keywords(x));
        words.sort();
        let _ = writeln!(s, "{}\t{}", g.label(x), words.join(","));
    }
    s
}

pub fn write_graph(g: &AttributedBipartiteGraph, files: &GraphFiles) -> Result<()> {
    write(&files.edges, &edge_list_text(g))?;
    write(&files.attrs_u, &attributes_text(g, Layer::Upper))?;
    write(&files.attrs_v, &attributes_text(g, Layer::Lower))
}

/// Per-vertex random keywords, drawn from disjoint per-layer vocabularies
/// named `u0..` and `v0..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticAttrConfig {
    pub min_per_vertex: usize,
    pub max_per_vertex: usize,
    pub vocab_size_upper: usize,
    pub vocab_size_lower: usize,
    pub seed: u64,
}

impl Default for SyntheticAttrConfig {
    fn default() -> Self {
        SyntheticAttrConfig { min_per_vertex: 8, max_per_vertex: 13, vocab_size_upper: 20, vocab_size_lower: 20, seed: 0 }
    }
}

impl SyntheticAttrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_per_vertex > self.max_per_vertex {
            return Err(Error::InvalidConfig(format!(
                "min keywords per vertex ({}) exceeds max ({})",
                self.min_per_vertex, self.max_per_vertex
            )));
        }
        if self.vocab_size_upper < self.max_per_vertex || self.vocab_size_lower < self.max_per_vertex {
            return Err(Error::InvalidConfig(format!(
                "vocabulary sizes ({}, {}) must be at least the max keywords per vertex ({})",
                self.vocab_size_upper, self.vocab_size_lower, self.max_per_vertex
            )));
        }
        Ok(())
    }
}

fn layer_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Replace every keyword set with a fresh random one: `k` uniform in
/// `[min, max]`, drawn without replacement from the layer's vocabulary.
pub fn generate_attributes(g: &AttributedBipartiteGraph, cfg: &SyntheticAttrConfig) -> Result<AttributedBipartiteGraph> {
    cfg.validate()?;
    let mut table = KeywordTable::new();
    let upper_vocab: Vec<KeywordId> = (0..cfg.vocab_size_upper).map(|i| table.intern(&format!("u{i}"))).collect();
    let lower_vocab: Vec<KeywordId> = (0..cfg.vocab_size_lower).map(|i| table.intern(&format!("v{i}"))).collect();
    let draw = |n: usize, vocab: &[KeywordId], rng: &mut ChaCha8Rng| -> Vec<KeywordSet> {
        (0..n)
            .map(|_| {
                let k = rng.gen_range(cfg.min_per_vertex..=cfg.max_per_vertex);
                KeywordSet::from_ids(sample(rng, vocab.len(), k).into_iter().map(|i| vocab[i]))
            })
            .collect()
    };
    let upper = draw(g.upper_count(), &upper_vocab, &mut layer_rng(cfg.seed, 1));
    let lower = draw(g.lower_count(), &lower_vocab, &mut layer_rng(cfg.seed, 2));
    rebuild(g, None, upper, lower, table)
}

fn rebuild(
    g: &AttributedBipartiteGraph,
    keep: Option<(&[u32], &[u32])>,
    upper_kw: Vec<KeywordSet>,
    lower_kw: Vec<KeywordSet>,
    table: KeywordTable,
) -> Result<AttributedBipartiteGraph> {
    match keep {
        None => {
            let edges: Vec<(u32, u32)> = g.edges().collect();
            AttributedBipartiteGraph::from_parts(
                g.upper_count(),
                g.lower_count(),
                &edges,
                upper_kw,
                lower_kw,
                table,
                Some((g.labels(Layer::Upper).to_vec(), g.labels(Layer::Lower).to_vec())),
            )
        }
        Some((us, vs)) => {
            let mut new_u = vec![u32::MAX; g.upper_count()];
            let mut new_v = vec![u32::MAX; g.lower_count()];
            for (i, &u) in us.iter().enumerate() {
                new_u[u as usize] = i as u32;
            }
            for (i, &v) in vs.iter().enumerate() {
                new_v[v as usize] = i as u32;
            }
            let edges: Vec<(u32, u32)> = g
                .edges()
                .filter(|&(u, v)| new_u[u as usize] != u32::MAX && new_v[v as usize] != u32::MAX)
                .map(|(u, v)| (new_u[u as usize], new_v[v as usize]))
                .collect();
            let ul = us.iter().map(|&u| g.label(VertexRef::upper(u)).to_owned()).collect();
            let ll = vs.iter().map(|&v| g.label(VertexRef::lower(v)).to_owned()).collect();
            AttributedBipartiteGraph::from_parts(us.len(), vs.len(), &edges, upper_kw, lower_kw, table, Some((ul, ll)))
        }
    }
}

fn check_fraction(f: f64) -> Result<()> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidConfig(format!("fraction {f} must lie in (0, 1]")));
    }
    Ok(())
}

/// `ceil(f * n)` without float noise pushing exact products up.
pub(crate) fn ceil_fraction(f: f64, n: usize) -> usize {
    ((f * n as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Induced subgraph on `round(f * n)` uniformly sampled vertices of each
/// layer, sampled independently. Labels and keywords are kept; dense ids are
/// reassigned preserving relative order.
pub fn sample_subgraph(g: &AttributedBipartiteGraph, fraction: f64, seed: u64) -> Result<AttributedBipartiteGraph> {
    check_fraction(fraction)?;
    let pick = |n: usize, stream: u64| -> Vec<u32> {
        let k = (fraction * n as f64).round() as usize;
        let mut v: Vec<u32> = sample(&mut layer_rng(seed, stream), n, k.min(n)).into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        v
    };
    let us = pick(g.upper_count(), 1);
    let vs = pick(g.lower_count(), 2);
    let ukw = us.iter().map(|&u| g.keywords(VertexRef::upper(u)).clone()).collect();
    let vkw = vs.iter().map(|&v| g.keywords(VertexRef::lower(v)).clone()).collect();
    rebuild(g, Some((&us, &vs)), ukw, vkw, g.keyword_table().clone())
}

/// Each vertex keeps a random `ceil(f * |W(x)|)`-subset of its keywords.
pub fn sample_keywords(g: &AttributedBipartiteGraph, fraction: f64, seed: u64) -> Result<AttributedBipartiteGraph> {
    check_fraction(fraction)?;
    let thin = |sets: &[KeywordSet], stream: u64| -> Vec<KeywordSet> {
        let mut rng = layer_rng(seed, stream);
        sets.iter()
            .map(|s| {
                let k = ceil_fraction(fraction, s.len());
                KeywordSet::from_ids(sample(&mut rng, s.len(), k).into_iter().map(|i| s.ids()[i]))
            })
            .collect()
    };
    let upper = thin(g.upper_keywords(), 3);
    let lower = thin(g.lower_keywords(), 4);
    rebuild(g, None, upper, lower, g.keyword_table().clone())
}

/// Uniform random bipartite graph with exactly `m` distinct edges (capped at
/// `n_u * n_v`) and no keywords.
pub fn random_bipartite(n_u: usize, n_v: usize, m: usize, seed: u64) -> Result<AttributedBipartiteGraph> {
    let m = m.min(n_u * n_v);
    let mut rng = layer_rng(seed, 5);
    let mut set: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    while set.len() < m {
        set.insert((rng.gen_range(0..n_u as u32), rng.gen_range(0..n_v as u32)));
    }
    bare(n_u, n_v, set)
}

/// Random bipartite graph with skewed degrees: each edge joins the `i`-th
/// upper and `j`-th lower vertex with probability proportional to
/// `(i+1)^-e * (j+1)^-e`, duplicates redrawn, until `m` distinct edges
/// exist. `e = 0` is uniform; larger `e` concentrates edges on a few hubs.
/// `m` may be at most half of `n_u * n_v`.
pub fn skewed_bipartite(n_u: usize, n_v: usize, m: usize, exponent: f64, seed: u64) -> Result<AttributedBipartiteGraph> {
    if !(exponent.is_finite() && exponent >= 0.0) {
        return Err(Error::InvalidConfig(format!("exponent {exponent} must be finite and non-negative")));
    }
    if 2 * m > n_u * n_v {
        return Err(Error::InvalidConfig(format!("{m} edges is too dense for {n_u} x {n_v} vertices")));
    }
    if m == 0 {
        return bare(n_u, n_v, HashSet::new());
    }
    let weights = |n: usize| WeightedIndex::new((1..=n).map(|i| (i as f64).powf(-exponent))).expect("positive weights");
    let (wu, wv) = (weights(n_u), weights(n_v));
    let mut rng = layer_rng(seed, 6);
    let mut set: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    while set.len() < m {
        set.insert((wu.sample(&mut rng) as u32, wv.sample(&mut rng) as u32));
    }
    bare(n_u, n_v, set)
}

fn bare(n_u: usize, n_v: usize, set: HashSet<(u32, u32)>) -> Result<AttributedBipartiteGraph> {
    let mut edges: Vec<(u32, u32)> = set.into_iter().collect();
    edges.sort_unstable();
    AttributedBipartiteGraph::from_parts(
        n_u,
        n_v,
        &edges,
        vec![KeywordSet::new(); n_u],
        vec![KeywordSet::new(); n_v],
        KeywordTable::new(),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<AttributedBipartiteGraph> {
        let mut b = GraphBuilder::new();
        parse_edge_list(&mut b, text, Path::new("mem"))?;
        b.build()
    }

    #[test]
    fn counts_two_lines() {
        let g = parse("1 1\n1 2").unwrap();
        assert_eq!((g.upper_count(), g.lower_count(), g.edge_count()), (1, 2, 2));
    }

    #[test]
    fn duplicate_edges_counted_once() {
        let g = parse("% comment\n1 1\n1 1\n1 2 5 1234\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("1 1\n7\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_attribute_vertex_is_named() {
        let mut b = GraphBuilder::new();
        parse_edge_list(&mut b, "1 1\n", Path::new("e")).unwrap();
        let err = parse_attributes(&mut b, Layer::Upper, "42\ta,b\n", Path::new("a"), false).unwrap_err();
        assert!(err.to_string().contains("\"42\""), "{err}");
    }

    #[test]
    fn attribute_keywords_dedup() {
        let mut b = GraphBuilder::new();
        parse_edge_list(&mut b, "1 1\n", Path::new("e")).unwrap();
        parse_attributes(&mut b, Layer::Upper, "1\ta, b,a\n", Path::new("a"), false).unwrap();
        let g = b.build().unwrap();
        assert_eq!(g.keywords(VertexRef::upper(0)).len(), 2);
    }

    #[test]
    fn forced_single_keyword() {
        let g = random_bipartite(5, 5, 10, 1).unwrap();
        let cfg = SyntheticAttrConfig { min_per_vertex: 1, max_per_vertex: 1, vocab_size_upper: 1, vocab_size_lower: 1, seed: 3 };
        let h = generate_attributes(&g, &cfg).unwrap();
        assert!(h.upper_keywords().iter().all(|s| h.keyword_words(s) == vec!["u0"]));
        assert!(h.lower_keywords().iter().all(|s| h.keyword_words(s) == vec!["v0"]));
    }

    #[test]
    fn small_vocab_rejected() {
        let g = random_bipartite(2, 2, 2, 1).unwrap();
        let cfg = SyntheticAttrConfig { vocab_size_lower: 5, ..Default::default() };
        assert!(generate_attributes(&g, &cfg).is_err());
        let cfg = SyntheticAttrConfig { min_per_vertex: 9, max_per_vertex: 8, ..Default::default() };
        assert!(generate_attributes(&g, &cfg).is_err());
    }

    #[test]
    fn ceil_fraction_is_exact_on_products() {
        assert_eq!(ceil_fraction(0.2, 10), 2);
        assert_eq!(ceil_fraction(0.6, 5), 3);
        assert_eq!(ceil_fraction(0.25, 10), 3);
        assert_eq!(ceil_fraction(1.0, 7), 7);
    }

    #[test]
    fn fractions_validated() {
        let g = random_bipartite(2, 2, 2, 1).unwrap();
        assert!(sample_subgraph(&g, 0.0, 1).is_err());
        assert!(sample_keywords(&g, 1.5, 1).is_err());
    }

    #[test]
    fn half_sample_sizes() {
        let g = random_bipartite(100, 100, 800, 7).unwrap();
        let h = sample_subgraph(&g, 0.5, 11).unwrap();
        assert_eq!((h.upper_count(), h.lower_count()), (50, 50));
    }

    #[test]
    fn full_fraction_is_identity() {
        let g = generate_attributes(&random_bipartite(30, 20, 90, 2).unwrap(), &SyntheticAttrConfig::default()).unwrap();
        let h = sample_subgraph(&g, 1.0, 5).unwrap();
        assert_eq!(edge_list_text(&g), edge_list_text(&h));
        let k = sample_keywords(&g, 1.0, 5).unwrap();
        assert_eq!(attributes_text(&g, Layer::Upper), attributes_text(&k, Layer::Upper));
        assert_eq!(attributes_text(&g, Layer::Lower), attributes_text(&k, Layer::Lower));
    }
}
