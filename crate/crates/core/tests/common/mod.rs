//! Test-only reference implementations. Nothing here calls the library's
//! peeling, candidate or search code: graphs are read back through the
//! public accessors into plain adjacency lists and everything is recomputed
//! the slow way.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use abcs::graph::{AttributedBipartiteGraph, KeywordSet, KeywordTable, Layer, VertexRef};
use abcs::ingest::load_graph;
use abcs::peel::CoreParams;
use abcs::search::{Algorithm, QueryOutcome, QuerySpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(stem: &str) -> AttributedBipartiteGraph {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    load_graph(
        &dir.join(format!("{stem}.edges")),
        Some(&dir.join(format!("{stem}.attrs_u"))),
        Some(&dir.join(format!("{stem}.attrs_v"))),
    )
    .unwrap_or_else(|e| panic!("fixture {stem}: {e}"))
}

pub fn labels(g: &AttributedBipartiteGraph, layer: Layer, ids: &[u32]) -> BTreeSet<String> {
    ids.iter().map(|&i| g.label(VertexRef { layer, index: i }).to_owned()).collect()
}

pub fn words(g: &AttributedBipartiteGraph, s: &KeywordSet) -> BTreeSet<String> {
    g.keyword_words(s).into_iter().collect()
}

pub fn set(g: &AttributedBipartiteGraph, ws: &[&str]) -> KeywordSet {
    g.keyword_set(ws.iter().copied()).expect("keywords exist")
}

/// Plain adjacency lists.
pub struct Plain {
    pub up: Vec<Vec<usize>>,
    pub low: Vec<Vec<usize>>,
}

impl Plain {
    pub fn of(g: &AttributedBipartiteGraph) -> Self {
        let mut up = vec![Vec::new(); g.upper_count()];
        let mut low = vec![Vec::new(); g.lower_count()];
        for (u, v) in g.edges() {
            up[u as usize].push(v as usize);
            low[v as usize].push(u as usize);
        }
        Plain { up, low }
    }
}

/// Delete below-threshold vertices one at a time, restarting the scan after
/// each deletion, until none is left.
pub fn brute_core(pl: &Plain, alive_u: &[bool], alive_l: &[bool], alpha: usize, beta: usize) -> (Vec<bool>, Vec<bool>) {
    let (mut au, mut al) = (alive_u.to_vec(), alive_l.to_vec());
    'outer: loop {
        for u in 0..au.len() {
            if au[u] && pl.up[u].iter().filter(|&&v| al[v]).count() < alpha {
                au[u] = false;
                continue 'outer;
            }
        }
        for v in 0..al.len() {
            if al[v] && pl.low[v].iter().filter(|&&u| au[u]).count() < beta {
                al[v] = false;
                continue 'outer;
            }
        }
        return (au, al);
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }

    fn join(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Connected components among alive vertices, via union-find. Each
/// component is (sorted upper ids, sorted lower ids); components are sorted.
pub fn components(pl: &Plain, au: &[bool], al: &[bool]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let nu = au.len();
    let mut d = Dsu((0..nu + al.len()).collect());
    for u in 0..nu {
        for &v in &pl.up[u] {
            if au[u] && al[v] {
                d.join(u, nu + v);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<u32>, Vec<u32>)> = Default::default();
    for u in (0..nu).filter(|&u| au[u]) {
        groups.entry(d.find(u)).or_default().0.push(u as u32);
    }
    for v in (0..al.len()).filter(|&v| al[v]) {
        groups.entry(d.find(nu + v)).or_default().1.push(v as u32);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

/// The community of upper vertex `q` among alive vertices, if it exists.
pub fn brute_community(pl: &Plain, au: &[bool], al: &[bool], q: u32, p: CoreParams) -> Option<(Vec<u32>, Vec<u32>)> {
    let (cu, cl) = brute_core(pl, au, al, p.alpha as usize, p.beta as usize);
    components(pl, &cu, &cl).into_iter().find(|(us, _)| us.contains(&q))
}

fn power_set(xs: &[abcs::graph::KeywordId]) -> Vec<KeywordSet> {
    (1u32..1 << xs.len())
        .map(|b| KeywordSet::from_ids((0..xs.len()).filter(|i| b >> i & 1 == 1).map(|i| xs[i])))
        .collect()
}

pub type Triple = (KeywordSet, KeywordSet, Vec<u32>, Vec<u32>);

/// Every qualified pair over `S` and the lower vocabulary, with its
/// community.
pub fn brute_qualified(g: &AttributedBipartiteGraph, q: u32, s: &KeywordSet, p: CoreParams) -> Vec<Triple> {
    let pl = Plain::of(g);
    let vocab: Vec<_> = g.lower_keywords().iter().flat_map(|w| w.iter()).collect::<BTreeSet<_>>().into_iter().collect();
    let holds = |w: &KeywordSet, s: &KeywordSet| s.iter().all(|k| w.iter().any(|x| x == k));
    let mut out = Vec::new();
    for su in power_set(s.ids()) {
        let au: Vec<bool> = g.upper_keywords().iter().map(|w| holds(w, &su)).collect();
        for sv in power_set(&vocab) {
            let al: Vec<bool> = g.lower_keywords().iter().map(|w| holds(w, &sv)).collect();
            if let Some((us, vs)) = brute_community(&pl, &au, &al, q, p) {
                out.push((su.clone(), sv, us, vs));
            }
        }
    }
    out
}

/// Maximum-size qualified triples in canonical pair order.
pub fn brute_search(g: &AttributedBipartiteGraph, q: u32, s: &KeywordSet, p: CoreParams) -> Vec<Triple> {
    let all = brute_qualified(g, q, s, p);
    let best = all.iter().map(|t| t.0.len() + t.1.len()).max().unwrap_or(0);
    let mut out: Vec<Triple> = all.into_iter().filter(|t| t.0.len() + t.1.len() == best).collect();
    out.sort();
    out
}

pub fn triples(o: &QueryOutcome) -> Vec<Triple> {
    o.results
        .iter()
        .map(|r| {
            (
                r.pair.upper.clone(),
                r.pair.lower.clone(),
                r.upper_vertices.iter().map(|x| x.index).collect(),
                r.lower_vertices.iter().map(|x| x.index).collect(),
            )
        })
        .collect()
}

/// Random attributed graph: each layer has `2..=max_layer` vertices, every
/// edge appears with probability in [0.15, 0.35], each vertex holds 0 to 4
/// keywords from a 6-word vocabulary for its layer.
pub fn random_graph(seed: u64, max_layer: usize) -> AttributedBipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = rng.gen_range(2..=max_layer);
    let nv = rng.gen_range(2..=max_layer);
    let prob = rng.gen_range(0.15..=0.35);
    let mut edges = Vec::new();
    for u in 0..nu as u32 {
        for v in 0..nv as u32 {
            if rng.gen_bool(prob) {
                edges.push((u, v));
            }
        }
    }
    let mut table = KeywordTable::new();
    let up: Vec<_> = ["a", "b", "c", "d", "e", "f"].iter().map(|w| table.intern(w)).collect();
    let low: Vec<_> = ["s", "t", "u", "v", "w", "x"].iter().map(|w| table.intern(w)).collect();
    let draw = |vocab: &[abcs::graph::KeywordId], rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(0..=4);
        KeywordSet::from_ids(vocab.choose_multiple(rng, k).copied())
    };
    let ukw: Vec<_> = (0..nu).map(|_| draw(&up, &mut rng)).collect();
    let vkw: Vec<_> = (0..nv).map(|_| draw(&low, &mut rng)).collect();
    AttributedBipartiteGraph::from_parts(nu, nv, &edges, ukw, vkw, table, None).unwrap()
}

/// A query on a random upper vertex with nonempty keywords, `S = W(q)`.
pub fn random_query(g: &AttributedBipartiteGraph, seed: u64, algorithm: Algorithm) -> Option<QuerySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let cands: Vec<u32> = (0..g.upper_count() as u32).filter(|&u| !g.keywords(VertexRef::upper(u)).is_empty()).collect();
    let q = VertexRef::upper(*cands.choose(&mut rng)?);
    let alpha = rng.gen_range(1..=3);
    let beta = rng.gen_range(1..=3);
    Some(QuerySpec::new(q, CoreParams::new(alpha, beta).unwrap(), g.keywords(q).clone(), algorithm))
}
