//! Result documents: the JSON schema diffed across algorithms, and a TSV
//! rendering for shell pipelines.

use serde::Serialize;

use crate::graph::{AttributedBipartiteGraph, KeywordSet, VertexRef};
use crate::search::{QueryOutcome, QuerySpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultDoc {
    pub keywords_u: Vec<String>,
    pub keywords_v: Vec<String>,
    pub vertices_u: Vec<String>,
    pub vertices_v: Vec<String>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsDoc {
    pub candidates_generated: u64,
    pub candidates_verified: u64,
    pub peels_run: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryDoc {
    pub query: String,
    pub alpha: u32,
    pub beta: u32,
    pub s: Vec<String>,
    pub algorithm: String,
    pub results: Vec<ResultDoc>,
    pub stats: StatsDoc,
}

/// Whether `elapsed_ms` carries the measured time or a fixed 0, the latter
/// giving byte-identical documents across runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Timing {
    #[default]
    Measured,
    Omitted,
}

fn words(g: &AttributedBipartiteGraph, set: &KeywordSet) -> Vec<String> {
    let mut w = g.keyword_words(set);
    w.sort();
    w
}

fn labels(g: &AttributedBipartiteGraph, xs: &[VertexRef]) -> Vec<String> {
    xs.iter().map(|&x| g.label(x).to_owned()).collect()
}

impl QueryDoc {
    pub fn new(g: &AttributedBipartiteGraph, spec: &QuerySpec, outcome: &QueryOutcome, timing: Timing) -> Self {
        let results = outcome
            .results
            .iter()
            .map(|r| ResultDoc {
                keywords_u: words(g, &r.pair.upper),
                keywords_v: words(g, &r.pair.lower),
                vertices_u: labels(g, &r.upper_vertices),
                vertices_v: labels(g, &r.lower_vertices),
                size: r.size,
            })
            .collect();
        let st = &outcome.stats;
        QueryDoc {
            query: g.label(spec.q).to_owned(),
            alpha: spec.params.alpha,
            beta: spec.params.beta,
            s: words(g, &spec.keywords),
            algorithm: spec.algorithm.name().to_owned(),
            results,
            stats: StatsDoc {
                candidates_generated: st.candidates_generated,
                candidates_verified: st.candidates_verified,
                peels_run: st.peels_run,
                elapsed_ms: match timing {
                    Timing::Measured => st.elapsed.as_secs_f64() * 1e3,
                    Timing::Omitted => 0.0,
                },
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result documents always serialize")
    }

    /// The `results` array alone: the part that must agree across algorithms.
    pub fn results_json(&self) -> String {
        serde_json::to_string(&self.results).expect("result documents always serialize")
    }

    /// Header plus one row per result; list cells are comma-joined.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("keywords_u\tkeywords_v\tvertices_u\tvertices_v\tsize\n");
        for r in &self.results {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.keywords_u.join(","),
                r.keywords_v.join(","),
                r.vertices_u.join(","),
                r.vertices_v.join(","),
                r.size
            ));
        }
        s
    }
}
