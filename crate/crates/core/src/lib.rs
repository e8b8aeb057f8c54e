//! Attributed (α,β)-community search on bipartite graphs.
//!
//! Given an upper-layer query vertex `q`, degree thresholds `α` (upper) and
//! `β` (lower) and a keyword set `S ⊆ W(q)`, find the connected subgraphs
//! containing `q` in which every upper vertex has at least `α` neighbours,
//! every lower vertex at least `β`, and the keywords shared within each layer
//! are as many as possible.
//!
//! ```
//! use abcs::graph::{GraphBuilder, Layer};
//! use abcs::peel::CoreParams;
//! use abcs::search::{run, Algorithm, QuerySpec, SearchConfig};
//!
//! let mut b = GraphBuilder::new();
//! for (u, v) in [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")] {
//!     b.add_edge(u, v);
//! }
//! b.add_keywords(Layer::Upper, "1", ["a"]).add_keywords(Layer::Upper, "2", ["a"]);
//! b.add_keywords(Layer::Lower, "1", ["x"]).add_keywords(Layer::Lower, "2", ["x"]);
//! let g = b.build().unwrap();
//!
//! let q = g.find(Layer::Upper, "1").unwrap();
//! let s = g.keyword_set(["a"]).unwrap();
//! let spec = QuerySpec::new(q, CoreParams::new(2, 2).unwrap(), s, Algorithm::Dec);
//! let out = run(&g, &spec, &SearchConfig::default()).unwrap();
//! assert_eq!(out.results.len(), 1);
//! assert_eq!(out.results[0].size, 2);
//! ```

pub mod bench;
pub mod candidates;
pub mod error;
pub mod exec;
pub mod graph;
pub mod ingest;
pub mod output;
pub mod peel;
pub mod search;

pub use error::{Error, Result};
pub use graph::{AttributedBipartiteGraph, GraphBuilder, KeywordSet, Layer, VertexRef};
pub use peel::CoreParams;
pub use search::{run, Algorithm, QueryOutcome, QuerySpec, SearchConfig};
