use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: unknown {layer} vertex id {id:?}")]
    UnknownVertex { path: PathBuf, layer: &'static str, id: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("keyword set of size {size} exceeds the subset-enumeration cap of {cap}; reduce the query keyword set")]
    QueryKeywordCap { size: usize, cap: usize },

    #[error("lower vertex {vertex} has {size} keywords, above the subset-enumeration cap of {cap}")]
    VertexKeywordCap { vertex: String, size: usize, cap: usize },

    #[error("oracle scale guard exceeded: {0}")]
    OracleGuard(String),

    #[error("query exceeded its time limit")]
    Timeout,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
