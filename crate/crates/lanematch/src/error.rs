use std::path::PathBuf;

/// Errors produced by loaders, validators and the engines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: parse error: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("vertex id {id} out of range (declared n = {n})")]
    VertexRange { id: u64, n: u64 },

    #[error("bad magic or version in binary graph file")]
    BadMagic,

    #[error("truncated binary graph file")]
    Truncated,

    #[error("query graph is disconnected (vertex {unreached} unreachable from vertex 0)")]
    Disconnected { unreached: u32 },

    #[error("query graph has {0} vertices; at most 64 are supported")]
    QueryTooLarge(usize),

    #[error("query graph is empty")]
    EmptyQuery,

    #[error("invalid matching order at position {position}: {msg}")]
    InvalidOrder { position: usize, msg: String },

    #[error(
        "memory cap exceeded during initialization BFS: level {level} holds {items} partial \
         matches ({bytes} bytes, cap {cap}); retry with a smaller tau"
    )]
    MemoryCap {
        level: usize,
        items: usize,
        bytes: u64,
        cap: u64,
    },

    #[error("query generator gave up after {restarts} restarts (reached {reached} of {target} vertices)")]
    GeneratorStuck {
        restarts: usize,
        reached: usize,
        target: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("search timed out")]
    Timeout,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
