//! Multicore subgraph-matching engine with two execution models: a
//! coarse-grained baseline that materializes per-level candidate buffers,
//! and a fine-grained lane-batched engine that packs feasibility checks into
//! full-width lockstep rounds over a compact execution stack. A two-phase
//! load balancer (initialization pool + stack-splitting work stealing)
//! distributes the search across worker threads, and an instrumentation
//! layer measures lane idle rates and memory footprints.

pub mod coarse;
pub mod error;
pub mod filter;
pub mod fine;
pub mod gen;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod ordering;
pub mod rng;
pub mod runner;
pub mod scheduler;
pub mod sink;
pub mod workload;

pub use error::{Error, Result};
