//! Coarse-grained baseline: warp-per-partial-match BFS and DFS search with
//! materialized candidate buffers and optional loop unrolling.
//!
//! Used for engine comparison, idle-rate measurement and as the
//! initialization-phase BFS of the parallel pipeline.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::filter::CandidateFilter;
use crate::graph::Graph;
use crate::metrics::EventAccum;
use crate::ordering::MatchingOrder;
use crate::sink::Sink;
use crate::workload::QueryGraph;

pub const ID_BYTES: u64 = 4;
/// Per-level bookkeeping outside the candidate buffer (cursor, fill count).
pub const FRAME_OVERHEAD_BYTES: u64 = 16;

/// Closed-form execution-stack size of the coarse model, per simulated warp:
/// one candidate buffer of capacity d_max * sigma at each of |V(Q)| levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoarseStackBytes {
    pub candidate_bytes: u64,
    pub frame_overhead_bytes: u64,
}

pub fn stack_bytes_coarse(query_vertices: usize, d_max: usize, sigma: usize) -> CoarseStackBytes {
    CoarseStackBytes {
        candidate_bytes: query_vertices as u64 * d_max as u64 * sigma as u64 * ID_BYTES,
        frame_overhead_bytes: query_vertices as u64 * FRAME_OVERHEAD_BYTES,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CoarseConfig {
    /// Loop-unrolling factor: partial matches expanded per simulated warp step.
    pub sigma: usize,
    /// Emulated warp width for idle accounting.
    pub w: usize,
    /// Use the first backward neighbor for the local candidate set instead of
    /// the min-degree one (the literal Alg-1 behavior, behind a flag for
    /// fidelity runs).
    pub naive_candidate: bool,
}

impl Default for CoarseConfig {
    fn default() -> Self {
        CoarseConfig {
            sigma: 1,
            w: 32,
            naive_candidate: false,
        }
    }
}

pub const MAX_SIGMA: usize = 8;

/// Outcome of the level-by-level BFS: either a pool of uniform-depth partial
/// matches (flat array, `depth` ids per item) or, when the query finished
/// during expansion, the complete matches themselves (depth = |phi|).
#[derive(Debug)]
pub struct BfsLevel {
    pub items: Vec<u32>,
    pub depth: usize,
}

impl BfsLevel {
    pub fn len(&self) -> usize {
        if self.depth == 0 {
            0
        } else {
            self.items.len() / self.depth
        }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn item(&self, i: usize) -> &[u32] {
        &self.items[i * self.depth..(i + 1) * self.depth]
    }

    pub fn is_complete(&self, order_len: usize) -> bool {
        self.depth == order_len
    }
}

#[derive(Debug, Clone, Copy)]
pub enum BfsStop {
    /// Stop after the first completed level holding at least this many items.
    Threshold(usize),
    /// Expand until the query completes.
    Full,
}

pub struct CoarseEngine<'a> {
    g: &'a Graph,
    q: &'a QueryGraph,
    order: &'a MatchingOrder,
    filter: Option<&'a CandidateFilter>,
    cfg: CoarseConfig,
    /// Per-level feasible-candidate buffers, allocated once per worker.
    bufs: Vec<Vec<u32>>,
    path: Vec<u32>,
    pub sink: Sink,
    pub events: EventAccum,
    stop_flag: Option<&'a AtomicBool>,
    pub stopped: bool,
}

impl<'a> CoarseEngine<'a> {
    pub fn new(
        g: &'a Graph,
        q: &'a QueryGraph,
        order: &'a MatchingOrder,
        filter: Option<&'a CandidateFilter>,
        cfg: CoarseConfig,
        sink: Sink,
        record_events: bool,
    ) -> Self {
        assert!((1..=MAX_SIGMA).contains(&cfg.sigma));
        let n = order.len();
        // capacity d_max * sigma per level, mirroring the preallocated model
        let cap = g.d_max().saturating_mul(cfg.sigma);
        CoarseEngine {
            g,
            q,
            order,
            filter,
            cfg,
            bufs: (0..n).map(|_| Vec::with_capacity(cap)).collect(),
            path: Vec::with_capacity(n),
            sink,
            events: EventAccum::new(record_events),
            stop_flag: None,
            stopped: false,
        }
    }

    pub fn with_stop_flag(mut self, flag: &'a AtomicBool) -> Self {
        self.stop_flag = Some(flag);
        self
    }

    #[inline]
    fn should_stop(&mut self) -> bool {
        if self.stopped {
            return true;
        }
        if let Some(f) = self.stop_flag {
            if f.load(Ordering::Relaxed) {
                self.stopped = true;
                return true;
            }
        }
        false
    }

    /// Feasible candidates for extending `m` (depth = position being filled).
    /// Allocating convenience wrapper over the buffer-based inner loop.
    pub fn feasible(&mut self, m: &[u32]) -> Vec<u32> {
        let d = m.len();
        assert!(d >= 1 && d < self.order.len());
        self.path.clear();
        self.path.extend_from_slice(m);
        let base = self.bufs[d].len();
        self.process_into(d);
        let out = self.bufs[d][base..].to_vec();
        self.bufs[d].truncate(base);
        out
    }

    /// Computes C^F for position `d` of the current path into bufs[d] and
    /// returns |C^L| (the local candidate set size before feasibility checks).
    fn process_into(&mut self, d: usize) -> usize {
        let qv = self.order.phi[d];
        let bw = &self.order.backward[d];
        debug_assert!(!bw.is_empty(), "connected order has backward neighbors");
        let pick = if self.cfg.naive_candidate {
            bw[0]
        } else {
            // backward neighbor whose mapped vertex has the fewest neighbors;
            // ties go to the shallowest position
            let mut best = bw[0];
            for &j in &bw[1..] {
                if self.g.degree(self.path[j as usize]) < self.g.degree(self.path[best as usize]) {
                    best = j;
                }
            }
            best
        };
        let owner = self.path[pick as usize];
        let (begin, end) = self.g.neighbor_range(owner);
        let q_label = self.q.label(qv);
        for k in begin..end {
            let v = self.g.neighbor_at(k);
            if self.g.label(v) != q_label {
                continue;
            }
            if let Some(f) = self.filter {
                if !f.admissible(qv, v) {
                    continue;
                }
            }
            // injectivity: scan the current partial match
            if self.path.contains(&v) {
                continue;
            }
            let edges_ok = bw
                .iter()
                .all(|&j| j == pick || self.g.contains_edge(self.path[j as usize], v));
            if edges_ok {
                self.bufs[d].push(v);
            }
        }
        end - begin
    }

    /// Seed partial matches: both orientations of every data edge matching
    /// the first two order positions (all label-matching vertices when the
    /// query has a single vertex).
    fn seed_level(&mut self) -> BfsLevel {
        let nphi = self.order.len();
        let mut items = Vec::new();
        if nphi == 1 {
            let qv = self.order.phi[0];
            for v in 0..self.g.n() as u32 {
                if self.g.label(v) == self.q.label(qv)
                    && self.filter.map_or(true, |f| f.admissible(qv, v))
                {
                    items.push(v);
                }
            }
            return BfsLevel { items, depth: 1 };
        }
        let (q0, q1) = (self.order.phi[0], self.order.phi[1]);
        debug_assert!(self.q.has_edge(q0, q1), "order connectivity");
        for v in 0..self.g.n() as u32 {
            if self.g.label(v) != self.q.label(q0)
                || !self.filter.map_or(true, |f| f.admissible(q0, v))
            {
                continue;
            }
            let (begin, end) = self.g.neighbor_range(v);
            for k in begin..end {
                let v2 = self.g.neighbor_at(k);
                if self.g.label(v2) == self.q.label(q1)
                    && self.filter.map_or(true, |f| f.admissible(q1, v2))
                {
                    items.push(v);
                    items.push(v2);
                }
            }
        }
        BfsLevel { items, depth: 2 }
    }

    /// Level-synchronous expansion (Alg-1 BFS-Search). With a threshold stop,
    /// returns the first completed level holding at least that many partial
    /// matches; a full run expands until the query completes. `mem_cap`
    /// bounds the level storage in bytes.
    pub fn bfs_search(&mut self, stop: BfsStop, mem_cap: u64) -> Result<BfsLevel> {
        let nphi = self.order.len();
        let mut level = self.seed_level();
        loop {
            let bytes = level.items.len() as u64 * ID_BYTES;
            if bytes > mem_cap {
                return Err(Error::MemoryCap {
                    level: level.depth,
                    items: level.len(),
                    bytes,
                    cap: mem_cap,
                });
            }
            if level.is_complete(nphi) {
                return Ok(level);
            }
            if let BfsStop::Threshold(tau) = stop {
                if level.len() >= tau {
                    return Ok(level);
                }
            }
            let d = level.depth;
            let mut next = Vec::new();
            for i in 0..level.len() {
                self.path.clear();
                self.path
                    .extend_from_slice(&level.items[i * d..(i + 1) * d]);
                let base = self.bufs[d].len();
                self.process_into(d);
                for k in base..self.bufs[d].len() {
                    let v = self.bufs[d][k];
                    next.extend_from_slice(&self.path);
                    next.push(v);
                }
                self.bufs[d].truncate(base);
                let next_bytes = next.len() as u64 * ID_BYTES;
                if next_bytes > mem_cap {
                    return Err(Error::MemoryCap {
                        level: d + 1,
                        items: next.len() / (d + 1),
                        bytes: next_bytes,
                        cap: mem_cap,
                    });
                }
            }
            level = BfsLevel {
                items: next,
                depth: d + 1,
            };
            if level.is_empty() {
                return Ok(level);
            }
        }
    }

    /// Recursive extension of one partial match (Alg-1 DFS-Search). With
    /// sigma > 1, sibling partial matches are expanded in groups of sigma per
    /// simulated warp step, and lane occupancy is logged accordingly.
    pub fn dfs_search(&mut self, m0: &[u32]) {
        let nphi = self.order.len();
        let d = m0.len();
        self.path.clear();
        self.path.extend_from_slice(m0);
        if d == nphi {
            self.sink.emit(&self.path);
            return;
        }
        // the pool item itself is one task group: a "chunk" of one
        let base = self.bufs[d].len();
        let cl = self.process_into(d);
        self.events.log_expansion(d, cl, self.cfg.w);
        let hi = self.bufs[d].len();
        self.descend(d, base, hi);
        self.bufs[d].truncate(base);
    }

    /// `bufs[d][lo..hi]` holds feasible candidates for position d of the
    /// current path; recurse depth-first, unrolling sigma siblings per step.
    fn descend(&mut self, d: usize, lo: usize, hi: usize) {
        let nphi = self.order.len();
        if d + 1 == nphi {
            for k in lo..hi {
                let v = self.bufs[d][k];
                self.path.push(v);
                self.sink.emit(&self.path);
                self.path.pop();
            }
            return;
        }
        let mut idx = lo;
        while idx < hi {
            if self.should_stop() {
                return;
            }
            let chunk_end = (idx + self.cfg.sigma).min(hi);
            // one warp step: expand up to sigma sibling partial matches
            let mut offsets = [0usize; MAX_SIGMA + 1];
            offsets[0] = self.bufs[d + 1].len();
            let mut total_cl = 0usize;
            for (slot, k) in (idx..chunk_end).enumerate() {
                let v = self.bufs[d][k];
                self.path.push(v);
                total_cl += self.process_into(d + 1);
                self.path.pop();
                offsets[slot + 1] = self.bufs[d + 1].len();
            }
            self.events.log_expansion(d + 1, total_cl, self.cfg.w);
            for (slot, k) in (idx..chunk_end).enumerate() {
                let v = self.bufs[d][k];
                self.path.push(v);
                self.descend(d + 1, offsets[slot], offsets[slot + 1]);
                self.path.pop();
            }
            self.bufs[d + 1].truncate(offsets[0]);
            idx = chunk_end;
        }
    }
}
