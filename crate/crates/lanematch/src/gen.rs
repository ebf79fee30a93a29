//! Deterministic synthetic-graph generators for fixtures and benchmarks.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Rng;

/// Erdos-Renyi G(n, p). O(n^2) sampling; intended for desk-scale fixtures.
pub fn er(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = Rng::new(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.next_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges, vec![0; n], 1).0
}

/// Star K_{1,n-1}: vertex 0 is the hub, so d_max = n - 1.
pub fn star(n: usize) -> Graph {
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (0, v)).collect();
    Graph::from_edges(n, &edges, vec![0; n], 1).0
}

/// RMAT recursive-quadrant generator. Draws `m` directed edge samples over
/// an n x n grid (n rounded up to a power of two), then simplifies, so the
/// resulting undirected edge count is at most m. Quadrant probabilities
/// (a, b, c, d) must sum to ~1.
pub fn rmat(n: usize, m: usize, probs: (f64, f64, f64, f64), seed: u64) -> Result<Graph> {
    let (a, b, c, d) = probs;
    let total = a + b + c + d;
    if !(0.999..=1.001).contains(&total) || [a, b, c, d].iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidParam(format!(
            "rmat probabilities must be nonnegative and sum to 1 (got {total})"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParam("rmat needs n >= 1".into()));
    }
    let scale = usize::BITS - (n - 1).leading_zeros().max(0);
    let side = 1usize << scale;
    let mut rng = Rng::new(seed);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (mut lo_u, mut lo_v) = (0usize, 0usize);
        let mut half = side / 2;
        while half > 0 {
            let x = rng.next_f64();
            if x < a {
                // top-left: nothing to add
            } else if x < a + b {
                lo_v += half;
            } else if x < a + b + c {
                lo_u += half;
            } else {
                lo_u += half;
                lo_v += half;
            }
            half /= 2;
        }
        if lo_u < n && lo_v < n {
            edges.push((lo_u as u32, lo_v as u32));
        }
    }
    Ok(Graph::from_edges(n, &edges, vec![0; n], 1).0)
}

/// Preferential-attachment power-law graph: each new vertex attaches to
/// `attach` existing vertices chosen proportionally to degree.
pub fn powerlaw(n: usize, attach: usize, seed: u64) -> Result<Graph> {
    if attach == 0 || n < attach + 1 {
        return Err(Error::InvalidParam(
            "powerlaw needs attach >= 1 and n > attach".into(),
        ));
    }
    let mut rng = Rng::new(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    // degree-weighted sampling via the repeated-endpoints trick
    let mut endpoints: Vec<u32> = Vec::new();
    // seed clique over the first attach+1 vertices
    for u in 0..=attach as u32 {
        for v in (u + 1)..=attach as u32 {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    for v in (attach as u32 + 1)..n as u32 {
        let mut targets = Vec::with_capacity(attach);
        while targets.len() < attach {
            let t = endpoints[rng.next_index(endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Ok(Graph::from_edges(n, &edges, vec![0; n], 1).0)
}
