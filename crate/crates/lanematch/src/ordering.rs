//! Matching-order generation and validation.
//!
//! The order starts at the highest-degree query vertex (ties by smallest id)
//! and greedily appends the vertex with the most already-ordered neighbors,
//! breaking ties by higher total degree, then smaller id. Every position
//! after the first has at least one backward neighbor, so the order is
//! connected.

use crate::error::{Error, Result};
use crate::workload::QueryGraph;

/// A connected permutation of the query vertices plus the precomputed
/// backward-neighbor positions for each slot.
#[derive(Debug, Clone)]
pub struct MatchingOrder {
    /// phi[i] = query vertex placed at position i.
    pub phi: Vec<u32>,
    /// backward[i] = sorted positions j < i with (phi[j], phi[i]) a query edge.
    pub backward: Vec<Vec<u32>>,
    /// backward[i] as a position bitmask (query has at most 64 vertices).
    pub backward_mask: Vec<u64>,
}

impl MatchingOrder {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn from_permutation(q: &QueryGraph, phi: Vec<u32>) -> Result<Self> {
        validate_order(q, &phi)?;
        let backward = backward_sets(q, &phi);
        let backward_mask = backward
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &j| m | (1u64 << j)))
            .collect();
        Ok(MatchingOrder {
            phi,
            backward,
            backward_mask,
        })
    }
}

fn backward_sets(q: &QueryGraph, phi: &[u32]) -> Vec<Vec<u32>> {
    (0..phi.len())
        .map(|i| {
            (0..i as u32)
                .filter(|&j| q.has_edge(phi[j as usize], phi[i]))
                .collect()
        })
        .collect()
}

/// Greedy order generation (see module docs). Pure and stable: the same
/// query bytes always yield the same order.
pub fn generate_order(q: &QueryGraph) -> MatchingOrder {
    let n = q.n();
    let mut phi = Vec::with_capacity(n);
    let mut placed = vec![false; n];

    let first = (0..n as u32)
        .max_by(|&a, &b| {
            q.degree(a)
                .cmp(&q.degree(b))
                .then(b.cmp(&a)) // smaller id wins
        })
        .expect("query is nonempty");
    phi.push(first);
    placed[first as usize] = true;

    while phi.len() < n {
        let next = (0..n as u32)
            .filter(|&v| !placed[v as usize])
            .max_by(|&a, &b| {
                let ordered_neighbors = |v: u32| {
                    phi.iter().filter(|&&u| q.has_edge(u, v)).count()
                };
                ordered_neighbors(a)
                    .cmp(&ordered_neighbors(b))
                    .then(q.degree(a).cmp(&q.degree(b)))
                    .then(b.cmp(&a))
            })
            .unwrap();
        phi.push(next);
        placed[next as usize] = true;
    }

    MatchingOrder::from_permutation(q, phi).expect("greedy order is always valid on a connected query")
}

/// Checks that phi is a permutation of the query vertices and that every
/// position after the first has a backward neighbor. Returns the first
/// violating position on failure.
pub fn validate_order(q: &QueryGraph, phi: &[u32]) -> Result<()> {
    let n = q.n();
    if phi.len() != n {
        return Err(Error::InvalidOrder {
            position: phi.len().min(n),
            msg: format!("order has {} entries, query has {n} vertices", phi.len()),
        });
    }
    let mut seen = vec![false; n];
    for (i, &v) in phi.iter().enumerate() {
        if (v as usize) >= n || seen[v as usize] {
            return Err(Error::InvalidOrder {
                position: i,
                msg: format!("entry {v} is out of range or repeated"),
            });
        }
        seen[v as usize] = true;
    }
    for i in 1..n {
        let has_backward = phi[..i].iter().any(|&u| q.has_edge(u, phi[i]));
        if !has_backward {
            return Err(Error::InvalidOrder {
                position: i,
                msg: format!("vertex {} has no backward neighbor", phi[i]),
            });
        }
    }
    Ok(())
}
