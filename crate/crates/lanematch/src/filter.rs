//! Label + degree admissibility filter.
//!
//! A data vertex v is admissible for query vertex u iff L(v) = L(u) and
//! d(v) >= d(u); both are necessary conditions for v to appear in any match
//! at u's slot, so the filter never changes match counts. The per-query-vertex
//! bitmaps are consulted inside the engines' feasibility checks. More
//! aggressive candidate structures can be plugged in behind the same surface.

use crate::graph::{Graph, VertexId};
use crate::workload::QueryGraph;

#[derive(Debug, Clone)]
pub struct CandidateFilter {
    words_per_vertex: usize,
    bits: Vec<u64>,
}

impl CandidateFilter {
    pub fn build(q: &QueryGraph, g: &Graph) -> Self {
        let n = g.n();
        let words_per_vertex = n.div_ceil(64);
        let mut bits = vec![0u64; q.n() * words_per_vertex];
        for u in 0..q.n() as u32 {
            let (lu, du) = (q.label(u), q.degree(u));
            let row = &mut bits[u as usize * words_per_vertex..(u as usize + 1) * words_per_vertex];
            for v in 0..n as u32 {
                if g.label(v) == lu && g.degree(v) >= du {
                    row[(v / 64) as usize] |= 1u64 << (v % 64);
                }
            }
        }
        CandidateFilter {
            words_per_vertex,
            bits,
        }
    }

    #[inline]
    pub fn admissible(&self, u: VertexId, v: VertexId) -> bool {
        let w = self.bits[u as usize * self.words_per_vertex + (v / 64) as usize];
        w & (1u64 << (v % 64)) != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn admissibility_matches_definition() {
        // data: path 0-1-2-3 with labels [0,1,1,0]
        let (g, _) = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], vec![0, 1, 1, 0], 2);
        // query: edge 0-1 with labels [1, 0]
        let (qg, _) = Graph::from_edges(2, &[(0, 1)], vec![1, 0], 2);
        let q = QueryGraph::new(qg).unwrap();
        let f = CandidateFilter::build(&q, &g);
        for u in 0..2u32 {
            for v in 0..4u32 {
                let expect = g.label(v) == q.label(u) && g.degree(v) >= q.degree(u);
                assert_eq!(f.admissible(u, v), expect, "u={u} v={v}");
            }
        }
    }
}
