//! Query-graph loading and the random-query / relabeling generators.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelId, VertexId};
use crate::rng::Rng;

pub const MAX_QUERY_VERTICES: usize = 64;

/// A small connected query graph. Adjacency is mirrored into per-vertex
/// bitsets so query-edge tests are O(1) during order generation.
#[derive(Debug, Clone)]
pub struct QueryGraph {
    graph: Graph,
    adj_bits: Vec<u64>,
}

impl QueryGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        let n = graph.n();
        if n == 0 {
            return Err(Error::EmptyQuery);
        }
        if n > MAX_QUERY_VERTICES {
            return Err(Error::QueryTooLarge(n));
        }
        if let Some(unreached) = first_unreachable(&graph) {
            return Err(Error::Disconnected { unreached });
        }
        let mut adj_bits = vec![0u64; n];
        for v in 0..n as u32 {
            for &u in graph.neighbor_slice(v) {
                adj_bits[v as usize] |= 1u64 << u;
            }
        }
        Ok(QueryGraph { graph, adj_bits })
    }

    pub fn load_text<P: AsRef<Path>>(path: P, labels_path: Option<&Path>) -> Result<Self> {
        let (graph, _) = Graph::load_text(path, labels_path)?;
        Self::new(graph)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn label(&self, u: VertexId) -> LabelId {
        self.graph.label(u)
    }

    pub fn degree(&self, u: VertexId) -> usize {
        self.graph.degree(u)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.adj_bits[a as usize] & (1u64 << b) != 0
    }

    /// Serializes to the shared text format (edge lines only).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n() as u32 {
            for &v in self.graph.neighbor_slice(u) {
                if u < v {
                    out.push_str(&format!("{u} {v}\n"));
                }
            }
        }
        out
    }

    /// Label lines in the shared text format, or None for unlabeled queries.
    pub fn labels_to_text(&self) -> Option<String> {
        if self.graph.label_count() <= 1 {
            return None;
        }
        let mut out = String::new();
        for v in 0..self.n() as u32 {
            out.push_str(&format!("{v} {}\n", self.graph.label(v)));
        }
        Some(out)
    }
}

fn first_unreachable(g: &Graph) -> Option<u32> {
    let n = g.n();
    if n == 0 {
        return None;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0u32];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in g.neighbor_slice(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().position(|&s| !s).map(|i| i as u32)
}

const MAX_RESTARTS: usize = 1000;

/// Grows an n-vertex connected query out of the data graph: start at a
/// random seed vertex, repeatedly pick a uniform random data vertex adjacent
/// to the current set, and keep ALL edges between the new vertex and the
/// set. Vertex labels are copied from the data graph. Deterministic for a
/// fixed (g, n, seed).
pub fn random_query(g: &Graph, n: usize, seed: u64) -> Result<QueryGraph> {
    if n == 0 {
        return Err(Error::EmptyQuery);
    }
    if n > MAX_QUERY_VERTICES {
        return Err(Error::QueryTooLarge(n));
    }
    if g.n() == 0 {
        return Err(Error::GeneratorStuck {
            restarts: 0,
            reached: 0,
            target: n,
        });
    }

    let mut rng = Rng::new(seed);
    let mut best_reached = 0;
    for restart in 0..MAX_RESTARTS {
        let seed_vertex = rng.next_below(g.n() as u64) as u32;
        let mut picked: Vec<u32> = vec![seed_vertex];
        let mut in_set = vec![false; g.n()];
        in_set[seed_vertex as usize] = true;
        // frontier: data vertices adjacent to the picked set, sorted unique
        let mut frontier: Vec<u32> = g
            .neighbor_slice(seed_vertex)
            .iter()
            .copied()
            .collect();

        while picked.len() < n && !frontier.is_empty() {
            let idx = rng.next_index(frontier.len());
            let v = frontier.swap_remove(idx);
            in_set[v as usize] = true;
            picked.push(v);
            frontier.retain(|&u| u != v);
            for &u in g.neighbor_slice(v) {
                if !in_set[u as usize] && !frontier.contains(&u) {
                    frontier.push(u);
                }
            }
        }
        if picked.len() == n {
            // re-index by pick order; include every data edge inside the set
            let mut dense_of = vec![u32::MAX; g.n()];
            for (i, &v) in picked.iter().enumerate() {
                dense_of[v as usize] = i as u32;
            }
            let mut edges = Vec::new();
            for (i, &v) in picked.iter().enumerate() {
                for &u in g.neighbor_slice(v) {
                    let j = dense_of[u as usize];
                    if j != u32::MAX && (i as u32) < j {
                        edges.push((i as u32, j));
                    }
                }
            }
            let labels: Vec<LabelId> = picked.iter().map(|&v| g.label(v)).collect();
            let (qg, _) = Graph::from_edges(n, &edges, labels, g.label_count());
            return QueryGraph::new(qg);
        }
        best_reached = best_reached.max(picked.len());
        let _ = restart;
    }
    Err(Error::GeneratorStuck {
        restarts: MAX_RESTARTS,
        reached: best_reached,
        target: n,
    })
}

/// Relabels a graph with labels drawn i.i.d. from a Zipf distribution
/// P(label = l) proportional to (l+1)^(-alpha); alpha = 0 is uniform.
pub fn relabel_zipf(g: &Graph, sigma: u32, alpha: f64, seed: u64) -> Graph {
    assert!(sigma >= 1);
    assert!(alpha >= 0.0);
    let weights: Vec<f64> = (0..sigma).map(|l| ((l + 1) as f64).powf(-alpha)).collect();
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(sigma as usize);
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cumulative.push(acc);
    }
    let mut rng = Rng::new(seed);
    let labels: Vec<LabelId> = (0..g.n())
        .map(|_| {
            let x = rng.next_f64();
            cumulative
                .iter()
                .position(|&c| x < c)
                .unwrap_or(sigma as usize - 1) as LabelId
        })
        .collect();
    g.with_labels(labels, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn complete_graph(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges, vec![0; n], 1).0
    }

    #[test]
    fn triangle_query_loads() {
        let (g, _) = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], vec![0; 3], 1);
        let q = QueryGraph::new(g).unwrap();
        assert_eq!(q.n(), 3);
        for u in 0..3 {
            assert_eq!(q.degree(u), 2);
        }
    }

    #[test]
    fn disconnected_query_rejected() {
        let (g, _) = Graph::from_edges(4, &[(0, 1), (2, 3)], vec![0; 4], 1);
        assert!(matches!(QueryGraph::new(g), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn bitsets_agree_with_csr() {
        let g = gen::er(12, 0.4, 11);
        if let Ok(q) = QueryGraph::new(g) {
            for a in 0..q.n() as u32 {
                for b in 0..q.n() as u32 {
                    assert_eq!(q.has_edge(a, b), q.graph().contains_edge(a, b));
                }
            }
        }
    }

    #[test]
    fn random_query_single_vertex_keeps_label() {
        let (g, _) = Graph::from_edges(3, &[(0, 1), (1, 2)], vec![5, 6, 7], 8);
        for seed in 0..10 {
            let q = random_query(&g, 1, seed).unwrap();
            assert_eq!(q.n(), 1);
            assert!(g.labels().contains(&q.label(0)));
        }
    }

    #[test]
    fn random_query_two_vertices_is_an_edge() {
        let (g, _) = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], vec![0; 4], 1);
        for seed in 0..20 {
            let q = random_query(&g, 2, seed).unwrap();
            assert_eq!(q.n(), 2);
            assert!(q.has_edge(0, 1));
        }
    }

    #[test]
    fn random_query_on_k5_gives_k4() {
        let g = complete_graph(5);
        for seed in 0..100 {
            let q = random_query(&g, 4, seed).unwrap();
            assert_eq!(q.n(), 4);
            for a in 0..4u32 {
                for b in 0..4u32 {
                    if a != b {
                        assert!(q.has_edge(a, b), "seed {seed}: missing edge {a}-{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_query_connected_and_sized() {
        let g = gen::er(60, 0.15, 3);
        for seed in 0..50 {
            if let Ok(q) = random_query(&g, 6, seed) {
                assert_eq!(q.n(), 6);
                // QueryGraph::new already enforces connectivity
            }
        }
    }

    #[test]
    fn random_query_deterministic() {
        let g = gen::er(50, 0.2, 1);
        let a = random_query(&g, 5, 77).unwrap();
        let b = random_query(&g, 5, 77).unwrap();
        assert!(a.graph().structural_eq(b.graph()));
    }

    #[test]
    fn random_query_gives_up_on_small_component() {
        let (g, _) = Graph::from_edges(2, &[(0, 1)], vec![0; 2], 1);
        assert!(matches!(
            random_query(&g, 5, 0),
            Err(Error::GeneratorStuck { .. })
        ));
    }

    #[test]
    fn zipf_sigma_one_all_zero() {
        let g = gen::er(100, 0.1, 5);
        let relabeled = relabel_zipf(&g, 1, 2.5, 9);
        assert!(relabeled.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn zipf_alpha_zero_uniform() {
        let g = gen::er(2000, 0.002, 8);
        let n = g.n() as f64;
        let sigma = 16u32;
        let relabeled = relabel_zipf(&g, sigma, 0.0, 123);
        let mut counts = vec![0usize; sigma as usize];
        for &l in relabeled.labels() {
            counts[l as usize] += 1;
        }
        // binomial(n, 1/16): mean n/16, sd sqrt(n*p*(1-p)); allow 3 sigma
        let p = 1.0 / sigma as f64;
        let mean = n * p;
        let sd = (n * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - mean).abs() < 3.5 * sd, "count {c} vs mean {mean}");
        }
    }

    #[test]
    fn zipf_alpha_one_ratio() {
        let g = gen::star(100_000);
        let relabeled = relabel_zipf(&g, 16, 1.0, 4);
        let mut counts = vec![0usize; 16];
        for &l in relabeled.labels() {
            counts[l as usize] += 1;
        }
        let ratio = counts[0] as f64 / counts[15] as f64;
        assert!((ratio - 16.0).abs() / 16.0 < 0.2, "ratio {ratio}");
    }
}
