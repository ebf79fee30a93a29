//! Brute-force reference enumerator, deliberately independent of the
//! engines: query vertices are mapped in ascending id order (no matching
//! order), injectivity uses a linear scan (no bitmaps), and adjacency checks
//! walk neighbor lists linearly (no binary search). Exponential; intended
//! for graphs of at most a few hundred vertices.

use crate::graph::Graph;
use crate::workload::QueryGraph;

/// Number of subgraph isomorphisms from q into g.
pub fn count_matches(q: &QueryGraph, g: &Graph) -> u64 {
    let mut assigned: Vec<u32> = Vec::with_capacity(q.n());
    let mut count = 0u64;
    extend(q, g, &mut assigned, &mut count, None);
    count
}

/// All matches, each as the data vertex assigned to query vertex i at index i.
pub fn list_matches(q: &QueryGraph, g: &Graph) -> Vec<Vec<u32>> {
    let mut assigned: Vec<u32> = Vec::with_capacity(q.n());
    let mut count = 0u64;
    let mut out = Vec::new();
    extend(q, g, &mut assigned, &mut count, Some(&mut out));
    out
}

fn extend(
    q: &QueryGraph,
    g: &Graph,
    assigned: &mut Vec<u32>,
    count: &mut u64,
    mut sink: Option<&mut Vec<Vec<u32>>>,
) {
    let u = assigned.len() as u32;
    if u as usize == q.n() {
        *count += 1;
        if let Some(out) = sink {
            out.push(assigned.clone());
        }
        return;
    }
    'candidates: for v in 0..g.n() as u32 {
        if g.label(v) != q.label(u) {
            continue;
        }
        for &w in assigned.iter() {
            if w == v {
                continue 'candidates;
            }
        }
        for u2 in 0..u {
            if q.has_edge(u2, u) {
                // linear adjacency walk, intentionally not binary search
                let mapped = assigned[u2 as usize];
                if !g.neighbor_slice(mapped).iter().any(|&x| x == v) {
                    continue 'candidates;
                }
            }
        }
        assigned.push(v);
        extend(q, g, assigned, count, sink.as_deref_mut());
        assigned.pop();
    }
}

/// Checks one mapping (query vertex i -> mapped[i]) against the subgraph
/// isomorphism definition: injective, label-preserving, edge-preserving.
pub fn is_valid_match(q: &QueryGraph, g: &Graph, mapped: &[u32]) -> bool {
    if mapped.len() != q.n() {
        return false;
    }
    for (u, &v) in mapped.iter().enumerate() {
        if (v as usize) >= g.n() || g.label(v) != q.label(u as u32) {
            return false;
        }
        for (u2, &v2) in mapped.iter().enumerate().skip(u + 1) {
            if v == v2 {
                return false;
            }
            if q.has_edge(u as u32, u2 as u32) && !g.contains_edge(v, v2) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::workload::QueryGraph;

    fn query(n: usize, edges: &[(u32, u32)], labels: Vec<u16>, lc: u32) -> QueryGraph {
        let (g, _) = Graph::from_edges(n, edges, labels, lc);
        QueryGraph::new(g).unwrap()
    }

    #[test]
    fn k4_has_24_triangles() {
        let mut e = Vec::new();
        for u in 0..4u32 {
            for v in (u + 1)..4 {
                e.push((u, v));
            }
        }
        let (g, _) = Graph::from_edges(4, &e, vec![0; 4], 1);
        let q = query(3, &[(0, 1), (1, 2), (0, 2)], vec![0; 3], 1);
        assert_eq!(count_matches(&q, &g), 24);
        let all = list_matches(&q, &g);
        assert_eq!(all.len(), 24);
        for m in &all {
            assert!(is_valid_match(&q, &g, m));
        }
    }

    #[test]
    fn labels_constrain_matches() {
        // data path 0-1-2 labeled [0,1,0]; query edge labeled (0,1) has
        // exactly 2 matches (0->1 and 2->1 orientations)
        let (g, _) = Graph::from_edges(3, &[(0, 1), (1, 2)], vec![0, 1, 0], 2);
        let q = query(2, &[(0, 1)], vec![0, 1], 2);
        assert_eq!(count_matches(&q, &g), 2);
        let q_flip = query(2, &[(0, 1)], vec![1, 0], 2);
        assert_eq!(count_matches(&q_flip, &g), 2);
    }

    #[test]
    fn path_automorphisms() {
        // P3 query on P3 data: exactly the 2 automorphisms
        let (g, _) = Graph::from_edges(3, &[(0, 1), (1, 2)], vec![0; 3], 1);
        let q = query(3, &[(0, 1), (1, 2)], vec![0; 3], 1);
        assert_eq!(count_matches(&q, &g), 2);
    }

    #[test]
    fn relabel_invariance_of_structure() {
        // unlabeled counts are invariant under relabeling data vertex ids
        let (g, _) = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![0; 4], 1);
        let (g2, _) = Graph::from_edges(4, &[(2, 3), (3, 0), (0, 1), (1, 2)], vec![0; 4], 1);
        let q = query(3, &[(0, 1), (1, 2)], vec![0; 3], 1);
        assert_eq!(count_matches(&q, &g), count_matches(&q, &g2));
    }

    #[test]
    fn validator_rejects_bad_mappings() {
        let (g, _) = Graph::from_edges(3, &[(0, 1), (1, 2)], vec![0; 3], 1);
        let q = query(2, &[(0, 1)], vec![0; 2], 1);
        assert!(is_valid_match(&q, &g, &[0, 1]));
        assert!(!is_valid_match(&q, &g, &[0, 0])); // not injective
        assert!(!is_valid_match(&q, &g, &[0, 2])); // missing edge
        assert!(!is_valid_match(&q, &g, &[0])); // wrong arity
    }
}
