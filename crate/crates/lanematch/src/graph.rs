//! Immutable labeled CSR graph shared by all engines.
//!
//! Neighbor lists are sorted and duplicate-free, each undirected edge is
//! stored in both endpoints' lists, and the structure is never mutated after
//! construction, so concurrent unsynchronized reads are safe.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type LabelId = u16;

const MAGIC: &[u8; 4] = b"GMG1";

/// What the loader dropped or rewrote while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
    pub remapped: bool,
}

#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    labels: Vec<LabelId>,
    label_count: u32,
    d_max: usize,
    d_avg: f64,
    /// Original vertex ids when the input was sparse and got remapped to
    /// a dense [0, n) range. Index = dense id.
    external_ids: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub d_max: usize,
    pub d_avg: f64,
}

impl Graph {
    /// Builds a graph from a dense edge list. Self-loops and parallel edges
    /// are dropped; each surviving edge is stored in both directions.
    pub fn from_edges(
        n: usize,
        edges: &[(VertexId, VertexId)],
        labels: Vec<LabelId>,
        label_count: u32,
    ) -> (Self, LoadReport) {
        debug_assert_eq!(labels.len(), n);
        let mut report = LoadReport::default();

        let mut directed: Vec<(VertexId, VertexId)> = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            debug_assert!((u as usize) < n && (v as usize) < n);
            if u == v {
                report.dropped_self_loops += 1;
                continue;
            }
            directed.push((u, v));
            directed.push((v, u));
        }
        directed.sort_unstable();
        let before = directed.len();
        directed.dedup();
        // both orientations of a duplicate input edge are dropped
        report.dropped_duplicates = (before - directed.len()) / 2;

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &directed {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors: Vec<VertexId> = directed.iter().map(|&(_, v)| v).collect();

        let mut g = Graph {
            offsets,
            neighbors,
            labels,
            label_count: label_count.max(1),
            d_max: 0,
            d_avg: 0.0,
            external_ids: None,
        };
        let stats = g.degree_stats();
        g.d_max = stats.d_max;
        g.d_avg = stats.d_avg;
        (g, report)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored directed arcs (2x the undirected edge count).
    pub fn arc_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbor_slice(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// (begin, end) offsets of v's adjacency slice inside the flat
    /// neighbor array. Used by the fine engine's candidate-range references.
    pub fn neighbor_range(&self, v: VertexId) -> (usize, usize) {
        (self.offsets[v as usize], self.offsets[v as usize + 1])
    }

    pub fn neighbor_at(&self, idx: usize) -> VertexId {
        self.neighbors[idx]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn label(&self, v: VertexId) -> LabelId {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[LabelId] {
        &self.labels
    }

    pub fn label_count(&self) -> u32 {
        self.label_count
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn d_avg(&self) -> f64 {
        self.d_avg
    }

    pub fn external_ids(&self) -> Option<&[u64]> {
        self.external_ids.as_deref()
    }

    /// External (input-file) id of a dense vertex id.
    pub fn external_id(&self, v: VertexId) -> u64 {
        match &self.external_ids {
            Some(ids) => ids[v as usize],
            None => v as u64,
        }
    }

    /// Membership test via binary search: true iff v is in N(u).
    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbor_slice(u).binary_search(&v).is_ok()
    }

    /// Recomputes degree statistics from the offsets array.
    pub fn degree_stats(&self) -> DegreeStats {
        let n = self.n();
        if n == 0 {
            return DegreeStats { d_max: 0, d_avg: 0.0 };
        }
        let d_max = (0..n)
            .map(|v| self.offsets[v + 1] - self.offsets[v])
            .max()
            .unwrap_or(0);
        DegreeStats {
            d_max,
            d_avg: self.neighbors.len() as f64 / n as f64,
        }
    }

    /// Structural equality over the serialized fields (external-id mapping
    /// excluded; it is not part of the binary format).
    pub fn structural_eq(&self, other: &Graph) -> bool {
        self.offsets == other.offsets
            && self.neighbors == other.neighbors
            && self.labels == other.labels
            && self.label_count == other.label_count
    }

    /// Replaces the label array, keeping the topology.
    pub fn with_labels(&self, labels: Vec<LabelId>, label_count: u32) -> Graph {
        assert_eq!(labels.len(), self.n());
        Graph {
            labels,
            label_count: label_count.max(1),
            ..self.clone()
        }
    }

    pub fn load_text<P: AsRef<Path>>(path: P, labels_path: Option<&Path>) -> Result<(Graph, LoadReport)> {
        let path = path.as_ref();
        let file = File::open(path)?;
        let reader = BufReader::new(file);

        let mut declared_n: Option<u64> = None;
        let mut raw_edges: Vec<(u64, u64)> = Vec::new();
        let mut saw_data_line = false;

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut toks = line.split_whitespace();
            let a = toks.next().unwrap();
            match toks.next() {
                None => {
                    // A single-integer line before any edge is a vertex-count header.
                    if !saw_data_line && declared_n.is_none() {
                        declared_n = Some(a.parse::<u64>().map_err(|e| Error::Parse {
                            path: path.to_path_buf(),
                            line: lineno + 1,
                            msg: e.to_string(),
                        })?);
                    } else {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line: lineno + 1,
                            msg: "expected two vertex ids".into(),
                        });
                    }
                }
                Some(b) => {
                    let parse = |t: &str| -> Result<u64> {
                        t.parse::<u64>().map_err(|e| Error::Parse {
                            path: path.to_path_buf(),
                            line: lineno + 1,
                            msg: format!("bad vertex id {t:?}: {e}"),
                        })
                    };
                    let (u, v) = (parse(a)?, parse(b)?);
                    if toks.next().is_some() {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line: lineno + 1,
                            msg: "trailing tokens after edge".into(),
                        });
                    }
                    if let Some(n) = declared_n {
                        if u >= n || v >= n {
                            return Err(Error::VertexRange { id: u.max(v), n });
                        }
                    }
                    saw_data_line = true;
                    raw_edges.push((u, v));
                }
            }
        }

        let raw_labels = match labels_path {
            Some(lp) => Some(read_label_file(lp)?),
            None => None,
        };
        Self::from_raw_edges(declared_n, &raw_edges, raw_labels.as_ref())
    }

    /// Builds from raw (possibly sparse) vertex ids, remapping to a dense
    /// [0, n) range when needed. The dense-id order follows ascending
    /// original ids so the mapping is deterministic.
    pub fn from_raw_edges(
        declared_n: Option<u64>,
        raw_edges: &[(u64, u64)],
        raw_labels: Option<&Vec<(u64, String)>>,
    ) -> Result<(Graph, LoadReport)> {
        let (n, to_dense, external_ids): (usize, Option<HashMap<u64, u32>>, Option<Vec<u64>>) =
            match declared_n {
                Some(n) => (n as usize, None, None),
                None => {
                    let mut ids: Vec<u64> = raw_edges
                        .iter()
                        .flat_map(|&(u, v)| [u, v])
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    let dense = ids.len() == ids.last().map_or(0, |&m| m as usize + 1);
                    if dense {
                        (ids.len(), None, None)
                    } else {
                        let map: HashMap<u64, u32> = ids
                            .iter()
                            .enumerate()
                            .map(|(i, &id)| (id, i as u32))
                            .collect();
                        (ids.len(), Some(map), Some(ids))
                    }
                }
            };

        let remap = |id: u64| -> u32 {
            match &to_dense {
                Some(m) => m[&id],
                None => id as u32,
            }
        };
        let edges: Vec<(u32, u32)> = raw_edges.iter().map(|&(u, v)| (remap(u), remap(v))).collect();

        let (labels, label_count) = match raw_labels {
            None => (vec![0u16; n], 1),
            Some(entries) => {
                let mut labels = vec![0u16; n];
                let all_numeric = entries.iter().all(|(_, t)| t.parse::<u16>().is_ok());
                let mut interned: HashMap<&str, u16> = HashMap::new();
                let mut max_label = 0u16;
                for (vid, tok) in entries {
                    let dense = match &to_dense {
                        Some(m) => match m.get(vid) {
                            Some(&d) => d,
                            None => continue, // label for a vertex not in the edge list
                        },
                        None => {
                            if *vid >= n as u64 {
                                if declared_n.is_some() {
                                    return Err(Error::VertexRange { id: *vid, n: n as u64 });
                                }
                                continue;
                            }
                            *vid as u32
                        }
                    };
                    let lab = if all_numeric {
                        tok.parse::<u16>().unwrap()
                    } else {
                        let next = interned.len() as u16;
                        *interned.entry(tok.as_str()).or_insert(next)
                    };
                    max_label = max_label.max(lab);
                    labels[dense as usize] = lab;
                }
                (labels, max_label as u32 + 1)
            }
        };

        let (mut g, mut report) = Graph::from_edges(n, &edges, labels, label_count);
        if let Some(ext) = external_ids {
            g.external_ids = Some(ext);
            report.remapped = true;
        }
        Ok((g, report))
    }

    pub fn save_binary<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&(self.neighbors.len() as u64).to_le_bytes())?;
        for &o in &self.offsets {
            w.write_all(&(o as u64).to_le_bytes())?;
        }
        for &v in &self.neighbors {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.label_count.to_le_bytes())?;
        for &l in &self.labels {
            w.write_all(&l.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load_binary<P: AsRef<Path>>(path: P) -> Result<Graph> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadMagic);
        }
        let n = read_u64(&mut r)? as usize;
        let m = read_u64(&mut r)? as usize;
        let mut offsets = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            offsets.push(read_u64(&mut r)? as usize);
        }
        let mut neighbors = Vec::with_capacity(m);
        for _ in 0..m {
            neighbors.push(read_u32(&mut r)?);
        }
        let label_count = read_u32(&mut r)?;
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            labels.push(read_u16(&mut r)?);
        }
        if offsets.first() != Some(&0) || offsets.last() != Some(&m) {
            return Err(Error::BadMagic);
        }
        let mut g = Graph {
            offsets,
            neighbors,
            labels,
            label_count,
            d_max: 0,
            d_avg: 0.0,
            external_ids: None,
        };
        let stats = g.degree_stats();
        g.d_max = stats.d_max;
        g.d_avg = stats.d_avg;
        Ok(g)
    }

    /// Debug check of the CSR invariants: sorted strict neighbor slices,
    /// symmetric edges, consistent cached stats.
    pub fn check_invariants(&self) -> bool {
        let n = self.n();
        if self.offsets[0] != 0 || self.offsets[n] != self.neighbors.len() {
            return false;
        }
        for v in 0..n {
            if self.offsets[v] > self.offsets[v + 1] {
                return false;
            }
            let s = self.neighbor_slice(v as u32);
            if !s.windows(2).all(|w| w[0] < w[1]) {
                return false;
            }
            if s.iter().any(|&u| u as usize >= n || u == v as u32) {
                return false;
            }
            if !s.iter().all(|&u| self.contains_edge(u, v as u32)) {
                return false;
            }
        }
        let stats = self.degree_stats();
        stats.d_max == self.d_max && (stats.d_avg - self.d_avg).abs() < 1e-12
    }
}

fn read_label_file(path: &Path) -> Result<Vec<(u64, String)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(v), Some(lab)) = (toks.next(), toks.next()) else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: "expected \"vertex label\"".into(),
            });
        };
        let v = v.parse::<u64>().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        out.push((v, lab.to_string()));
    }
    Ok(out)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::Truncated
        } else {
            Error::Io(e)
        }
    })
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    let mut b = [0u8; 2];
    read_exact(r, &mut b)?;
    Ok(u16::from_le_bytes(b))
}
