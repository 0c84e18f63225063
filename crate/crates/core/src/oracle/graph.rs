//! Undirected weighted graphs read from SNAP-style edge lists.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Immutable undirected graph in compressed adjacency form.
///
/// Self-loops are dropped and parallel edges are merged by summing their
/// weights, so every `(u, v)` pair appears at most once in `edges`.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(u32, u32, f64)>,
    offsets: Vec<usize>,
    /// `(neighbor, edge index)` pairs, grouped by vertex through `offsets`.
    adjacency: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph over `vertex_count` vertices from raw `(u, v, w)` triples.
    pub fn from_edges(
        vertex_count: usize,
        raw: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut merged: HashMap<(u32, u32), usize> = HashMap::new();
        let mut edges: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v, w) in raw {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
            if u == v {
                continue;
            }
            let key = (u.min(v) as u32, u.max(v) as u32);
            match merged.get(&key) {
                Some(&idx) => edges[idx].2 += w,
                None => {
                    merged.insert(key, edges.len());
                    edges.push((key.0, key.1, w));
                }
            }
        }

        let mut degree = vec![0usize; vertex_count];
        for &(u, v, _) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..vertex_count].to_vec();
        let mut adjacency = vec![(0u32, 0u32); offsets[vertex_count]];
        for (idx, &(u, v, _)) in edges.iter().enumerate() {
            adjacency[cursor[u as usize]] = (v, idx as u32);
            cursor[u as usize] += 1;
            adjacency[cursor[v as usize]] = (u, idx as u32);
            cursor[v as usize] += 1;
        }

        Ok(Graph {
            vertex_count,
            edges,
            offsets,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs incident to `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn edge_weight(&self, edge: usize) -> f64 {
        self.edges[edge].2
    }

    /// Preferential-attachment graph: each new vertex links to `m` distinct
    /// earlier vertices chosen proportionally to degree.
    pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || n <= m {
            return Err(Error::validation(format!(
                "barabasi-albert needs n > m >= 1 (got n={n}, m={m})"
            )));
        }
        let mut rng = SeedStream::new(seed);
        let mut raw = Vec::with_capacity(n * m);
        // endpoint multiset; sampling from it is degree-proportional
        let mut ends: Vec<usize> = Vec::with_capacity(2 * n * m);
        for u in 0..=m {
            for v in (u + 1)..=m {
                raw.push((u, v, 1.0));
                ends.push(u);
                ends.push(v);
            }
        }
        let mut picked = Vec::with_capacity(m);
        for v in (m + 1)..n {
            picked.clear();
            while picked.len() < m {
                let t = ends[rng.below(ends.len())];
                if !picked.contains(&t) {
                    picked.push(t);
                }
            }
            for &t in &picked {
                raw.push((v, t, 1.0));
                ends.push(v);
                ends.push(t);
            }
        }
        Graph::from_edges(n, raw)
    }

    /// Erdős–Rényi G(n, p) with unit weights.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::validation(format!("edge probability {p} not in [0, 1]")));
        }
        let mut rng = SeedStream::new(seed);
        let mut raw = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.open01() < p {
                    raw.push((u, v, 1.0));
                }
            }
        }
        Graph::from_edges(n, raw)
    }
}

/// Reads a whitespace-separated edge list (`u v` or `u v w` per line, `#`
/// comments). Vertex labels are compacted to `0..n` in order of first
/// appearance; unweighted lines get weight 1.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut raw = Vec::new();
    let mut intern = |label: u64| -> usize {
        let next = ids.len();
        *ids.entry(label).or_insert(next)
    };

    for (lineno, line) in text.lines().enumerate() {
        let line_number = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: line_number,
                message: format!("expected `u v [w]`, found {} fields", fields.len()),
            });
        }
        let endpoint = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: line_number,
                message: format!("bad vertex id `{s}`"),
            })
        };
        let u = endpoint(fields[0])?;
        let v = endpoint(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_number,
                message: format!("bad weight `{s}`"),
            })?,
            None => 1.0,
        };
        if w < 0.0 || !w.is_finite() {
            return Err(Error::validation(format!(
                "line {line_number}: weight {w} must be finite and non-negative"
            )));
        }
        let (u, v) = (intern(u), intern(v));
        raw.push((u, v, w));
    }

    Graph::from_edges(ids.len(), raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let g = parse_edge_list("0 1\n1 2\n2 3").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(g.edges().iter().all(|e| e.2 == 1.0));
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn duplicates_merge() {
        let g = parse_edge_list("# c\n0 1 0.5\n0 1 0.5").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0], (0, 1, 1.0));
    }

    #[test]
    fn reversed_duplicate_merges_too() {
        let g = parse_edge_list("0 1 2\n1 0 3").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0), 5.0);
    }

    #[test]
    fn self_loop_dropped() {
        let g = parse_edge_list("0 0\n0 1").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.vertex_count(), 2);
    }

    #[test]
    fn labels_compacted_in_first_appearance_order() {
        let g = parse_edge_list("10 7\n7 3").unwrap();
        assert_eq!(g.vertex_count(), 3);
        // 10 -> 0, 7 -> 1, 3 -> 2
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn malformed_line_names_line_number() {
        match parse_edge_list("0 1\n\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("0 1 2 3"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(matches!(
            parse_edge_list("0 1 -1"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_edge_list("/definitely/not/here.txt").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::erdos_renyi(30, 0.2, 5).unwrap();
        for (idx, &(u, v, _)) in g.edges().iter().enumerate() {
            assert!(g.neighbors(u as usize).contains(&(v, idx as u32)));
            assert!(g.neighbors(v as usize).contains(&(u, idx as u32)));
        }
        let total: usize = (0..30).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn barabasi_albert_edge_count() {
        let g = Graph::barabasi_albert(200, 3, 1).unwrap();
        assert_eq!(g.edge_count(), 6 + 3 * (200 - 4));
    }
}
