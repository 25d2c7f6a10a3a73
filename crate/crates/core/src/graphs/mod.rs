//! Explicit graphs: the handle type, edge-list I/O, and small named graphs.

mod build;
mod spectrum;

pub use build::{
    build_h, build_h2, build_hgl, congruence_orbits, congruence_witness, det_class_subgraph, hgl_degree,
    hgl_vertex_count, is_congruence_automorphism, vertex_matrix, BuildBudget, DetClass,
};
pub use spectrum::{
    certified_spectrum, deletion_chain_check, exact_nullity, float_spectrum, haemers_check, hoffman_bound,
    integral_candidates, interlaces, interlacing_check, spectrum, ChainReport, EigenValue, HaemersReport,
    SpectralEntry, SpectrumReport, EIGEN_TOL,
};

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a graph came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub family: String,
    pub q: Option<u32>,
    pub n: Option<usize>,
}

impl GraphMeta {
    pub fn named(family: &str) -> GraphMeta {
        GraphMeta { family: family.to_string(), q: None, n: None }
    }
}

/// Immutable simple graph on vertices `0..order`, adjacency stored as bitset rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphHandle {
    adj: Vec<FixedBitSet>,
    labels: Option<Vec<Vec<u8>>>,
    meta: GraphMeta,
}

impl GraphHandle {
    /// Builds from an edge list; loops are rejected, duplicate edges merged.
    pub fn from_edges(order: usize, edges: &[(usize, usize)], meta: GraphMeta) -> Result<Self> {
        let mut adj = vec![FixedBitSet::with_capacity(order); order];
        for &(u, v) in edges {
            if u >= order || v >= order {
                return Err(Error::Invalid(format!("edge ({u},{v}) outside 0..{order}")));
            }
            if u == v {
                return Err(Error::Invalid(format!("loop at vertex {u}")));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(GraphHandle { adj, labels: None, meta })
    }

    /// Builds from adjacency rows, checking symmetry and the absence of loops.
    pub fn from_rows(adj: Vec<FixedBitSet>, meta: GraphMeta) -> Result<Self> {
        let n = adj.len();
        for (u, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid("adjacency row has wrong length".into()));
            }
            if row.contains(u) {
                return Err(Error::Invalid(format!("loop at vertex {u}")));
            }
            if let Some(v) = row.ones().find(|&v| !adj[v].contains(u)) {
                return Err(Error::Invalid(format!("asymmetric pair ({u},{v})")));
            }
        }
        Ok(GraphHandle { adj, labels: None, meta })
    }

    /// Attaches one label per vertex; labels must be distinct.
    pub fn with_labels(mut self, labels: Vec<Vec<u8>>) -> Result<Self> {
        if labels.len() != self.order() {
            return Err(Error::Invalid(format!("{} labels for {} vertices", labels.len(), self.order())));
        }
        let mut sorted: Vec<&Vec<u8>> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate vertex labels".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn size(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn labels(&self) -> Option<&[Vec<u8>]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&[u8]> {
        self.labels.as_ref().map(|l| l[v].as_slice())
    }

    /// Vertex carrying `label`; labels of built graphs are sorted, so this
    /// tries a binary search before falling back to a scan.
    pub fn index_of(&self, label: &[u8]) -> Option<usize> {
        let labels = self.labels.as_ref()?;
        if let Ok(i) = labels.binary_search_by(|l| l.as_slice().cmp(label)) {
            return Some(i);
        }
        labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn row(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.order()).map(|v| self.degree(v)).collect()
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degrees();
        match d.first() {
            None => Some(0),
            Some(&k) => d.iter().all(|&x| x == k).then_some(k),
        }
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order()).flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Induced subgraph on `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<GraphHandle> {
        let mut pos = vec![usize::MAX; self.order()];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.order() {
                return Err(Error::Invalid(format!("vertex {v} out of range")));
            }
            if pos[v] != usize::MAX {
                return Err(Error::Invalid(format!("vertex {v} repeated")));
            }
            pos[v] = i;
        }
        let m = vertices.len();
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut row = FixedBitSet::with_capacity(m);
                for w in self.adj[v].ones() {
                    if pos[w] != usize::MAX {
                        row.insert(pos[w]);
                    }
                }
                row
            })
            .collect();
        let labels = self.labels.as_ref().map(|l| vertices.iter().map(|&v| l[v].clone()).collect());
        Ok(GraphHandle { adj, labels, meta: self.meta.clone() })
    }

    /// Same vertices, every non-loop pair flipped.
    pub fn complement(&self) -> GraphHandle {
        let n = self.order();
        let adj = (0..n)
            .map(|u| {
                let mut row = self.adj[u].clone();
                row.toggle_range(..);
                row.set(u, false);
                row
            })
            .collect();
        GraphHandle {
            adj,
            labels: self.labels.clone(),
            meta: GraphMeta { family: format!("complement of {}", self.meta.family), ..self.meta.clone() },
        }
    }

    /// Connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = FixedBitSet::with_capacity(n);
        let mut out = Vec::new();
        for s in 0..n {
            if seen.contains(s) {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in self.adj[u].ones() {
                    if !seen.contains(v) {
                        seen.insert(v);
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.order() <= 1 || self.components().len() == 1
    }

    /// BFS distances from `s`; unreachable vertices get `None`.
    pub fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.order()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued vertices have a distance");
            for v in self.adj[u].ones() {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.order();
        (0..n).map(|u| (0..n).map(|v| self.is_adjacent(u, v) as i64).collect()).collect()
    }

    /// Whether `map` sends edges to edges.
    pub fn is_homomorphism_to(&self, target: &GraphHandle, map: &[usize]) -> bool {
        map.len() == self.order()
            && map.iter().all(|&t| t < target.order())
            && self.edges().all(|(u, v)| target.is_adjacent(map[u], map[v]))
    }

    /// Writes the edge list: comment lines, `p edge N M`, then `u v` per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        let mut head = String::new();
        write!(head, "c family {}", self.meta.family.replace(char::is_whitespace, "_")).ok();
        if let Some(q) = self.meta.q {
            write!(head, " q {q}").ok();
        }
        if let Some(n) = self.meta.n {
            write!(head, " n {n}").ok();
        }
        writeln!(w, "{head}")?;
        if let Some(labels) = &self.labels {
            for (i, l) in labels.iter().enumerate() {
                writeln!(w, "c v {i} {}", hex::encode(l))?;
            }
        }
        writeln!(w, "p edge {} {}", self.order(), self.size())?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<GraphHandle> {
        let mut meta = GraphMeta::default();
        let mut labels: Vec<(usize, Vec<u8>)> = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Invalid(format!("line {}: {what}", lineno + 1));
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("c") => match parts.next() {
                    Some("v") => {
                        let i =
                            parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("label index"))?;
                        let l =
                            parts.next().and_then(|s| hex::decode(s).ok()).ok_or_else(|| bad("label hex"))?;
                        labels.push((i, l));
                    }
                    Some("family") => {
                        let rest: Vec<&str> = parts.collect();
                        meta.family = rest.first().unwrap_or(&"").to_string();
                        for kv in rest[1..].chunks(2) {
                            match kv {
                                ["q", v] => meta.q = v.parse().ok(),
                                ["n", v] => meta.n = v.parse().ok(),
                                _ => {}
                            }
                        }
                    }
                    _ => {}
                },
                Some("p") => {
                    if parts.next() != Some("edge") {
                        return Err(bad("expected `p edge N M`"));
                    }
                    let n = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("vertex count"))?;
                    let m = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("edge count"))?;
                    header = Some((n, m));
                }
                Some(tok) => {
                    let u: usize = tok.parse().map_err(|_| bad("vertex"))?;
                    let v: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("vertex"))?;
                    edges.push((u, v));
                }
                None => {}
            }
        }
        let (n, m) = header.ok_or_else(|| Error::Invalid("missing `p edge` header".into()))?;
        let g = GraphHandle::from_edges(n, &edges, meta)?;
        if g.size() != m {
            return Err(Error::Invalid(format!("header says {m} edges, found {}", g.size())));
        }
        if labels.is_empty() {
            return Ok(g);
        }
        if labels.len() != n {
            return Err(Error::Invalid(format!("{} labels for {n} vertices", labels.len())));
        }
        labels.sort_by_key(|(i, _)| *i);
        if labels.iter().enumerate().any(|(k, (i, _))| k != *i) {
            return Err(Error::Invalid("label indices are not 0..N".into()));
        }
        g.with_labels(labels.into_iter().map(|(_, l)| l).collect())
    }
}

pub fn complete(m: usize) -> GraphHandle {
    let edges: Vec<(usize, usize)> = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v))).collect();
    GraphHandle::from_edges(m, &edges, GraphMeta::named(&format!("K{m}"))).expect("valid edges")
}

pub fn cycle(m: usize) -> GraphHandle {
    assert!(m >= 3, "a cycle needs at least 3 vertices");
    let edges: Vec<(usize, usize)> = (0..m).map(|u| (u, (u + 1) % m)).collect();
    GraphHandle::from_edges(m, &edges, GraphMeta::named(&format!("C{m}"))).expect("valid edges")
}

/// Path on `m` vertices.
pub fn path(m: usize) -> GraphHandle {
    let edges: Vec<(usize, usize)> = (1..m).map(|u| (u - 1, u)).collect();
    GraphHandle::from_edges(m, &edges, GraphMeta::named(&format!("P{m}"))).expect("valid edges")
}

/// The Petersen graph as the Kneser graph on 2-subsets of a 5-set.
pub fn petersen() -> GraphHandle {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let mut edges = Vec::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate().skip(i + 1) {
            if a != c && a != d && b != c && b != d {
                edges.push((i, j));
            }
        }
    }
    GraphHandle::from_edges(10, &edges, GraphMeta::named("petersen")).expect("valid edges")
}

/// Cartesian product `K_a x K_b`: vertices `(i, j)` numbered `i * b + j`,
/// adjacent when they agree in exactly one coordinate.
pub fn rook_graph(a: usize, b: usize) -> GraphHandle {
    let mut edges = Vec::new();
    for u in 0..a * b {
        for v in u + 1..a * b {
            if (u / b == v / b) != (u % b == v % b) {
                edges.push((u, v));
            }
        }
    }
    GraphHandle::from_edges(a * b, &edges, GraphMeta::named(&format!("K{a}xK{b}"))).expect("valid edges")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_graphs() {
        let p = petersen();
        assert_eq!((p.order(), p.size(), p.regular_degree()), (10, 15, Some(3)));
        assert!(p.is_connected());
        let k = complete(5);
        assert_eq!((k.size(), k.regular_degree()), (10, Some(4)));
        assert_eq!(cycle(7).regular_degree(), Some(2));
        assert_eq!(path(3).degrees(), vec![1, 2, 1]);
        let r = rook_graph(3, 4);
        assert_eq!((r.order(), r.regular_degree()), (12, Some(5)));
    }

    #[test]
    fn complement_and_induced() {
        let p = petersen();
        let c = p.complement();
        assert_eq!(c.regular_degree(), Some(6));
        assert_eq!(c.complement().adj, p.adj);
        let h = p.induced(&[0, 1, 2, 3]).unwrap();
        assert_eq!(h.order(), 4);
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(h.is_adjacent(u, v), p.is_adjacent(u, v));
            }
        }
        assert!(p.induced(&[0, 0]).is_err());
    }

    #[test]
    fn components_and_distances() {
        let g = GraphHandle::from_edges(5, &[(0, 1), (1, 2), (3, 4)], GraphMeta::default()).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!g.is_connected());
        assert_eq!(g.distances_from(0), vec![Some(0), Some(1), Some(2), None, None]);
        assert!(GraphHandle::from_edges(2, &[(1, 1)], GraphMeta::default()).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = petersen().with_labels((0..10u8).map(|i| vec![i, 0xab]).collect()).unwrap();
        let text = g.to_edge_list_string();
        assert!(text.contains("p edge 10 15"));
        let back = GraphHandle::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.index_of(&[3, 0xab]), Some(3));
        assert!(GraphHandle::read_edge_list("p edge 3 2\n0 1\n".as_bytes()).is_err());
        assert!(GraphHandle::read_edge_list("0 1\n".as_bytes()).is_err());
    }

    #[test]
    fn homomorphism_predicate() {
        let c6 = cycle(6);
        let k2 = complete(2);
        assert!(c6.is_homomorphism_to(&k2, &[0, 1, 0, 1, 0, 1]));
        assert!(!c6.is_homomorphism_to(&k2, &[0, 0, 1, 0, 1, 0]));
    }
}
