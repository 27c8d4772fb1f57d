//! Finite metric spaces as nonnegatively weighted undirected graphs with the
//! shortest-path metric.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for distance comparisons.
pub const DIST_TOL: f64 = 1e-9;

/// `|a - b| <= DIST_TOL * max(|a|, |b|, 1)`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= DIST_TOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize, pub f64);

/// Weighted graph; distances are all-pairs shortest paths computed once on
/// first use and read-only afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct MetricSpace {
    vertices: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    dist: OnceLock<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    vertices: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawSpace> for MetricSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        MetricSpace::new(raw.vertices, raw.edges)
    }
}

impl From<MetricSpace> for RawSpace {
    fn from(s: MetricSpace) -> Self {
        RawSpace {
            vertices: s.vertices,
            edges: s.edges,
        }
    }
}

impl PartialEq for MetricSpace {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl MetricSpace {
    pub fn new(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertices];
        for &Edge(u, v, w) in &edges {
            for x in [u, v] {
                if x >= vertices {
                    return Err(Error::IndexOutOfRange { index: x, len: vertices });
                }
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) has weight {w}; weights must be finite and nonnegative"
                )));
            }
            adjacency[u].push((v, w));
            if u != v {
                adjacency[v].push((u, w));
            }
        }
        Ok(MetricSpace {
            vertices,
            edges,
            adjacency,
            dist: OnceLock::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Single-source shortest paths (binary-heap Dijkstra); unreachable
    /// vertices are at `+inf`.
    pub fn dijkstra(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapEntry(0.0, source));
        while let Some(HeapEntry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapEntry(nd, v));
                }
            }
        }
        dist
    }

    pub fn distances(&self) -> &[Vec<f64>] {
        self.dist
            .get_or_init(|| (0..self.vertices).map(|s| self.dijkstra(s)).collect())
    }

    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.distances()[a][b]
    }

    /// Whether `v` lies on some shortest path from `s` to `t`.
    pub fn on_shortest_path(&self, s: usize, t: usize, v: usize) -> bool {
        let d = self.distances();
        d[s][t].is_finite() && d[s][v] + d[v][t] <= d[s][t] + DIST_TOL * d[s][t].max(1.0)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertices];
        let mut out = Vec::new();
        for start in 0..self.vertices {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertices <= 1 || self.components().len() == 1
    }

    /// Unweighted simple support: self-loops dropped, parallel edges merged.
    pub fn support_edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.0 != e.1)
            .map(|e| (e.0.min(e.1), e.0.max(e.1)))
            .collect();
        set.into_iter().collect()
    }

    /// Disjoint union; returns the vertex offset of each part.
    pub fn disjoint_union(parts: &[MetricSpace]) -> (MetricSpace, Vec<usize>) {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut edges = Vec::new();
        let mut total = 0;
        for p in parts {
            offsets.push(total);
            edges.extend(p.edges.iter().map(|&Edge(u, v, w)| Edge(u + total, v + total, w)));
            total += p.vertices;
        }
        let space = MetricSpace::new(total, edges).expect("valid parts");
        (space, offsets)
    }

    /// Merges endpoints of zero-weight edges. Returns the quotient space and
    /// the map old vertex → new vertex. New vertices are numbered by order of
    /// first appearance; edges inside a class are dropped.
    pub fn quotient_zero_edges(&self) -> (MetricSpace, Vec<usize>) {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for &Edge(u, v, w) in &self.edges {
            if w == 0.0 {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
        let mut label = vec![usize::MAX; self.vertices];
        let mut map = vec![0; self.vertices];
        let mut next = 0;
        for v in 0..self.vertices {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            map[v] = label[r];
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.0] != map[e.1])
            .map(|&Edge(u, v, w)| Edge(map[u], map[v], w))
            .collect();
        (MetricSpace::new(next, edges).expect("valid quotient"), map)
    }

    /// Checks identity of indiscernibles, symmetry and the triangle
    /// inequality on the distance matrix (within [`DIST_TOL`]).
    pub fn satisfies_metric_axioms(&self) -> bool {
        let d = self.distances();
        let n = self.vertices;
        for a in 0..n {
            for b in 0..n {
                if (d[a][b] == 0.0) != (a == b) || !approx_eq(d[a][b], d[b][a]) && d[a][b].is_finite() {
                    return false;
                }
                for c in 0..n {
                    if d[a][b] + d[b][c] < d[a][c] - DIST_TOL * d[a][c].max(1.0) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Graphviz text: agent vertices as boxes, alternative vertices as
    /// ellipses when a placement is supplied.
    pub fn to_dot(&self, placement: Option<&Placement>) -> String {
        let mut out = String::from("graph metric_space {\n");
        for v in 0..self.vertices {
            let mut labels = Vec::new();
            if let Some(p) = placement {
                labels.extend(p.alpha.iter().enumerate().filter(|(_, &x)| x == v).map(|(a, _)| format!("a{a}")));
                labels.extend(p.beta.iter().enumerate().filter(|(_, &x)| x == v).map(|(x, _)| format!("x{x}")));
            }
            if labels.is_empty() {
                let _ = writeln!(out, "  v{v};");
            } else {
                let _ = writeln!(out, "  v{v} [label=\"{}\"];", labels.join(","));
            }
        }
        for &Edge(u, v, w) in &self.edges {
            let _ = writeln!(out, "  v{u} -- v{v} [label=\"{w}\"];");
        }
        out.push_str("}\n");
        out
    }
}

/// Random connected space: a uniformly random recursive tree plus each other
/// pair with probability `density`, weights uniform in `[lo, hi]`.
pub fn random_connected_space<R: Rng + ?Sized>(v: usize, density: f64, lo: f64, hi: f64, rng: &mut R) -> MetricSpace {
    let mut edges = Vec::new();
    for u in 1..v {
        edges.push(Edge(rng.random_range(0..u), u, rng.random_range(lo..=hi)));
    }
    let tree: BTreeSet<(usize, usize)> = edges.iter().map(|e| (e.0, e.1)).collect();
    for a in 0..v {
        for b in a + 1..v {
            if !tree.contains(&(a, b)) && rng.random_bool(density) {
                edges.push(Edge(a, b, rng.random_range(lo..=hi)));
            }
        }
    }
    MetricSpace::new(v, edges).expect("weights in range")
}

/// `α`: agent → vertex, `β`: alternative → vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

impl Placement {
    pub fn check(&self, space: &MetricSpace) -> Result<()> {
        let len = space.vertex_count();
        match self.alpha.iter().chain(&self.beta).find(|&&v| v >= len) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len }),
            None => Ok(()),
        }
    }

    pub fn shifted(&self, offset: usize) -> Placement {
        Placement {
            alpha: self.alpha.iter().map(|v| v + offset).collect(),
            beta: self.beta.iter().map(|v| v + offset).collect(),
        }
    }
}

/// A space together with an optional placement, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedSpace {
    pub vertices: usize,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<usize>>,
}

impl PlacedSpace {
    pub fn from_parts(space: &MetricSpace, placement: Option<&Placement>) -> Self {
        PlacedSpace {
            vertices: space.vertex_count(),
            edges: space.edges().to_vec(),
            alpha: placement.map(|p| p.alpha.clone()),
            beta: placement.map(|p| p.beta.clone()),
        }
    }

    pub fn into_parts(self) -> Result<(MetricSpace, Option<Placement>)> {
        let space = MetricSpace::new(self.vertices, self.edges)?;
        let placement = match (self.alpha, self.beta) {
            (Some(alpha), Some(beta)) => {
                let p = Placement { alpha, beta };
                p.check(&space)?;
                Some(p)
            }
            (None, None) => None,
            _ => {
                return Err(Error::InvalidParameter(
                    "alpha and beta must be given together".into(),
                ))
            }
        };
        Ok((space, placement))
    }
}
