//! Planarity (genus zero) of the unweighted support graph, and an Euler
//! formula lower bound on the genus.
//!
//! The test splits the graph into biconnected components and runs the
//! Demoucron–Malgrange–Pertuiset face-embedding procedure on each.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::metric::MetricSpace;

/// Simple undirected graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl SimpleGraph {
    /// Self-loops are dropped and parallel edges merged.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut set = HashSet::new();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v || !set.insert((u.min(v), u.max(v))) {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        SimpleGraph {
            adj,
            edge_count: set.len(),
        }
    }

    pub fn complete(n: usize) -> Self {
        SimpleGraph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        SimpleGraph::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
    }

    pub fn from_space(space: &MetricSpace) -> Self {
        SimpleGraph::new(space.vertex_count(), space.support_edges())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Vertex sets of the connected components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Edge sets of the biconnected components (Hopcroft–Tarjan).
    fn biconnected_components(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.vertex_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut time = 0;
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut out = Vec::new();

        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent, next neighbour index)
            let mut frames: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            while let Some(&mut (u, parent, ref mut idx)) = frames.last_mut() {
                if *idx < self.adj[u].len() {
                    let v = self.adj[u][*idx];
                    *idx += 1;
                    if disc[v] == usize::MAX {
                        stack.push((u, v));
                        disc[v] = time;
                        low[v] = time;
                        time += 1;
                        frames.push((v, u, 0));
                    } else if v != parent && disc[v] < disc[u] {
                        stack.push((u, v));
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    frames.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if low[u] >= disc[parent] {
                            let mut comp = Vec::new();
                            while let Some(e) = stack.pop() {
                                comp.push(e);
                                if e == (parent, u) {
                                    break;
                                }
                            }
                            out.push(comp);
                        }
                    }
                }
            }
        }
        out
    }

    /// Length of the shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best: Option<usize> = None;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Induced subgraph on `vertices`, relabelled to `0..vertices.len()`.
    fn induced(&self, vertices: &[usize]) -> SimpleGraph {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges: Vec<(usize, usize)> = vertices
            .iter()
            .flat_map(|&u| {
                self.adj[u]
                    .iter()
                    .filter(|&&v| local[v] != usize::MAX && u < v)
                    .map(|&v| (local[u], local[v]))
                    .collect::<Vec<_>>()
            })
            .collect();
        SimpleGraph::new(vertices.len(), edges)
    }
}

pub fn is_planar(space: &MetricSpace) -> bool {
    is_planar_graph(&SimpleGraph::from_space(space))
}

pub fn is_planar_graph(g: &SimpleGraph) -> bool {
    let n = g.vertex_count();
    if n >= 3 && g.edge_count() > 3 * n - 6 {
        return false;
    }
    g.biconnected_components().into_iter().all(|edges| {
        let mut verts: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        verts.sort_unstable();
        verts.dedup();
        let local: std::collections::HashMap<usize, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let block = SimpleGraph::new(verts.len(), edges.iter().map(|(u, v)| (local[u], local[v])));
        biconnected_is_planar(&block)
    })
}

/// Face-embedding test for a biconnected simple graph.
fn biconnected_is_planar(g: &SimpleGraph) -> bool {
    let n = g.vertex_count();
    let m = g.edge_count();
    if m < 9 {
        return true;
    }
    if m > 3 * n - 6 {
        return false;
    }

    let cycle = find_cycle(g).expect("biconnected block with >= 3 vertices has a cycle");
    let mut in_h = vec![false; n];
    let mut h_edges: HashSet<(usize, usize)> = HashSet::new();
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    for (i, &v) in cycle.iter().enumerate() {
        in_h[v] = true;
        h_edges.insert(key(v, cycle[(i + 1) % cycle.len()]));
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle];

    loop {
        let fragments = fragments(g, &in_h, &h_edges);
        if fragments.is_empty() {
            return true;
        }
        let face_sets: Vec<HashSet<usize>> = faces.iter().map(|f| f.iter().copied().collect()).collect();
        let mut chosen: Option<(usize, usize)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = face_sets
                .iter()
                .enumerate()
                .filter(|(_, set)| frag.attachments.iter().all(|a| set.contains(a)))
                .map(|(i, _)| i)
                .collect();
            match admissible.len() {
                0 => return false,
                1 => {
                    chosen = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if chosen.is_none() {
                        chosen = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face_idx) = chosen.expect("at least one fragment");
        let path = fragment_path(g, &fragments[fi], &in_h);

        let face = faces.swap_remove(face_idx);
        let (start, end) = (path[0], *path.last().unwrap());
        let i = face.iter().position(|&v| v == start).unwrap();
        let j = face.iter().position(|&v| v == end).unwrap();
        let k = face.len();
        let arc = |from: usize, to: usize| -> Vec<usize> {
            let mut out = vec![face[from]];
            let mut p = from;
            while p != to {
                p = (p + 1) % k;
                out.push(face[p]);
            }
            out
        };
        let interior = &path[1..path.len() - 1];
        let mut first = arc(i, j);
        first.extend(interior.iter().rev());
        let mut second = arc(j, i);
        second.extend(interior.iter());
        faces.push(first);
        faces.push(second);

        for w in path.windows(2) {
            h_edges.insert(key(w[0], w[1]));
        }
        for &v in &path {
            in_h[v] = true;
        }
    }
}

fn find_cycle(g: &SimpleGraph) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![0usize];
    depth[0] = 0;
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                parent[v] = u;
                stack.push(v);
            } else if v != parent[u] {
                // tree paths from u and v up to their common ancestor
                let (mut a, mut b) = (u, v);
                let mut left = Vec::new();
                let mut right = Vec::new();
                while a != b {
                    if depth[a] >= depth[b] {
                        left.push(a);
                        a = parent[a];
                    } else {
                        right.push(b);
                        b = parent[b];
                    }
                }
                left.push(a);
                left.extend(right.into_iter().rev());
                return Some(left);
            }
        }
    }
    None
}

struct Fragment {
    attachments: Vec<usize>,
    /// Empty for a single chord between two embedded vertices.
    interior: Vec<usize>,
}

fn fragments(g: &SimpleGraph, in_h: &[bool], h_edges: &HashSet<(usize, usize)>) -> Vec<Fragment> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    for u in 0..n {
        if !in_h[u] {
            continue;
        }
        for &v in g.neighbors(u) {
            if u < v && in_h[v] && !h_edges.contains(&(u, v)) {
                out.push(Fragment {
                    attachments: vec![u, v],
                    interior: Vec::new(),
                });
            }
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if in_h[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut interior = vec![s];
        let mut attachments = HashSet::new();
        let mut i = 0;
        while i < interior.len() {
            let u = interior[i];
            i += 1;
            for &v in g.neighbors(u) {
                if in_h[v] {
                    attachments.insert(v);
                } else if !seen[v] {
                    seen[v] = true;
                    interior.push(v);
                }
            }
        }
        let mut attachments: Vec<usize> = attachments.into_iter().collect();
        attachments.sort_unstable();
        out.push(Fragment { attachments, interior });
    }
    out
}

/// A path through the fragment joining two distinct attachment vertices.
fn fragment_path(g: &SimpleGraph, frag: &Fragment, in_h: &[bool]) -> Vec<usize> {
    if frag.interior.is_empty() {
        return frag.attachments.clone();
    }
    let start = frag.attachments[0];
    let inside: HashSet<usize> = frag.interior.iter().copied().collect();
    let mut prev = std::collections::HashMap::new();
    let mut queue = VecDeque::new();
    for &v in g.neighbors(start) {
        if inside.contains(&v) && !prev.contains_key(&v) {
            prev.insert(v, start);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        if let Some(&end) = g.neighbors(u).iter().find(|&&w| in_h[w] && w != start) {
            let mut path = vec![end, u];
            let mut cur = u;
            while let Some(&p) = prev.get(&cur) {
                path.push(p);
                if p == start {
                    break;
                }
                cur = p;
            }
            path.reverse();
            return path;
        }
        for &v in g.neighbors(u) {
            if inside.contains(&v) && !prev.contains_key(&v) {
                prev.insert(v, u);
                queue.push_back(v);
            }
        }
    }
    unreachable!("fragments of a biconnected graph have two attachments")
}

/// Random connected planar graph on `n ≥ 1` vertices: a stacked
/// triangulation (each new vertex is put inside a random face) followed by
/// deletion of each non-tree edge with probability `drop`.
pub fn random_planar_graph<R: Rng + ?Sized>(n: usize, drop: f64, rng: &mut R) -> SimpleGraph {
    if n <= 3 {
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        return SimpleGraph::new(n, edges);
    }
    let mut edges = vec![(0, 1), (1, 2), (0, 2)];
    let mut faces = vec![[0, 1, 2], [0, 1, 2]];
    // the tree keeps the first edge that attached each new vertex
    let mut tree: HashSet<(usize, usize)> = HashSet::from([(0, 1), (1, 2)]);
    for v in 3..n {
        let f = faces.swap_remove(rng.random_range(0..faces.len()));
        for &u in &f {
            edges.push((u, v));
        }
        tree.insert((f[0].min(v), f[0].max(v)));
        faces.push([f[0], f[1], v]);
        faces.push([f[1], f[2], v]);
        faces.push([f[0], f[2], v]);
    }
    // relabel so that vertex indices carry no construction order
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let kept = edges
        .into_iter()
        .filter(|&(u, v)| tree.contains(&(u.min(v), u.max(v))) || rng.random::<f64>() >= drop)
        .map(|(u, v)| (label[u], label[v]));
    SimpleGraph::new(n, kept)
}

/// Euler-formula genus bound per connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusBound {
    pub per_component: Vec<usize>,
    /// Sum over components (a convention for disconnected spaces).
    pub total: usize,
}

/// For a connected component with girth `γ`, `V − E + F = 2 − 2g` and
/// `2E ≥ γF` give `g ≥ ((γ−2)E − γ(V−2)) / 2γ`. Nonplanar components get at
/// least 1.
pub fn genus_lower_bound(space: &MetricSpace) -> GenusBound {
    genus_lower_bound_graph(&SimpleGraph::from_space(space))
}

pub fn genus_lower_bound_graph(g: &SimpleGraph) -> GenusBound {
    let per_component: Vec<usize> = g
        .components()
        .into_iter()
        .map(|comp| {
            let sub = g.induced(&comp);
            let v = sub.vertex_count() as i64;
            let e = sub.edge_count() as i64;
            let euler = match sub.girth() {
                None => 0,
                Some(girth) => {
                    let girth = girth as i64;
                    let num = (girth - 2) * e - girth * (v - 2);
                    let den = 2 * girth;
                    if num <= 0 {
                        0
                    } else {
                        ((num + den - 1) / den) as usize
                    }
                }
            };
            if euler == 0 && !is_planar_graph(&sub) {
                1
            } else {
                euler
            }
        })
        .collect();
    let total = per_component.iter().sum();
    GenusBound { per_component, total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_named_graphs() {
        assert!(is_planar_graph(&SimpleGraph::complete(4)));
        assert!(!is_planar_graph(&SimpleGraph::complete(5)));
        assert!(!is_planar_graph(&SimpleGraph::complete_bipartite(3, 3)));
        assert!(is_planar_graph(&SimpleGraph::complete_bipartite(2, 7)));
        for n in 3..8 {
            assert!(!is_planar_graph(&SimpleGraph::complete_bipartite(n, n)));
        }
    }

    #[test]
    fn petersen_is_nonplanar() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = SimpleGraph::new(10, outer.chain(spokes).chain(inner));
        assert_eq!(g.edge_count(), 15);
        assert!(!is_planar_graph(&g));
        assert_eq!(g.girth(), Some(5));
    }

    #[test]
    fn planar_families() {
        // grid with diagonals in one direction stays planar
        let w = 6;
        let id = |r: usize, c: usize| r * w + c;
        let mut edges = Vec::new();
        for r in 0..w {
            for c in 0..w {
                if c + 1 < w {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < w {
                    edges.push((id(r, c), id(r + 1, c)));
                }
                if r + 1 < w && c + 1 < w {
                    edges.push((id(r, c), id(r + 1, c + 1)));
                }
            }
        }
        let g = SimpleGraph::new(w * w, edges.clone());
        assert!(is_planar_graph(&g));
        // one long anti-diagonal chord across the whole grid is still planar
        edges.push((id(0, w - 1), id(w - 1, 0)));
        assert!(is_planar_graph(&SimpleGraph::new(w * w, edges)));
        // wheel and the octahedron
        let wheel = SimpleGraph::new(8, (1..8).map(|i| (0, i)).chain((1..8).map(|i| (i, i % 7 + 1))));
        assert!(is_planar_graph(&wheel));
        let octa = SimpleGraph::new(6, (0..6).flat_map(|u| (u + 1..6).filter(move |v| v - u != 3).map(move |v| (u, v))));
        assert_eq!(octa.edge_count(), 12);
        assert!(is_planar_graph(&octa));
    }

    #[test]
    fn cut_vertices_split_blocks() {
        // two K4s sharing a vertex, plus a pendant path
        let mut edges: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        edges.extend((3..7).flat_map(|u| (u + 1..7).map(move |v| (u, v))));
        edges.extend([(6, 7), (7, 8)]);
        assert!(is_planar_graph(&SimpleGraph::new(9, edges.clone())));
        // sharing a vertex with a K5 makes it nonplanar
        edges.extend((9..13).map(|v| (8, v)));
        edges.extend((9..13).flat_map(|u| (u + 1..13).map(move |v| (u, v))));
        assert!(!is_planar_graph(&SimpleGraph::new(13, edges)));
    }

    #[test]
    fn genus_bounds_for_known_graphs() {
        assert_eq!(genus_lower_bound_graph(&SimpleGraph::complete(4)).total, 0);
        assert_eq!(genus_lower_bound_graph(&SimpleGraph::complete_bipartite(3, 3)).total, 1);
        assert_eq!(genus_lower_bound_graph(&SimpleGraph::complete(7)).total, 1);
        assert_eq!(genus_lower_bound_graph(&SimpleGraph::complete(5)).total, 1);
        // genus(K_{n,n}) = ceil((n-2)^2 / 4) is attained by the bipartite bound
        assert_eq!(genus_lower_bound_graph(&SimpleGraph::complete_bipartite(9, 9)).total, 13);
        let two = SimpleGraph::new(12, (0..6).flat_map(|u| (u + 1..6).flat_map(move |v| [(u, v), (u + 6, v + 6)])));
        let b = genus_lower_bound_graph(&two);
        assert_eq!(b.per_component, vec![1, 1]);
        assert_eq!(b.total, 2);
    }

    #[test]
    fn random_planar_graphs_are_planar_and_connected() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..300 {
            let n = 1 + trial % 25;
            let g = random_planar_graph(n, 0.3, &mut rng);
            assert_eq!(g.components().len(), 1);
            assert!(is_planar_graph(&g));
            assert!(g.edge_count() <= (3 * n).saturating_sub(6).max(n - 1));
        }
        // without dropping, stacked triangulations are maximal planar
        let g = random_planar_graph(12, 0.0, &mut rng);
        assert_eq!(g.edge_count(), 3 * 12 - 6);
        let mut edges: Vec<(usize, usize)> = (0..12).flat_map(|u| g.neighbors(u).iter().map(move |&v| (u, v))).collect();
        let missing = (0..12).flat_map(|u| (u + 1..12).map(move |v| (u, v))).find(|&(u, v)| !g.has_edge(u, v)).unwrap();
        edges.push(missing);
        assert!(!is_planar_graph(&SimpleGraph::new(12, edges)));
    }

    #[test]
    fn trees_and_empty_graphs() {
        let tree = SimpleGraph::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert!(is_planar_graph(&tree));
        assert_eq!(tree.girth(), None);
        assert_eq!(genus_lower_bound_graph(&tree).total, 0);
        assert!(is_planar_graph(&SimpleGraph::new(0, [])));
    }
}
