//! Brute-force Kuratowski oracle: a graph is nonplanar iff it contains a
//! subdivision of K5 or K3,3. Exponential; meant for graphs with at most
//! about eight vertices. Uses only `std` so other test targets can include it.

#![allow(dead_code)]

/// Adjacency matrix of a simple undirected graph.
pub struct Graph {
    pub adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u != v {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
        Graph { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if self.adj[u][v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

pub fn has_kuratowski_subdivision(g: &Graph) -> bool {
    let n = g.n();
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
            .collect()
    };
    for branch in subsets(5) {
        if branch.iter().any(|&v| g.degree(v) < 4) {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..5)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .map(|(i, j)| (branch[i], branch[j]))
            .collect();
        if disjoint_paths(g, &pairs, 0, mask(&branch)) {
            return true;
        }
    }
    for six in subsets(6) {
        if six.iter().any(|&v| g.degree(v) < 3) {
            continue;
        }
        // sides containing six[0]
        for rest in 0u32..32 {
            if rest.count_ones() != 2 {
                continue;
            }
            let mut left = vec![six[0]];
            let mut right = Vec::new();
            for (i, &v) in six[1..].iter().enumerate() {
                if rest >> i & 1 == 1 {
                    left.push(v);
                } else {
                    right.push(v);
                }
            }
            let pairs: Vec<(usize, usize)> =
                left.iter().flat_map(|&a| right.iter().map(move |&b| (a, b))).collect();
            if disjoint_paths(g, &pairs, 0, mask(&six)) {
                return true;
            }
        }
    }
    false
}

fn mask(vs: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

/// Whether `pairs[idx..]` can be joined by paths whose interiors avoid
/// `used` and each other.
fn disjoint_paths(g: &Graph, pairs: &[(usize, usize)], idx: usize, used: u64) -> bool {
    if idx == pairs.len() {
        return true;
    }
    let (s, t) = pairs[idx];
    extend(g, pairs, idx, used, s, t, 0)
}

fn extend(g: &Graph, pairs: &[(usize, usize)], idx: usize, used: u64, cur: usize, t: usize, interior: u64) -> bool {
    if g.adj[cur][t] && disjoint_paths(g, pairs, idx + 1, used | interior) {
        return true;
    }
    for v in 0..g.n() {
        let bit = 1u64 << v;
        if g.adj[cur][v] && used & bit == 0 && interior & bit == 0 && extend(g, pairs, idx, used, v, t, interior | bit) {
            return true;
        }
    }
    false
}
