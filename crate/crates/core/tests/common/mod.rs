//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use s2graph::{Graph, Label, Labeling};

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_labeling<R: Rng>(rng: &mut R, n: usize) -> Labeling {
    Labeling::total(
        (0..n)
            .map(|_| {
                if rng.gen() {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect(),
    )
}

/// Graph on `n` vertices whose edges are the set bits of `mask` over the
/// pairs `(u, v)`, `u < v`, in lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Shortest `u`–`v` distance as the minimum length over every simple path.
pub fn brute_force_distance(g: &Graph, u: usize, v: usize) -> Option<usize> {
    fn walk(
        g: &Graph,
        x: usize,
        target: usize,
        depth: usize,
        on: &mut [bool],
        best: &mut Option<usize>,
    ) {
        if x == target {
            *best = Some(best.map_or(depth, |b| b.min(depth)));
            return;
        }
        for &y in g.neighbors(x) {
            if !on[y] {
                on[y] = true;
                walk(g, y, target, depth + 1, on, best);
                on[y] = false;
            }
        }
    }
    let mut on = vec![false; g.n()];
    on[u] = true;
    let mut best = None;
    walk(g, u, v, 0, &mut on, &mut best);
    best
}

/// Minimum length over every simple path from `u` to each vertex, found by
/// enumerating all simple paths that start at `u`.
pub fn brute_force_distances_from(g: &Graph, u: usize) -> Vec<Option<usize>> {
    fn walk(g: &Graph, x: usize, depth: usize, on: &mut [bool], best: &mut [Option<usize>]) {
        best[x] = Some(best[x].map_or(depth, |b| b.min(depth)));
        for &y in g.neighbors(x) {
            if !on[y] {
                on[y] = true;
                walk(g, y, depth + 1, on, best);
                on[y] = false;
            }
        }
    }
    let mut on = vec![false; g.n()];
    on[u] = true;
    let mut best = vec![None; g.n()];
    walk(g, u, 0, &mut on, &mut best);
    best
}

/// All-pairs distances by Floyd–Warshall.
pub fn floyd(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for v in 0..n {
        d[v][v] = 0;
        for &u in g.neighbors(v) {
            d[v][u] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect())
        .collect()
}

/// Connected components of the graph on `0..n` with the given edges, as a
/// component id per vertex (ids by depth-first discovery).
pub fn components(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut id = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if id[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        id[s] = count;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if id[y] == usize::MAX {
                    id[y] = count;
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    (id, count)
}

/// Reference cut analysis: oriented cut edges `(x, y)` with `f(x) = +1`,
/// the δ table built from Floyd–Warshall on `G - C`, and the homogeneous
/// component sizes.
pub struct Reference {
    pub cuts: Vec<(usize, usize)>,
    pub delta: Vec<Vec<Option<usize>>>,
    pub component_sizes: Vec<usize>,
    pub m: usize,
}

pub fn reference(g: &Graph, f: &Labeling) -> Reference {
    let mut cuts = Vec::new();
    let mut keep = Vec::new();
    for e in g.edges() {
        let (a, b) = e.endpoints();
        if f.at(a) == f.at(b) {
            keep.push((a, b));
        } else if f.at(a).is_positive() {
            cuts.push((a, b));
        } else {
            cuts.push((b, a));
        }
    }
    let residual = Graph::new(g.n(), keep.clone()).unwrap();
    let d = floyd(&residual);
    let delta = cuts
        .iter()
        .enumerate()
        .map(|(i, &(x1, y1))| {
            cuts.iter()
                .enumerate()
                .map(|(j, &(x2, y2))| {
                    if i == j {
                        Some(0)
                    } else {
                        Some(d[x1][x2]? + d[y1][y2]? + 1)
                    }
                })
                .collect()
        })
        .collect();
    let (comp, k) = components(g.n(), &keep);
    let mut component_sizes = vec![0; k];
    for &c in &comp {
        component_sizes[c] += 1;
    }
    let mut pairs: Vec<(usize, usize)> = cuts
        .iter()
        .map(|&(x, y)| (comp[x].min(comp[y]), comp[x].max(comp[y])))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Reference {
        m: pairs.len(),
        cuts,
        delta,
        component_sizes,
    }
}

impl Reference {
    /// Components of `H_r` from the reference δ table.
    pub fn h_components(&self, r: usize) -> usize {
        let mut edges = Vec::new();
        for i in 0..self.cuts.len() {
            for j in i + 1..self.cuts.len() {
                if self.delta[i][j].is_some_and(|d| d <= r) {
                    edges.push((i, j));
                }
            }
        }
        components(self.cuts.len(), &edges).1
    }

    pub fn max_finite_delta(&self) -> usize {
        self.delta
            .iter()
            .flatten()
            .filter_map(|d| *d)
            .max()
            .unwrap_or(0)
    }
}
