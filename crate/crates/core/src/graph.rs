//! Undirected simple graphs over dense vertex ids `0..n`.
//!
//! Adjacency lists are kept sorted so that every traversal scans neighbors in
//! ascending id order. Shortest paths are therefore deterministic: among all
//! minimum-length paths, BFS returns the one whose parent pointers were set by
//! the lowest-id discovery.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge stored with its endpoints in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(usize, usize);

impl Edge {
    /// Panics if `u == v`.
    pub fn new(u: usize, v: usize) -> Self {
        assert_ne!(u, v, "an edge needs two distinct endpoints");
        if u < v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.0, self.1)
    }
}

impl From<(usize, usize)> for Edge {
    fn from((u, v): (usize, usize)) -> Self {
        Edge::new(u, v)
    }
}

impl From<Edge> for (usize, usize) {
    fn from(e: Edge) -> Self {
        e.endpoints()
    }
}

/// A vertex sequence in which consecutive vertices are adjacent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    pub(crate) fn from_vertices(vertices: Vec<usize>) -> Self {
        debug_assert!(!vertices.is_empty());
        Path { vertices }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn source(&self) -> usize {
        self.vertices[0]
    }

    pub fn target(&self) -> usize {
        *self.vertices.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range ids.
    pub fn new<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<(usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for e in edges {
            let (u, v) = e.into();
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
            edge_count += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let e = Edge::new(u, w[0]);
                return Err(Error::DuplicateEdge(e.lo(), e.hi()));
            }
        }
        Ok(Graph { adj, edge_count })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| Edge(u, v))
        })
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// Minimum-edge-count path from `u` to `v`, or `None` when they lie in
    /// different components.
    pub fn shortest_path(&self, u: usize, v: usize) -> Result<Option<Path>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(bfs_path(self, u, v))
    }

    /// Hop distances from `source`; `None` marks unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap() + 1;
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Component index of every vertex plus the number of components.
    /// Components are numbered in order of their minimum vertex id.
    pub fn component_ids(&self) -> (Vec<usize>, usize) {
        const UNSEEN: usize = usize::MAX;
        let mut comp = vec![UNSEEN; self.n()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n() {
            if comp[start] != UNSEEN {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if comp[y] == UNSEEN {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Vertex partition into connected components, each block sorted, blocks
    /// ordered by ascending minimum vertex id.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let (comp, count) = self.component_ids();
        let mut blocks = vec![Vec::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            blocks[c].push(v);
        }
        blocks
    }

    /// A new graph with the same vertex set and `drop` removed.
    pub fn remove_edges<I, E>(&self, drop: I) -> Result<Graph>
    where
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        let mut g = self.clone();
        for e in drop {
            let e = e.into();
            g.remove_edge_in_place(e)?;
        }
        Ok(g)
    }

    pub(crate) fn remove_edge_in_place(&mut self, e: Edge) -> Result<()> {
        let (u, v) = e.endpoints();
        if v >= self.n() {
            return Err(Error::MissingEdge(u, v));
        }
        let iu = self.adj[u].binary_search(&v);
        let iv = self.adj[v].binary_search(&u);
        match (iu, iv) {
            (Ok(iu), Ok(iv)) => {
                self.adj[u].remove(iu);
                self.adj[v].remove(iv);
                self.edge_count -= 1;
                Ok(())
            }
            _ => Err(Error::MissingEdge(u, v)),
        }
    }

    /// Subgraph induced by `vertices`, re-indexed in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i;
        }
        let edges = self
            .edges()
            .filter(|e| index[e.lo()] != usize::MAX && index[e.hi()] != usize::MAX)
            .map(|e| (index[e.lo()], index[e.hi()]));
        Graph::new(vertices.len(), edges)
    }
}

/// BFS from `u` with ascending neighbor scan, stopping once `v` is discovered.
pub(crate) fn bfs_path(g: &Graph, u: usize, v: usize) -> Option<Path> {
    if u == v {
        return Some(Path { vertices: vec![u] });
    }
    let mut parent = vec![usize::MAX; g.n()];
    parent[u] = u;
    let mut queue = VecDeque::from([u]);
    'search: while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                if y == v {
                    break 'search;
                }
                queue.push_back(y);
            }
        }
    }
    if parent[v] == usize::MAX {
        return None;
    }
    let mut vertices = vec![v];
    let mut x = v;
    while x != u {
        x = parent[x];
        vertices.push(x);
    }
    vertices.reverse();
    Some(Path { vertices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn shortest_path_on_line() {
        let g = path_graph(3);
        let p = g.shortest_path(0, 2).unwrap().unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.vertices(), &[0, 1, 2]);
    }

    #[test]
    fn shortest_path_identity() {
        let g = path_graph(5);
        let p = g.shortest_path(3, 3).unwrap().unwrap();
        assert_eq!(p.len(), 0);
        assert_eq!(p.vertices(), &[3]);
    }

    #[test]
    fn shortest_path_unreachable() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.shortest_path(0, 2).unwrap(), None);
    }

    #[test]
    fn shortest_path_out_of_range() {
        let g = path_graph(3);
        assert!(matches!(
            g.shortest_path(0, 3),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn shortest_path_prefers_low_ids() {
        // 4-cycle 0-1-3-2-0: both routes from 0 to 3 have length 2.
        let g = Graph::new(4, [(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap();
        assert_eq!(
            g.shortest_path(0, 3).unwrap().unwrap().vertices(),
            &[0, 1, 3]
        );
    }

    #[test]
    fn components() {
        assert_eq!(
            Graph::empty(3).connected_components(),
            vec![vec![0], vec![1], vec![2]]
        );
        let tri = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.connected_components(), vec![vec![0, 1, 2]]);
        let two = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.connected_components(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(Graph::new(2, [(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Graph::new(2, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(2, [(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn remove_edges_cases() {
        let single = Graph::new(2, [(0, 1)]).unwrap();
        let g = single.remove_edges([(0, 1)]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(single.edge_count(), 1);

        let same = single.remove_edges(Vec::<Edge>::new()).unwrap();
        assert_eq!(same, single);

        let cycle = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let split = cycle.remove_edges([(0, 1), (2, 3)]).unwrap();
        assert_eq!(split.edge_count(), 2);
        assert_eq!(split.connected_components().len(), 2);

        assert!(matches!(
            single.remove_edges([(0, 1), (0, 1)]),
            Err(Error::MissingEdge(0, 1))
        ));
    }

    #[test]
    fn induced_subgraph_reindexes() {
        let g = path_graph(5);
        let sub = g.induced_subgraph(&[2, 3, 4]).unwrap();
        assert_eq!(
            sub.edges().collect::<Vec<_>>(),
            vec![Edge::new(0, 1), Edge::new(1, 2)]
        );
    }
}
