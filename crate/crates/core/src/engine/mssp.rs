//! Midpoint of the shortest shortest path between oppositely labeled vertices.
//!
//! The minimizing pair is found without an all-pairs sweep: a layered BFS
//! from every `+1` vertex stops at the first layer that reaches a `-1` vertex,
//! which fixes the minimum distance `D` and the `-1` members of all optimal
//! pairs. A reverse BFS truncated at depth `D` yields the `+1` members. The
//! lowest-id member `a` of any optimal pair is then the first coordinate of
//! the lexicographically smallest pair, and its partner is the lowest-id
//! opposite vertex at distance exactly `D` from `a`.
//!
//! Edges joining two observed vertices with different labels are ignored,
//! so the search always runs on the graph with known cut edges removed.

use std::collections::VecDeque;

use crate::graph::{Graph, Path};
use crate::labeling::{Label, Labeling};

/// The pair selected by [`mssp`] and the midpoint to query next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsspChoice {
    /// `(a, b)` with `a < b`.
    pub pair: (usize, usize),
    /// Shortest path from `a` to `b`.
    pub path: Path,
    pub midpoint: usize,
}

/// Midpoint vertex of the shortest among all shortest paths that connect two
/// observed vertices with opposite labels, or `None` if no such pair is
/// connected.
///
/// Ties between pairs go to the lexicographically smallest `(distance, a, b)`
/// with `a < b`. On an odd-length path the lower id of the two centered
/// vertices wins.
pub fn mssp(g: &Graph, observed: &Labeling) -> Option<usize> {
    mssp_choice(g, observed).map(|c| c.midpoint)
}

pub fn mssp_choice(g: &Graph, observed: &Labeling) -> Option<MsspChoice> {
    MsspSearch::new(g.n()).choose(g, observed.as_slice())
}

/// Midpoint of a path under the lower-id rule.
pub fn path_midpoint(path: &Path) -> usize {
    let v = path.vertices();
    let len = path.len();
    let lo = v[len / 2];
    let hi = v[len.div_ceil(2)];
    lo.min(hi)
}

/// Reusable BFS buffers; stamps avoid clearing `O(n)` arrays on every call.
#[derive(Clone, Debug)]
pub(crate) struct MsspSearch {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    parent: Vec<usize>,
    generation: u32,
    queue: VecDeque<usize>,
}

fn opposite(labels: &[Option<Label>], x: usize, y: usize) -> bool {
    matches!((labels[x], labels[y]), (Some(a), Some(b)) if a != b)
}

impl MsspSearch {
    pub(crate) fn new(n: usize) -> Self {
        MsspSearch {
            stamp: vec![0; n],
            dist: vec![0; n],
            parent: vec![0; n],
            generation: 0,
            queue: VecDeque::new(),
        }
    }

    fn next_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        self.queue.clear();
    }

    fn seen(&self, v: usize) -> bool {
        self.stamp[v] == self.generation
    }

    fn visit(&mut self, v: usize, d: u32, parent: usize) {
        self.stamp[v] = self.generation;
        self.dist[v] = d;
        self.parent[v] = parent;
        self.queue.push_back(v);
    }

    /// Layered BFS from `sources`, ending after the first layer that contains
    /// a vertex labeled `target` (or after `max_depth`). Returns the vertices
    /// labeled `target` in that final layer and its depth.
    fn layered(
        &mut self,
        g: &Graph,
        labels: &[Option<Label>],
        sources: &[usize],
        target: Label,
        max_depth: u32,
    ) -> Option<(u32, Vec<usize>)> {
        self.next_generation();
        for &s in sources {
            self.visit(s, 0, s);
        }
        let mut hits = Vec::new();
        let mut depth = 0;
        while depth < max_depth && !self.queue.is_empty() {
            let layer = self.queue.len();
            for _ in 0..layer {
                let x = self.queue.pop_front().unwrap();
                for &y in g.neighbors(x) {
                    if self.seen(y) || opposite(labels, x, y) {
                        continue;
                    }
                    self.visit(y, depth + 1, x);
                    if labels[y] == Some(target) {
                        hits.push(y);
                    }
                }
            }
            depth += 1;
            if !hits.is_empty() {
                return Some((depth, hits));
            }
        }
        None
    }

    /// BFS path from `a` to `b` with the same scan order as
    /// [`Graph::shortest_path`], skipping known cut edges.
    pub(crate) fn path(
        &mut self,
        g: &Graph,
        labels: &[Option<Label>],
        a: usize,
        b: usize,
    ) -> Option<Path> {
        self.next_generation();
        self.visit(a, 0, a);
        'search: while let Some(x) = self.queue.pop_front() {
            for &y in g.neighbors(x) {
                if self.seen(y) || opposite(labels, x, y) {
                    continue;
                }
                self.visit(y, self.dist[x] + 1, x);
                if y == b {
                    break 'search;
                }
            }
        }
        if !self.seen(b) {
            return None;
        }
        Some(self.trace(a, b))
    }

    fn trace(&self, a: usize, b: usize) -> Path {
        let mut vertices = vec![b];
        let mut x = b;
        while x != a {
            x = self.parent[x];
            vertices.push(x);
        }
        vertices.reverse();
        Path::from_vertices(vertices)
    }

    pub(crate) fn choose(&mut self, g: &Graph, labels: &[Option<Label>]) -> Option<MsspChoice> {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (v, l) in labels.iter().enumerate() {
            match l {
                Some(Label::Positive) => pos.push(v),
                Some(Label::Negative) => neg.push(v),
                None => {}
            }
        }
        if pos.is_empty() || neg.is_empty() {
            return None;
        }
        let (depth, neg_hits) = self.layered(g, labels, &pos, Label::Negative, u32::MAX)?;
        let (_, pos_hits) = self
            .layered(g, labels, &neg, Label::Positive, depth)
            .expect("distance is symmetric");
        let a = neg_hits
            .iter()
            .chain(pos_hits.iter())
            .copied()
            .min()
            .unwrap();
        let a_label = labels[a].unwrap();
        let (_, partners) = self
            .layered(g, labels, &[a], -a_label, depth)
            .expect("a belongs to an optimal pair");
        let b = partners.into_iter().min().unwrap();
        debug_assert!(a < b);
        // The search from `a` scans neighbors in the same order as a plain
        // BFS, so its parent pointers already hold the canonical path.
        let path = self.trace(a, b);
        debug_assert_eq!(path.len() as u32, depth);
        let midpoint = path_midpoint(&path);
        Some(MsspChoice {
            pair: (a, b),
            path,
            midpoint,
        })
    }
}
