//! Complexity parameters of a labeled graph.
//!
//! A total labeling `f` splits `G` into homogeneous components `V_1..V_k`
//! (the components of `G - C`, where `C` is the cut set). Cut edges are
//! grouped into cut components by the pair of homogeneous components they
//! join. The distance between two cut edges `{x1,y1}` and `{x2,y2}`, oriented
//! so that the `x` endpoints are `+1`, is
//! `d(x1,x2) + d(y1,y2) + 1` measured in `G - C`, with the distance of an
//! edge to itself defined as 0. It is finite exactly when both edges lie in
//! the same cut component. `κ*` is the least radius at which the
//! neighborhood graph of cut edges under this distance has as many connected
//! components as there are cut components.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::labeling::{Label, Labeling};
use crate::math::{ceil_log2, ceil_tol};
use crate::union_find::UnionFind;

/// A cut edge with its `+1` endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedCut {
    pub positive: usize,
    pub negative: usize,
}

impl OrientedCut {
    pub fn edge(self) -> Edge {
        Edge::new(self.positive, self.negative)
    }
}

/// Cut edges joining one pair of homogeneous components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutComponent {
    /// Indices of the two homogeneous components, smaller first.
    pub between: (usize, usize),
    /// Indices into [`CutStructure::cuts`].
    pub cuts: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CutStructure {
    n: usize,
    cuts: Vec<OrientedCut>,
    boundary: Vec<usize>,
    residual: Graph,
    component_of: Vec<usize>,
    component_sizes: Vec<usize>,
    cut_components: Vec<CutComponent>,
    cut_component_of: Vec<usize>,
}

pub fn cut_structure(g: &Graph, f: &Labeling) -> Result<CutStructure> {
    CutStructure::new(g, f)
}

impl CutStructure {
    pub fn new(g: &Graph, f: &Labeling) -> Result<Self> {
        if f.len() != g.n() {
            return Err(Error::SizeMismatch {
                labeling: f.len(),
                graph: g.n(),
            });
        }
        f.require_total()?;
        let cuts: Vec<OrientedCut> = g
            .edges()
            .filter(|e| f.at(e.lo()) != f.at(e.hi()))
            .map(|e| {
                if f.at(e.lo()) == Label::Positive {
                    OrientedCut {
                        positive: e.lo(),
                        negative: e.hi(),
                    }
                } else {
                    OrientedCut {
                        positive: e.hi(),
                        negative: e.lo(),
                    }
                }
            })
            .collect();
        let mut on_boundary = vec![false; g.n()];
        for c in &cuts {
            on_boundary[c.positive] = true;
            on_boundary[c.negative] = true;
        }
        let boundary = (0..g.n()).filter(|&v| on_boundary[v]).collect();
        let residual = g.remove_edges(cuts.iter().map(|c| c.edge()))?;
        let (component_of, k) = residual.component_ids();
        let mut component_sizes = vec![0; k];
        for &c in &component_of {
            component_sizes[c] += 1;
        }

        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, c) in cuts.iter().enumerate() {
            let (r, s) = (component_of[c.positive], component_of[c.negative]);
            groups.entry((r.min(s), r.max(s))).or_default().push(i);
        }
        let mut cut_component_of = vec![0; cuts.len()];
        let cut_components: Vec<CutComponent> = groups
            .into_iter()
            .enumerate()
            .map(|(idx, (between, members))| {
                for &i in &members {
                    cut_component_of[i] = idx;
                }
                CutComponent {
                    between,
                    cuts: members,
                }
            })
            .collect();

        Ok(CutStructure {
            n: g.n(),
            cuts,
            boundary,
            residual,
            component_of,
            component_sizes,
            cut_components,
            cut_component_of,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cut edges, ordered by their undirected edge key.
    pub fn cuts(&self) -> &[OrientedCut] {
        &self.cuts
    }

    pub fn cut_edges(&self) -> Vec<Edge> {
        self.cuts.iter().map(|c| c.edge()).collect()
    }

    pub fn cut_size(&self) -> usize {
        self.cuts.len()
    }

    /// Boundary vertices in ascending order.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_size(&self) -> usize {
        self.boundary.len()
    }

    /// `G - C`.
    pub fn residual_graph(&self) -> &Graph {
        &self.residual
    }

    /// Homogeneous component index of each vertex.
    pub fn component_of(&self) -> &[usize] {
        &self.component_of
    }

    /// Number of homogeneous components.
    pub fn k(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.component_sizes
    }

    pub fn cut_components(&self) -> &[CutComponent] {
        &self.cut_components
    }

    /// Number of cut components.
    pub fn m(&self) -> usize {
        self.cut_components.len()
    }

    /// Cut component holding cut edge `i`.
    pub fn cut_component_of(&self, i: usize) -> usize {
        self.cut_component_of[i]
    }

    pub fn cut_index(&self, e: Edge) -> Option<usize> {
        self.cuts.binary_search_by_key(&e, |c| c.edge()).ok()
    }

    /// Minimum homogeneous component size over `n`, exact.
    pub fn balancedness(&self) -> Ratio<usize> {
        let min = self.component_sizes.iter().copied().min().unwrap_or(0);
        Ratio::new(min, self.n.max(1))
    }

    /// Whether `vertices` meets every homogeneous component.
    pub fn is_witness(&self, vertices: &[usize]) -> Result<bool> {
        let mut hit = vec![false; self.k()];
        for &v in vertices {
            if v >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            hit[self.component_of[v]] = true;
        }
        Ok(hit.into_iter().all(|h| h))
    }

    /// Residual distances from every boundary vertex, indexed by position in
    /// [`boundary`](Self::boundary).
    fn boundary_distances(&self) -> BoundaryDistances {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in self.boundary.iter().enumerate() {
            index[v] = i;
        }
        let rows = self
            .boundary
            .iter()
            .map(|&v| {
                let d = self.residual.distances_from(v);
                self.boundary.iter().map(|&u| d[u]).collect()
            })
            .collect();
        BoundaryDistances { index, rows }
    }

    /// δ between cut edges `i` and `j` (indices into [`cuts`](Self::cuts));
    /// `None` means infinite.
    pub fn delta_by_index(&self, i: usize, j: usize) -> Option<usize> {
        if i == j {
            return Some(0);
        }
        if self.cut_component_of[i] != self.cut_component_of[j] {
            return None;
        }
        let (a, b) = (self.cuts[i], self.cuts[j]);
        let dx = self.residual.distances_from(a.positive)[b.positive]?;
        let dy = self.residual.distances_from(a.negative)[b.negative]?;
        Some(dx + dy + 1)
    }

    /// δ between two cut edges given by endpoints.
    pub fn delta(&self, e1: Edge, e2: Edge) -> Result<Option<usize>> {
        let i = self
            .cut_index(e1)
            .ok_or(Error::NotACutEdge(e1.lo(), e1.hi()))?;
        let j = self
            .cut_index(e2)
            .ok_or(Error::NotACutEdge(e2.lo(), e2.hi()))?;
        Ok(self.delta_by_index(i, j))
    }

    /// Full δ table over all cut edges.
    pub fn delta_table(&self) -> Vec<Vec<Option<usize>>> {
        let dist = self.boundary_distances();
        (0..self.cuts.len())
            .map(|i| {
                (0..self.cuts.len())
                    .map(|j| {
                        if i == j {
                            Some(0)
                        } else {
                            dist.delta(&self.cuts[i], &self.cuts[j])
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Finite δ values between distinct cut edges, as `(δ, i, j)` with `i < j`,
    /// sorted ascending.
    fn finite_pairs(&self) -> Vec<(usize, usize, usize)> {
        let dist = self.boundary_distances();
        let mut pairs = Vec::new();
        for comp in &self.cut_components {
            for (a, &i) in comp.cuts.iter().enumerate() {
                for &j in &comp.cuts[a + 1..] {
                    let d = dist
                        .delta(&self.cuts[i], &self.cuts[j])
                        .expect("finite within a cut component");
                    pairs.push((d, i.min(j), i.max(j)));
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// Number of connected components of the neighborhood graph `H_r`.
    pub fn h_component_count(&self, r: usize) -> usize {
        let mut uf = UnionFind::new(self.cuts.len());
        for (d, i, j) in self.finite_pairs() {
            if d > r {
                break;
            }
            uf.union(i, j);
        }
        uf.set_count()
    }

    /// Least `r ≥ 1` such that `H_r` has exactly `m` components, found by a
    /// union-find sweep over the sorted finite δ values.
    pub fn kappa_star(&self) -> Result<usize> {
        if self.cuts.is_empty() {
            return Err(Error::UndefinedParameter("kappa*"));
        }
        let m = self.m();
        let mut uf = UnionFind::new(self.cuts.len());
        if uf.set_count() == m {
            return Ok(1);
        }
        for (d, i, j) in self.finite_pairs() {
            uf.union(i, j);
            if uf.set_count() == m {
                return Ok(d.max(1));
            }
        }
        unreachable!("H_r has m components once every finite pair is joined")
    }

    pub fn summary(&self) -> ComplexitySummary {
        let beta = self.balancedness();
        ComplexitySummary {
            n: self.n,
            cut_size: self.cut_size(),
            boundary_size: self.boundary_size(),
            m: self.m(),
            kappa_star: self.kappa_star().ok(),
            beta: Beta {
                numerator: *beta.numer(),
                denominator: *beta.denom(),
                value: *beta.numer() as f64 / *beta.denom() as f64,
            },
            k: self.k(),
        }
    }
}

struct BoundaryDistances {
    index: Vec<usize>,
    rows: Vec<Vec<Option<usize>>>,
}

impl BoundaryDistances {
    fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.rows[self.index[u]][self.index[v]]
    }

    fn delta(&self, a: &OrientedCut, b: &OrientedCut) -> Option<usize> {
        Some(self.get(a.positive, b.positive)? + self.get(a.negative, b.negative)? + 1)
    }
}

/// Exact balancedness, serialized with its float value alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beta {
    pub numerator: usize,
    pub denominator: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexitySummary {
    pub n: usize,
    pub cut_size: usize,
    pub boundary_size: usize,
    pub m: usize,
    /// `None` when the cut set is empty.
    pub kappa_star: Option<usize>,
    pub beta: Beta,
    pub k: usize,
}

pub fn complexity_summary(g: &Graph, f: &Labeling) -> Result<ComplexitySummary> {
    Ok(CutStructure::new(g, f)?.summary())
}

pub fn delta(g: &Graph, f: &Labeling, e1: Edge, e2: Edge) -> Result<Option<usize>> {
    CutStructure::new(g, f)?.delta(e1, e2)
}

pub fn kappa_star(g: &Graph, f: &Labeling) -> Result<usize> {
    CutStructure::new(g, f)?.kappa_star()
}

pub fn balancedness(g: &Graph, f: &Labeling) -> Result<Ratio<usize>> {
    Ok(CutStructure::new(g, f)?.balancedness())
}

pub fn is_witness(g: &Graph, f: &Labeling, vertices: &[usize]) -> Result<bool> {
    CutStructure::new(g, f)?.is_witness(vertices)
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {x} must lie in (0, 1)"
        )))
    }
}

/// Random sample size that meets every homogeneous component with
/// probability at least `1 - alpha`: `⌈ln(1/(βα)) / ln(1/(1-β))⌉`.
pub fn witness_size(beta: f64, alpha: f64) -> Result<u64> {
    check_open_unit("beta", beta)?;
    check_open_unit("alpha", alpha)?;
    let size = (1.0 / (beta * alpha)).ln() / (1.0 / (1.0 - beta)).ln();
    Ok(ceil_tol(size).max(0.0) as u64)
}

/// Query budget under which S² recovers the cut set with probability at
/// least `1 - epsilon`:
///
/// `witness_size(β, ε) + m(⌈log₂ n⌉ − ⌈log₂ κ⌉) + |∂C|(⌈log₂ κ⌉ + 1)`.
///
/// With `m = 0` only the random-sampling term remains.
pub fn budget_bound(
    n: usize,
    m: usize,
    kappa: usize,
    boundary_size: usize,
    beta: f64,
    epsilon: f64,
) -> Result<u64> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if kappa == 0 {
        return Err(Error::InvalidParameter("kappa must be at least 1".into()));
    }
    let random = witness_size(beta, epsilon)?;
    if m == 0 {
        return Ok(random);
    }
    let log_n = ceil_log2(n as u64) as i64;
    let log_k = ceil_log2(kappa as u64) as i64;
    let search = m as i64 * (log_n - log_k) + boundary_size as i64 * (log_k + 1);
    Ok((random as i64 + search).max(0) as u64)
}

/// [`budget_bound`] with every parameter measured on `(g, f)`; `kappa`
/// overrides the measured `κ*` when given.
pub fn budget_bound_for(
    structure: &CutStructure,
    kappa: Option<usize>,
    epsilon: f64,
) -> Result<u64> {
    let beta = structure.balancedness();
    let beta = *beta.numer() as f64 / *beta.denom() as f64;
    if structure.m() == 0 {
        return Err(Error::UndefinedParameter("budget bound"));
    }
    let kappa = match kappa {
        Some(k) => k,
        None => structure.kappa_star()?,
    };
    budget_bound(
        structure.n(),
        structure.m(),
        kappa,
        structure.boundary_size(),
        beta,
        epsilon,
    )
}
