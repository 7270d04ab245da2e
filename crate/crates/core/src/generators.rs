//! Graph families: grids, dithered-core grids, `d`-dimensional lattices with a
//! geometric ground truth, and the adversarial chain family `G(r, k)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::labeling::{Label, Labeling};
use crate::oracle::LabelOracle;

/// 4-neighbor grid with row-major ids (`v = row * cols + col`).
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push(Edge::new(v, v + 1));
            }
            if r + 1 < rows {
                edges.push(Edge::new(v, v + cols));
            }
        }
    }
    Graph::new(rows * cols, edges).expect("grid edges are simple")
}

/// `+1` on columns `< split_col`, `-1` elsewhere.
pub fn half_split_labeling(rows: usize, cols: usize, split_col: usize) -> Labeling {
    Labeling::total(
        (0..rows * cols)
            .map(|v| {
                if v % cols < split_col {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect(),
    )
}

const DITHER_ATTEMPTS: usize = 10_000;

/// A `side × side` grid whose `+1` region is a centered `core_side` square with
/// a randomly dithered border.
///
/// Every cell 4-adjacent to a cell of the opposite initial membership (the
/// inner and outer rings of the square's border) flips membership
/// independently with probability `dither_prob`. Draws are rejected until
/// the labeling has exactly two homogeneous components.
pub fn dithered_core(
    side: usize,
    core_side: usize,
    dither_prob: f64,
    seed: u64,
) -> Result<(Graph, Labeling)> {
    if core_side == 0 || core_side >= side {
        return Err(Error::InvalidParameter(format!(
            "core side {core_side} must lie in [1, {side})"
        )));
    }
    if !(0.0..=1.0).contains(&dither_prob) {
        return Err(Error::InvalidParameter(format!(
            "dither probability {dither_prob} must lie in [0, 1]"
        )));
    }
    let g = grid_graph(side, side);
    let lo = (side - core_side) / 2;
    let hi = lo + core_side;
    let inside = |v: usize| {
        let (r, c) = (v / side, v % side);
        (lo..hi).contains(&r) && (lo..hi).contains(&c)
    };
    let ring: Vec<usize> = (0..g.n())
        .filter(|&v| g.neighbors(v).iter().any(|&u| inside(u) != inside(v)))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DITHER_ATTEMPTS {
        let mut member: Vec<bool> = (0..g.n()).map(inside).collect();
        for &v in &ring {
            if rng.gen_bool(dither_prob) {
                member[v] = !member[v];
            }
        }
        let f = Labeling::total(
            member
                .iter()
                .map(|&m| if m { Label::Positive } else { Label::Negative })
                .collect(),
        );
        if homogeneous_component_count(&g, &f) == 2 {
            return Ok((g, f));
        }
    }
    Err(Error::Generation(format!(
        "no dithered core with two homogeneous components after {DITHER_ATTEMPTS} attempts"
    )))
}

fn homogeneous_component_count(g: &Graph, f: &Labeling) -> usize {
    let cuts: Vec<Edge> = g.edges().filter(|e| f.at(e.lo()) != f.at(e.hi())).collect();
    g.remove_edges(cuts)
        .expect("cuts are graph edges")
        .component_ids()
        .1
}

/// Regular lattice on `[0,1]^d` with `w` points per axis. Vertex `v` owns the
/// cell `∏ [c_i / w, (c_i + 1) / w]`, where `c` are its coordinates in
/// row-major order (the last coordinate varies fastest).
#[derive(Clone, Debug)]
pub struct Lattice {
    graph: Graph,
    w: usize,
    d: usize,
}

pub fn lattice_graph(w: usize, d: usize) -> Result<Lattice> {
    Lattice::new(w, d)
}

impl Lattice {
    pub fn new(w: usize, d: usize) -> Result<Self> {
        if w == 0 || d == 0 {
            return Err(Error::InvalidParameter(
                "lattice needs w >= 1 and d >= 1".into(),
            ));
        }
        let n = u32::try_from(d)
            .ok()
            .and_then(|d| w.checked_pow(d))
            .filter(|&n| n <= 1 << 28)
            .ok_or_else(|| Error::InvalidParameter(format!("lattice {w}^{d} is too large")))?;
        let mut edges = Vec::with_capacity(d * n);
        let mut stride = 1;
        for _ in 0..d {
            for v in 0..n {
                if (v / stride) % w + 1 < w {
                    edges.push(Edge::new(v, v + stride));
                }
            }
            stride *= w;
        }
        let graph = Graph::new(n, edges)?;
        Ok(Lattice { graph, w, d })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn coords(&self, v: usize) -> Vec<usize> {
        let mut c = vec![0; self.d];
        let mut rest = v;
        for slot in c.iter_mut().rev() {
            *slot = rest % self.w;
            rest /= self.w;
        }
        c
    }

    pub fn vertex_at(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.w + c)
    }

    /// Per-axis `[lo, hi]` bounds of the cell owned by `v`.
    pub fn cell_bounds(&self, v: usize) -> Vec<(f64, f64)> {
        let w = self.w as f64;
        self.coords(v)
            .into_iter()
            .map(|c| (c as f64 / w, (c + 1) as f64 / w))
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        (self.w as f64).powi(-(self.d as i32))
    }

    /// Lattice vertex whose cell contains `x`.
    pub fn locate(&self, x: &[f64]) -> usize {
        let coords: Vec<usize> = x
            .iter()
            .map(|&t| ((t * self.w as f64) as usize).min(self.w - 1))
            .collect();
        self.vertex_at(&coords)
    }
}

/// An axis-aligned box `∏ [lower_i, upper_i] ⊆ [0,1]^d` marking the `+1`
/// region, and the label margin: a point's label agrees with the box
/// indicator with probability `0.5 + margin`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricTruth {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub margin: f64,
}

impl GeometricTruth {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, margin: f64) -> Result<Self> {
        let t = GeometricTruth {
            lower,
            upper,
            margin,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::InvalidParameter(
                "box bounds must be nonempty and of equal dimension".into(),
            ));
        }
        for (&a, &b) in self.lower.iter().zip(&self.upper) {
            if !(0.0 <= a && a < b && b <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "box side [{a}, {b}] must satisfy 0 <= a < b <= 1"
                )));
            }
        }
        if !(self.margin > 0.0 && self.margin <= 0.5) {
            return Err(Error::InfeasibleNoise(0.5 - self.margin));
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.lower.len()
    }

    pub fn flip_prob(&self) -> f64 {
        0.5 - self.margin
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&t, (&a, &b))| a <= t && t <= b)
    }

    /// Fraction of the cell of `v` that lies inside the box.
    pub fn cell_overlap(&self, lattice: &Lattice, v: usize) -> f64 {
        lattice
            .cell_bounds(v)
            .into_iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((lo, hi), (&a, &b))| (hi.min(b) - lo.max(a)).max(0.0) / (hi - lo))
            .product()
    }

    /// Label of the cell under a majority reading (`+1` when at least half of
    /// it lies in the box).
    pub fn cell_labeling(&self, lattice: &Lattice) -> Labeling {
        Labeling::total(
            (0..lattice.n())
                .map(|v| {
                    if self.cell_overlap(lattice, v) >= 0.5 {
                        Label::Positive
                    } else {
                        Label::Negative
                    }
                })
                .collect(),
        )
    }

    /// Excess risk of predicting `predicted` cell by cell:
    /// `2 · margin · vol(predicted region Δ box)`.
    pub fn excess_risk(&self, lattice: &Lattice, predicted: &Labeling) -> Result<f64> {
        if predicted.len() != lattice.n() {
            return Err(Error::SizeMismatch {
                labeling: predicted.len(),
                graph: lattice.n(),
            });
        }
        predicted.require_total()?;
        let wrong: f64 = (0..lattice.n())
            .map(|v| {
                let inside = self.cell_overlap(lattice, v);
                match predicted.at(v) {
                    Label::Positive => 1.0 - inside,
                    Label::Negative => inside,
                }
            })
            .sum();
        Ok(2.0 * self.margin * wrong * lattice.cell_volume())
    }
}

/// Samples a uniform point in the queried vertex's cell and returns its box
/// label, flipped with probability `0.5 - margin`.
#[derive(Clone, Debug)]
pub struct GeometricOracle {
    lattice: Lattice,
    truth: GeometricTruth,
    rng: ChaCha8Rng,
    queries: u64,
}

pub fn geometric_oracle(truth: GeometricTruth, w: usize, seed: u64) -> Result<GeometricOracle> {
    let lattice = Lattice::new(w, truth.d())?;
    GeometricOracle::new(lattice, truth, seed)
}

impl GeometricOracle {
    pub fn new(lattice: Lattice, truth: GeometricTruth, seed: u64) -> Result<Self> {
        truth.validate()?;
        if truth.d() != lattice.d() {
            return Err(Error::InvalidParameter(format!(
                "truth has dimension {} but lattice has {}",
                truth.d(),
                lattice.d()
            )));
        }
        Ok(GeometricOracle {
            lattice,
            truth,
            rng: ChaCha8Rng::seed_from_u64(seed),
            queries: 0,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn truth(&self) -> &GeometricTruth {
        &self.truth
    }
}

impl LabelOracle for GeometricOracle {
    fn n(&self) -> usize {
        self.lattice.n()
    }

    fn query(&mut self, v: usize) -> Result<Label> {
        self.lattice.graph.check_vertex(v)?;
        self.queries += 1;
        let point: Vec<f64> = self
            .lattice
            .cell_bounds(v)
            .into_iter()
            .map(|(lo, hi)| self.rng.gen_range(lo..hi))
            .collect();
        let label = if self.truth.contains(&point) {
            Label::Positive
        } else {
            Label::Negative
        };
        let flip = self.truth.flip_prob();
        if flip > 0.0 && self.rng.gen_bool(flip) {
            Ok(-label)
        } else {
            Ok(label)
        }
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

/// `p` linked copies of `G(r, k)`: two hubs joined by `r` vertex-disjoint
/// paths of `(k - 1) / 2` internal vertices each. The remaining
/// `n - p · block_size` vertices form a clique hanging off the last hub.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFamilySpec {
    pub r: usize,
    pub k: usize,
    pub p: usize,
    pub n: usize,
}

impl ChainFamilySpec {
    /// Spec with no remainder clique.
    pub fn pure(r: usize, k: usize, p: usize) -> Self {
        let mut spec = ChainFamilySpec { r, k, p, n: 0 };
        spec.n = spec.chain_vertices();
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.p == 0 {
            return Err(Error::InvalidParameter(
                "chain family needs r >= 1 and p >= 1".into(),
            ));
        }
        if self.k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "k = {} must be odd",
                self.k
            )));
        }
        if self.r >= 2 && self.k < 3 {
            return Err(Error::InvalidParameter(
                "parallel paths need k >= 3 to stay simple".into(),
            ));
        }
        if self.n < self.chain_vertices() {
            return Err(Error::Infeasible(format!(
                "n = {} is smaller than the chain's {} vertices",
                self.n,
                self.chain_vertices()
            )));
        }
        Ok(())
    }

    /// Internal vertices per path.
    pub fn path_internal(&self) -> usize {
        (self.k - 1) / 2
    }

    pub fn block_size(&self) -> usize {
        self.r * self.path_internal() + 2
    }

    pub fn chain_vertices(&self) -> usize {
        self.p * self.block_size()
    }

    pub fn left_hub(&self, block: usize) -> usize {
        block * self.block_size()
    }

    pub fn right_hub(&self, block: usize) -> usize {
        (block + 1) * self.block_size() - 1
    }

    /// Vertices of path `j` in block `b`, hub to hub.
    pub fn path_vertices(&self, b: usize, j: usize) -> Vec<usize> {
        let h = self.path_internal();
        let first = self.left_hub(b) + 1 + j * h;
        let mut v = vec![self.left_hub(b)];
        v.extend(first..first + h);
        v.push(self.right_hub(b));
        v
    }
}

pub fn chain_family_graph(spec: &ChainFamilySpec) -> Result<Graph> {
    spec.validate()?;
    let mut edges = Vec::new();
    for b in 0..spec.p {
        for j in 0..spec.r {
            let path = spec.path_vertices(b, j);
            edges.extend(path.windows(2).map(|w| Edge::new(w[0], w[1])));
        }
        if b + 1 < spec.p {
            edges.push(Edge::new(spec.right_hub(b), spec.left_hub(b + 1)));
        }
    }
    let start = spec.chain_vertices();
    if start < spec.n {
        edges.push(Edge::new(start - 1, start));
        for u in start..spec.n {
            for v in u + 1..spec.n {
                edges.push(Edge::new(u, v));
            }
        }
    }
    Graph::new(spec.n, edges)
}

/// Largest family accepted by [`enumerate_chain_labelings`].
pub const MAX_ENUMERATION: u128 = 1_000_000;

/// `C(p, m) · ((k + 1) / 2)^(m r)`, or `None` on overflow.
pub fn chain_family_size(spec: &ChainFamilySpec, m: usize) -> Option<u128> {
    let choose = binomial(spec.p as u128, m as u128)?;
    let per_path = (spec.k as u128).div_ceil(2);
    let exp = u32::try_from(m.checked_mul(spec.r)?).ok()?;
    choose.checked_mul(per_path.checked_pow(exp)?)
}

pub(crate) fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Every labeling obtained by choosing `m` of the `p` blocks and cutting each
/// path of a chosen block at one of its `(k + 1) / 2` edges, with vertex 0
/// labeled `+1`. Labels flip across each chosen block.
pub fn enumerate_chain_labelings(spec: &ChainFamilySpec, m: usize) -> Result<Vec<Labeling>> {
    spec.validate()?;
    if m > spec.p {
        return Err(Error::InvalidParameter(format!(
            "m = {m} exceeds the {} blocks",
            spec.p
        )));
    }
    let total = chain_family_size(spec, m).filter(|&t| t <= MAX_ENUMERATION);
    let Some(total) = total else {
        return Err(Error::Infeasible(format!(
            "labeling family exceeds {MAX_ENUMERATION} members"
        )));
    };
    let positions = spec.path_internal() + 1;
    let mut out = Vec::with_capacity(total as usize);
    for blocks in combinations(spec.p, m) {
        let mut cuts = vec![0usize; m * spec.r];
        loop {
            out.push(chain_labeling(spec, &blocks, &cuts));
            // Odometer over the cut positions.
            let mut i = 0;
            while i < cuts.len() {
                cuts[i] += 1;
                if cuts[i] < positions {
                    break;
                }
                cuts[i] = 0;
                i += 1;
            }
            if i == cuts.len() {
                break;
            }
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

/// `cuts[t * r + j]` is the edge index along path `j` of the `t`-th chosen
/// block at which the label flips.
fn chain_labeling(spec: &ChainFamilySpec, blocks: &[usize], cuts: &[usize]) -> Labeling {
    let mut values = vec![Label::Positive; spec.n];
    let mut current = Label::Positive;
    let mut chosen = blocks.iter().enumerate().peekable();
    for b in 0..spec.p {
        values[spec.left_hub(b)] = current;
        match chosen.next_if(|&(_, &cb)| cb == b) {
            Some((t, _)) => {
                for j in 0..spec.r {
                    let path = spec.path_vertices(b, j);
                    let cut = cuts[t * spec.r + j];
                    for (i, &v) in path.iter().enumerate().take(path.len() - 1).skip(1) {
                        values[v] = if i <= cut { current } else { -current };
                    }
                }
                current = -current;
            }
            None => {
                for j in 0..spec.r {
                    for &v in &spec.path_vertices(b, j) {
                        values[v] = current;
                    }
                }
            }
        }
        values[spec.right_hub(b)] = current;
    }
    for v in &mut values[spec.chain_vertices()..] {
        *v = current;
    }
    Labeling::total(values)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Generator recipes, as accepted by JSON spec files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Grid {
        rows: usize,
        cols: usize,
        split_col: usize,
    },
    Dithered {
        side: usize,
        core_side: usize,
        dither_prob: f64,
        seed: u64,
    },
    Lattice {
        w: usize,
        d: usize,
        #[serde(default)]
        truth: Option<GeometricTruth>,
    },
    Chain {
        #[serde(flatten)]
        spec: ChainFamilySpec,
    },
}

impl GeneratorSpec {
    /// The graph, plus a ground-truth labeling where the family defines one.
    /// Lattices with a box truth label each cell by majority overlap.
    pub fn build(&self) -> Result<(Graph, Option<Labeling>)> {
        match self {
            GeneratorSpec::Grid {
                rows,
                cols,
                split_col,
            } => Ok((
                grid_graph(*rows, *cols),
                Some(half_split_labeling(*rows, *cols, *split_col)),
            )),
            GeneratorSpec::Dithered {
                side,
                core_side,
                dither_prob,
                seed,
            } => {
                let (g, f) = dithered_core(*side, *core_side, *dither_prob, *seed)?;
                Ok((g, Some(f)))
            }
            GeneratorSpec::Lattice { w, d, truth } => {
                let lattice = Lattice::new(*w, *d)?;
                let f = match truth {
                    Some(t) => {
                        t.validate()?;
                        if t.d() != *d {
                            return Err(Error::InvalidParameter(
                                "truth dimension does not match lattice".into(),
                            ));
                        }
                        Some(t.cell_labeling(&lattice))
                    }
                    None => None,
                };
                Ok((lattice.into_graph(), f))
            }
            GeneratorSpec::Chain { spec } => Ok((chain_family_graph(spec)?, None)),
        }
    }
}
