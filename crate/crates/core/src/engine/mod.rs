//! Query strategies: S² (shortest shortest path), random sampling, and
//! exhaustive bisection.
//!
//! All three share one loop. A uniformly random unqueried vertex is queried;
//! every edge whose observed endpoints disagree is stripped from the working
//! graph; the stopping rule is checked; then the strategy may propose an
//! aggressive follow-up query. When it has none, the loop returns to random
//! sampling. On stop, the observed labels are completed over the working
//! graph.
//!
//! Noise tolerance is obtained by passing a [`MajorityOracle`]; the engine
//! counts logical queries, the oracle counts raw ones.
//!
//! [`MajorityOracle`]: crate::oracle::MajorityOracle

mod completion;
mod mssp;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::labeling::{Label, Labeling};
use crate::oracle::LabelOracle;

pub use completion::label_completion;
use mssp::MsspSearch;
pub use mssp::{mssp, mssp_choice, path_midpoint, MsspChoice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Random,
    Aggressive,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Random => "random",
            Phase::Aggressive => "aggressive",
        })
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Phase::Random),
            "aggressive" => Ok(Phase::Aggressive),
            other => Err(format!("unknown phase {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    S2,
    Random,
    Bisect,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::S2 => "s2",
            Algorithm::Random => "random",
            Algorithm::Bisect => "bisect",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s2" => Ok(Algorithm::S2),
            "random" => Ok(Algorithm::Random),
            "bisect" => Ok(Algorithm::Bisect),
            other => Err(format!(
                "unknown algorithm {other:?} (expected s2, random or bisect)"
            )),
        }
    }
}

/// One logical query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub step: usize,
    pub phase: Phase,
    pub vertex: usize,
    pub label: Label,
    /// Cut edges discovered after this query, cumulative.
    pub cuts_found: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutRule {
    /// Probability that an observation joins the validation set.
    pub fraction: f64,
    /// Stop once the validation error is at most this.
    pub max_error: f64,
    /// Validation set size required before the rule may fire.
    pub min_holdout: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    /// Stop after this many logical queries.
    Budget(usize),
    /// Stop once this many boundary vertices have been discovered.
    BoundaryKnown(usize),
    /// Stop once labels held out from completion are predicted well enough.
    Holdout(HoldoutRule),
}

impl StoppingRule {
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            StoppingRule::Budget(limit) if limit == 0 || limit > n => {
                bad(format!("budget {limit} must lie in [1, {n}]"))
            }
            StoppingRule::BoundaryKnown(target) if target == 0 || target > n => {
                bad(format!("boundary target {target} must lie in [1, {n}]"))
            }
            StoppingRule::Holdout(h)
                if !(h.fraction > 0.0 && h.fraction < 1.0)
                    || !(0.0..=1.0).contains(&h.max_error)
                    || h.min_holdout == 0 =>
            {
                bad(format!("invalid holdout rule {h:?}"))
            }
            _ => Ok(()),
        }
    }
}

/// Mutable state of a run: the working graph with discovered cut edges
/// removed, the observed labels and the query log.
#[derive(Clone, Debug)]
pub struct RunState {
    working: Graph,
    observed: Labeling,
    found_cuts: Vec<Edge>,
    found_set: HashSet<Edge>,
    boundary: Vec<bool>,
    boundary_count: usize,
    log: Vec<QueryRecord>,
    unqueried: Vec<usize>,
    slot: Vec<usize>,
    search: MsspSearch,
}

impl RunState {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        RunState {
            working: g.clone(),
            observed: Labeling::empty(n),
            found_cuts: Vec::new(),
            found_set: HashSet::new(),
            boundary: vec![false; n],
            boundary_count: 0,
            log: Vec::new(),
            unqueried: (0..n).collect(),
            slot: (0..n).collect(),
            search: MsspSearch::new(n),
        }
    }

    pub fn working_graph(&self) -> &Graph {
        &self.working
    }

    pub fn observed(&self) -> &Labeling {
        &self.observed
    }

    pub fn found_cuts(&self) -> &[Edge] {
        &self.found_cuts
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    /// Number of distinct endpoints of discovered cut edges.
    pub fn discovered_boundary(&self) -> usize {
        self.boundary_count
    }

    pub fn unqueried(&self) -> usize {
        self.unqueried.len()
    }

    /// Records a label and strips every edge from `v` to an oppositely
    /// labeled observed neighbor.
    pub fn observe(&mut self, v: usize, label: Label, phase: Phase) -> Result<()> {
        self.working.check_vertex(v)?;
        if self.observed.get(v).is_some() {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} already observed"
            )));
        }
        self.observed.set(v, label)?;
        let i = self.slot[v];
        self.unqueried.swap_remove(i);
        if let Some(&moved) = self.unqueried.get(i) {
            self.slot[moved] = i;
        }
        self.slot[v] = usize::MAX;

        let cuts: Vec<Edge> = self
            .working
            .neighbors(v)
            .iter()
            .filter(|&&y| self.observed.get(y) == Some(-label))
            .map(|&y| Edge::new(v, y))
            .collect();
        for e in cuts {
            self.working.remove_edge_in_place(e)?;
            self.found_cuts.push(e);
            self.found_set.insert(e);
            for x in [e.lo(), e.hi()] {
                if !self.boundary[x] {
                    self.boundary[x] = true;
                    self.boundary_count += 1;
                }
            }
        }
        self.log.push(QueryRecord {
            step: self.log.len(),
            phase,
            vertex: v,
            label,
            cuts_found: self.found_cuts.len(),
        });
        Ok(())
    }

    pub fn mssp_choice(&mut self) -> Option<MsspChoice> {
        self.search.choose(&self.working, self.observed.as_slice())
    }

    /// The vertex S² queries next in the aggressive phase, if any.
    pub fn next_s2_query(&mut self) -> Option<usize> {
        self.mssp_choice().map(|c| c.midpoint)
    }

    fn random_unqueried(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        if self.unqueried.is_empty() {
            None
        } else {
            Some(self.unqueried[rng.gen_range(0..self.unqueried.len())])
        }
    }

    fn is_found_cut(&self, a: usize, b: usize) -> bool {
        a != b && self.found_set.contains(&Edge::new(a, b))
    }
}

trait Strategy {
    fn next(&mut self, state: &mut RunState) -> Option<usize>;
}

struct ShortestShortestPath;

impl Strategy for ShortestShortestPath {
    fn next(&mut self, state: &mut RunState) -> Option<usize> {
        state.next_s2_query()
    }
}

struct RandomOnly;

impl Strategy for RandomOnly {
    fn next(&mut self, _: &mut RunState) -> Option<usize> {
        None
    }
}

/// Commits to one oppositely labeled pair and bisects it until a cut edge is
/// isolated before asking MSSP for a new pair.
#[derive(Default)]
struct ExhaustiveBisection {
    pair: Option<(usize, usize)>,
    pending: Option<usize>,
}

impl ExhaustiveBisection {
    fn absorb(&mut self, state: &RunState, m: usize) {
        if let (Some((a, b)), Some(label)) = (self.pair, state.observed.get(m)) {
            self.pair = Some(if state.observed.get(a) == Some(label) {
                (m, b)
            } else {
                (a, m)
            });
        }
    }
}

impl Strategy for ExhaustiveBisection {
    fn next(&mut self, state: &mut RunState) -> Option<usize> {
        if let Some(m) = self.pending.take() {
            self.absorb(state, m);
        }
        loop {
            let Some((a, b)) = self.pair else {
                let choice = state.mssp_choice()?;
                self.pair = Some(choice.pair);
                self.pending = Some(choice.midpoint);
                return Some(choice.midpoint);
            };
            if state.is_found_cut(a, b) {
                self.pair = None;
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let Some(path) = state
                .search
                .path(&state.working, state.observed.as_slice(), lo, hi)
            else {
                self.pair = None;
                continue;
            };
            let m = path_midpoint(&path);
            if state.observed.get(m).is_some() {
                self.absorb(state, m);
                continue;
            }
            self.pending = Some(m);
            return Some(m);
        }
    }
}

/// Decides when a run ends.
struct StopCheck {
    rule: StoppingRule,
    held: Vec<bool>,
    held_count: usize,
    rng: ChaCha8Rng,
}

impl StopCheck {
    fn new(rule: StoppingRule, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        StopCheck {
            rule,
            held: vec![false; n],
            held_count: 0,
            rng,
        }
    }

    fn fires(&mut self, state: &RunState) -> bool {
        match self.rule {
            StoppingRule::Budget(limit) => state.log.len() >= limit,
            StoppingRule::BoundaryKnown(target) => state.boundary_count >= target,
            StoppingRule::Holdout(rule) => {
                let v = state.log.last().expect("checked after a query").vertex;
                if self.rng.gen::<f64>() < rule.fraction {
                    self.held[v] = true;
                    self.held_count += 1;
                }
                if self.held_count < rule.min_holdout {
                    return false;
                }
                let mut training = Labeling::empty(state.observed.len());
                for (u, l) in state.observed.observed().filter(|&(u, _)| !self.held[u]) {
                    training.set(u, l).expect("in range");
                }
                let predicted = label_completion(&state.working, &training);
                let errors = state
                    .observed
                    .observed()
                    .filter(|&(u, l)| self.held[u] && predicted.at(u) != l)
                    .count();
                errors as f64 <= rule.max_error * self.held_count as f64
            }
        }
    }
}

/// Outcome of a single run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub log: Vec<QueryRecord>,
    /// Discovered cut edges in ascending order.
    pub found_cuts: Vec<Edge>,
    pub predicted: Labeling,
    /// Logical queries.
    pub queries_used: usize,
    /// Raw oracle invocations.
    pub raw_queries: u64,
    /// Whether `found_cuts` equals the true cut set, when one was supplied.
    pub cut_recovered: Option<bool>,
}

impl RunResult {
    /// Compares the discovered cut set against `truth_cuts` and records the
    /// outcome in `cut_recovered`.
    pub fn check_recovery(&mut self, truth_cuts: &[Edge]) -> bool {
        let mut truth = truth_cuts.to_vec();
        truth.sort_unstable();
        let recovered = truth == self.found_cuts;
        self.cut_recovered = Some(recovered);
        recovered
    }

    pub fn queried_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.log.iter().map(|r| r.vertex)
    }

    pub fn aggressive_queries(&self) -> usize {
        self.log
            .iter()
            .filter(|r| r.phase == Phase::Aggressive)
            .count()
    }

    /// Logical queries issued until `cut_size` cut edges were known.
    pub fn queries_until_cuts(&self, cut_size: usize) -> Option<usize> {
        if cut_size == 0 {
            return Some(0);
        }
        self.log
            .iter()
            .position(|r| r.cuts_found >= cut_size)
            .map(|i| i + 1)
    }
}

fn execute<S: Strategy>(
    algorithm: Algorithm,
    g: &Graph,
    oracle: &mut dyn LabelOracle,
    stop: &StoppingRule,
    seed: u64,
    mut strategy: S,
) -> Result<RunResult> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    if oracle.n() != g.n() {
        return Err(Error::SizeMismatch {
            labeling: oracle.n(),
            graph: g.n(),
        });
    }
    stop.validate(g.n())?;
    let raw_before = oracle.query_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = StopCheck::new(*stop, g.n(), seed);
    let mut state = RunState::new(g);

    'run: while let Some(start) = state.random_unqueried(&mut rng) {
        let mut next = Some((start, Phase::Random));
        while let Some((x, phase)) = next {
            let label = oracle.query(x)?;
            state.observe(x, label, phase)?;
            if check.fires(&state) {
                break 'run;
            }
            next = strategy.next(&mut state).map(|v| (v, Phase::Aggressive));
        }
    }

    let predicted = label_completion(&state.working, &state.observed);
    let mut found_cuts = state.found_cuts;
    found_cuts.sort_unstable();
    Ok(RunResult {
        algorithm,
        queries_used: state.log.len(),
        log: state.log,
        found_cuts,
        predicted,
        raw_queries: oracle.query_count() - raw_before,
        cut_recovered: None,
    })
}

/// Runs S² until `stop` fires or every vertex has been queried.
pub fn s2_run(
    g: &Graph,
    oracle: &mut dyn LabelOracle,
    stop: &StoppingRule,
    seed: u64,
) -> Result<RunResult> {
    execute(Algorithm::S2, g, oracle, stop, seed, ShortestShortestPath)
}

/// Baseline that only ever queries uniformly random unqueried vertices.
pub fn random_run(
    g: &Graph,
    oracle: &mut dyn LabelOracle,
    stop: &StoppingRule,
    seed: u64,
) -> Result<RunResult> {
    execute(Algorithm::Random, g, oracle, stop, seed, RandomOnly)
}

/// Baseline that runs every binary search to completion.
pub fn bisect_run(
    g: &Graph,
    oracle: &mut dyn LabelOracle,
    stop: &StoppingRule,
    seed: u64,
) -> Result<RunResult> {
    execute(
        Algorithm::Bisect,
        g,
        oracle,
        stop,
        seed,
        ExhaustiveBisection::default(),
    )
}

pub fn run(
    algorithm: Algorithm,
    g: &Graph,
    oracle: &mut dyn LabelOracle,
    stop: &StoppingRule,
    seed: u64,
) -> Result<RunResult> {
    match algorithm {
        Algorithm::S2 => s2_run(g, oracle, stop, seed),
        Algorithm::Random => random_run(g, oracle, stop, seed),
        Algorithm::Bisect => bisect_run(g, oracle, stop, seed),
    }
}
