use std::io::Write;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dc::dc_query_complexity;
use crate::complexity::{budget_bound_for, CutStructure};
use crate::engine::{run, Algorithm, StoppingRule};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labeling::Labeling;
use crate::oracle::{repetitions_needed, LabelOracle, MajorityOracle, NoisyOracle};

/// Per-trial seed: the first output of the ChaCha8 stream `trial` keyed by
/// the base seed.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(trial as u64);
    rng.next_u64()
}

/// How many logical queries a trial may issue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// Query until every vertex is labeled.
    All,
    Fixed(usize),
    /// The recovery bound computed from the instance's own parameters.
    Auto,
}

/// How many raw queries back each logical query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repetitions {
    Fixed(u32),
    /// `repetitions_needed(flip_prob, n, epsilon)`.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    pub flip_prob: f64,
    pub repetitions: Repetitions,
    pub budget: Budget,
    /// Failure probability used by the automatic budget and repetitions.
    pub epsilon: f64,
    /// Record wall time per trial. Off by default so reports are
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithm: Algorithm::S2,
            trials: 10,
            seed: 0,
            flip_prob: 0.0,
            repetitions: Repetitions::Fixed(1),
            budget: Budget::All,
            epsilon: 0.05,
            timing: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if self.repetitions == Repetitions::Fixed(0) {
            return Err(Error::InvalidParameter(
                "repetitions must be at least 1".into(),
            ));
        }
        crate::oracle::check_flip_prob(self.flip_prob)
    }

    /// Raw queries per logical query on a graph of `n` vertices.
    pub fn resolve_repetitions(&self, n: usize) -> Result<u32> {
        match self.repetitions {
            Repetitions::Fixed(r) => Ok(r),
            Repetitions::Auto => repetitions_needed(self.flip_prob, n as f64, self.epsilon),
        }
    }

    /// Logical query budget for an instance, capped at its vertex count.
    pub fn resolve_budget(&self, structure: &CutStructure) -> Result<usize> {
        let n = structure.n();
        Ok(match self.budget {
            Budget::All => n,
            Budget::Fixed(b) => b,
            Budget::Auto if structure.m() == 0 => n,
            Budget::Auto => (budget_bound_for(structure, None, self.epsilon)? as usize).min(n),
        })
    }
}

/// One row of the bench CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub queries_used: usize,
    /// Empty when the run never covered the boundary.
    pub dc_complexity: Option<usize>,
    pub recovered: bool,
    pub ms_elapsed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(Stats {
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub queries_used: Stats,
    /// Over the trials that covered the boundary.
    pub dc_complexity: Option<Stats>,
    pub covered: usize,
    pub recovery_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<TrialRecord>,
    pub summary: BenchSummary,
}

impl BenchReport {
    fn from_records(algorithm: Algorithm, records: Vec<TrialRecord>) -> Self {
        let queries: Vec<f64> = records.iter().map(|r| r.queries_used as f64).collect();
        let dc: Vec<f64> = records
            .iter()
            .filter_map(|r| r.dc_complexity.map(|d| d as f64))
            .collect();
        let recovered = records.iter().filter(|r| r.recovered).count();
        let summary = BenchSummary {
            algorithm,
            trials: records.len(),
            queries_used: Stats::of(&queries).expect("at least one trial"),
            dc_complexity: Stats::of(&dc),
            covered: dc.len(),
            recovery_rate: recovered as f64 / records.len() as f64,
        };
        BenchReport { records, summary }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.summary)?;
        Ok(())
    }
}

/// Runs `config.trials` seeded trials on one fixed instance.
pub fn bench(g: &Graph, truth: &Labeling, config: &BenchConfig) -> Result<BenchReport> {
    let structure = CutStructure::new(g, truth)?;
    bench_with(config, |_| {
        Ok((g.clone(), truth.clone(), structure.clone()))
    })
}

/// Runs trials on instances regenerated from each trial's seed. The same
/// base seed pairs trials across algorithms: trial `i` sees the same
/// instance and oracle seed whatever the algorithm.
pub fn bench_generated<F>(config: &BenchConfig, make: F) -> Result<BenchReport>
where
    F: Fn(u64) -> Result<(Graph, Labeling)> + Sync,
{
    bench_with(config, |seed| {
        let (g, f) = make(seed)?;
        let s = CutStructure::new(&g, &f)?;
        Ok((g, f, s))
    })
}

fn bench_with<F>(config: &BenchConfig, make: F) -> Result<BenchReport>
where
    F: Fn(u64) -> Result<(Graph, Labeling, CutStructure)> + Sync,
{
    config.validate()?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(config.seed, trial);
            let (g, f, structure) = make(seed)?;
            run_trial(config, trial, seed, &g, f, &structure)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport::from_records(config.algorithm, records))
}

fn run_trial(
    config: &BenchConfig,
    trial: usize,
    seed: u64,
    g: &Graph,
    truth: Labeling,
    structure: &CutStructure,
) -> Result<TrialRecord> {
    let started = Instant::now();
    let budget = config.resolve_budget(structure)?;
    let repetitions = config.resolve_repetitions(g.n())?;
    let noisy = NoisyOracle::new(truth, config.flip_prob, trial_seed(seed, 1))?;
    let mut oracle = MajorityOracle::new(noisy, repetitions)?;
    let mut result = run(
        config.algorithm,
        g,
        &mut oracle as &mut dyn LabelOracle,
        &StoppingRule::Budget(budget),
        seed,
    )?;
    let recovered = result.check_recovery(&structure.cut_edges());
    let dc = if structure.boundary().is_empty() {
        Some(0)
    } else {
        dc_query_complexity(result.queried_vertices(), structure.boundary())?.covered()
    };
    Ok(TrialRecord {
        trial,
        seed,
        algorithm: config.algorithm,
        queries_used: result.queries_used,
        dc_complexity: dc,
        recovered,
        ms_elapsed: if config.timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        },
    })
}

/// Fraction of trials that recover the cut set exactly.
pub fn recovery_rate(g: &Graph, truth: &Labeling, config: &BenchConfig) -> Result<f64> {
    Ok(bench(g, truth, config)?.summary.recovery_rate)
}
