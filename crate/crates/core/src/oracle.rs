//! Label oracles and the majority-vote noise-tolerance wrapper.
//!
//! A [`NoisyOracle`] flips the true label independently with probability
//! `flip_prob` on every raw query. Repeating a query `r` times and taking the
//! majority drives the per-vertex error below `exp(-2r(0.5 - flip_prob)^2)`;
//! [`repetitions_needed`] picks `r` so that a union bound over `n` vertices
//! stays below `epsilon`.
//!
//! All randomness comes from a seeded ChaCha8 stream, so a transcript is a
//! deterministic function of the seed and the sequence of requests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labeling::{Label, Labeling};
use crate::math::ceil_tol;

/// Anything that answers label queries for vertices `0..n`.
pub trait LabelOracle {
    fn n(&self) -> usize;

    fn query(&mut self, v: usize) -> Result<Label>;

    /// Raw oracle invocations so far.
    fn query_count(&self) -> u64;
}

impl<O: LabelOracle + ?Sized> LabelOracle for &mut O {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn query(&mut self, v: usize) -> Result<Label> {
        (**self).query(v)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

pub(crate) fn check_flip_prob(p: f64) -> Result<()> {
    if (0.0..0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::InfeasibleNoise(p))
    }
}

/// A γ-noisy oracle over a total ground-truth labeling.
#[derive(Clone, Debug)]
pub struct NoisyOracle {
    truth: Labeling,
    flip_prob: f64,
    seed: u64,
    rng: ChaCha8Rng,
    queries: u64,
}

impl NoisyOracle {
    pub fn new(truth: Labeling, flip_prob: f64, seed: u64) -> Result<Self> {
        truth.require_total()?;
        check_flip_prob(flip_prob)?;
        Ok(NoisyOracle {
            truth,
            flip_prob,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            queries: 0,
        })
    }

    pub fn noiseless(truth: Labeling) -> Result<Self> {
        Self::new(truth, 0.0, 0)
    }

    pub fn truth(&self) -> &Labeling {
        &self.truth
    }

    pub fn flip_prob(&self) -> f64 {
        self.flip_prob
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl LabelOracle for NoisyOracle {
    fn n(&self) -> usize {
        self.truth.len()
    }

    fn query(&mut self, v: usize) -> Result<Label> {
        let label = self.truth.get(v).ok_or(Error::VertexOutOfRange {
            vertex: v,
            n: self.truth.len(),
        })?;
        self.queries += 1;
        if self.flip_prob > 0.0 && self.rng.gen::<f64>() < self.flip_prob {
            Ok(-label)
        } else {
            Ok(label)
        }
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

/// Repetitions per logical query: `⌈ln(n/ε) / (2(0.5 − γ)²)⌉`, at least 1.
pub fn repetitions_needed(flip_prob: f64, n: f64, epsilon: f64) -> Result<u32> {
    check_flip_prob(flip_prob)?;
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be at least 1"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must lie in (0, 1]"
        )));
    }
    let margin = 0.5 - flip_prob;
    let r = ceil_tol((n / epsilon).ln() / (2.0 * margin * margin));
    Ok((r as u32).max(1))
}

/// Chernoff bound on the error probability of an `r`-fold majority vote.
pub fn majority_error_bound(flip_prob: f64, repetitions: u32) -> f64 {
    let margin = 0.5 - flip_prob;
    (-2.0 * repetitions as f64 * margin * margin).exp()
}

/// Issues `repetitions` raw queries for `v` and returns the majority label.
/// Even counts break ties toward `+1`, so odd counts are recommended.
pub fn majority_query<O: LabelOracle + ?Sized>(
    oracle: &mut O,
    v: usize,
    repetitions: u32,
) -> Result<Label> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter(
            "repetitions must be at least 1".into(),
        ));
    }
    let mut balance = 0i64;
    for _ in 0..repetitions {
        balance += oracle.query(v)?.sign() as i64;
    }
    Ok(if balance >= 0 {
        Label::Positive
    } else {
        Label::Negative
    })
}

/// Wraps an oracle so that every query is an `r`-fold majority vote.
#[derive(Clone, Debug)]
pub struct MajorityOracle<O> {
    inner: O,
    repetitions: u32,
}

impl<O: LabelOracle> MajorityOracle<O> {
    pub fn new(inner: O, repetitions: u32) -> Result<Self> {
        if repetitions == 0 {
            return Err(Error::InvalidParameter(
                "repetitions must be at least 1".into(),
            ));
        }
        Ok(MajorityOracle { inner, repetitions })
    }

    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: LabelOracle> LabelOracle for MajorityOracle<O> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn query(&mut self, v: usize) -> Result<Label> {
        majority_query(&mut self.inner, v, self.repetitions)
    }

    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }
}
