use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bench::trial_seed;
use crate::engine::{s2_run, StoppingRule};
use crate::error::{Error, Result};
use crate::generators::{GeometricOracle, GeometricTruth, Lattice};
use crate::math::ceil_tol;
use crate::oracle::{check_flip_prob, repetitions_needed, LabelOracle, MajorityOracle};

/// Sample budget sufficient for the noise-tolerant S² classifier on a
/// `w^d` lattice:
///
/// `(6 c1 (2w)^(d-1) + (k²/4) ln(w^d) + ln(1/(βε)) / ln(1/(1-β)))
///   · ln(w^d / ε) / (2 (0.5 - γ)²)`, rounded up.
///
/// With `epsilon = 1/w` this is the lattice-resolution form of the bound.
pub fn nonparam_budget(
    w: usize,
    d: usize,
    c1: f64,
    k: usize,
    beta: f64,
    flip_prob: f64,
    epsilon: f64,
) -> Result<u64> {
    check_flip_prob(flip_prob)?;
    if w == 0 || d == 0 {
        return Err(Error::InvalidParameter("w and d must be positive".into()));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must lie in (0, 1)"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must lie in (0, 1]"
        )));
    }
    let (w, d) = (w as f64, d as f64);
    let ln_cells = d * w.ln();
    let boundary = 6.0 * c1 * (2.0 * w).powf(d - 1.0);
    let components = (k * k) as f64 / 4.0 * ln_cells;
    let witness = (1.0 / (beta * epsilon)).ln() / (1.0 / (1.0 - beta)).ln();
    let per_query = (ln_cells - epsilon.ln()) / (2.0 * (0.5 - flip_prob).powi(2));
    Ok(ceil_tol((boundary + components + witness) * per_query) as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonparamConfig {
    pub truth: GeometricTruth,
    /// Box-counting constant of the decision boundary.
    pub c1: f64,
    /// Number of homogeneous regions.
    pub k: usize,
    pub beta: f64,
    /// Total raw-sample budgets to evaluate.
    pub budgets: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    /// Restrict the lattice side to odd values.
    pub odd_w: bool,
}

impl NonparamConfig {
    pub fn d(&self) -> usize {
        self.truth.d()
    }

    fn budget_at(&self, w: usize) -> Result<u64> {
        nonparam_budget(
            w,
            self.d(),
            self.c1,
            self.k,
            self.beta,
            self.truth.flip_prob(),
            1.0 / w as f64,
        )
    }

    /// Largest admissible `w ≥ 2` whose budget fits in `n`.
    pub fn lattice_side(&self, n: u64) -> Result<Option<usize>> {
        let ok = |w: usize| !self.odd_w || w % 2 == 1;
        let mut best = None;
        let mut w = 2;
        // The budget grows with w, so stop at the first overshoot.
        while self.budget_at(w)? <= n {
            if ok(w) {
                best = Some(w);
            }
            w += 1;
        }
        Ok(best)
    }
}

/// One `(budget, trial)` measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonparamRow {
    pub n: u64,
    pub w: usize,
    pub trial: usize,
    pub repetitions: u32,
    pub logical_budget: usize,
    pub raw_queries: u64,
    pub excess_risk: f64,
}

/// For each budget, picks the lattice side, runs noise-tolerant S² on the
/// geometric oracle and measures the exact excess risk of the completed
/// labeling.
pub fn nonparam_experiment(config: &NonparamConfig) -> Result<Vec<NonparamRow>> {
    config.truth.validate()?;
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut jobs = Vec::new();
    for &n in &config.budgets {
        let w = config.lattice_side(n)?.ok_or_else(|| {
            Error::Infeasible(format!(
                "budget {n} is below the smallest lattice's requirement"
            ))
        })?;
        for trial in 0..config.trials {
            jobs.push((n, w, trial));
        }
    }
    jobs.into_par_iter()
        .map(|(n, w, trial)| nonparam_trial(config, n, w, trial))
        .collect()
}

fn nonparam_trial(config: &NonparamConfig, n: u64, w: usize, trial: usize) -> Result<NonparamRow> {
    let lattice = Lattice::new(w, config.d())?;
    let cells = lattice.n();
    let flip = config.truth.flip_prob();
    let repetitions = repetitions_needed(flip, cells as f64, 1.0 / w as f64)?;
    let logical_budget = ((n / repetitions as u64) as usize).clamp(1, cells);
    let seed = trial_seed(config.seed ^ n, trial);
    let geo = GeometricOracle::new(lattice.clone(), config.truth.clone(), trial_seed(seed, 1))?;
    let mut oracle = MajorityOracle::new(geo, repetitions)?;
    let result = s2_run(
        lattice.graph(),
        &mut oracle as &mut dyn LabelOracle,
        &StoppingRule::Budget(logical_budget),
        seed,
    )?;
    Ok(NonparamRow {
        n,
        w,
        trial,
        repetitions,
        logical_budget,
        raw_queries: result.raw_queries,
        excess_risk: config.truth.excess_risk(&lattice, &result.predicted)?,
    })
}

/// Least-squares slope of `ln y` against `ln x` over points with positive
/// coordinates.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_regression_value() {
        // Direct evaluation gives 12975.78.
        assert_eq!(
            nonparam_budget(15, 2, 1.0, 2, 0.25, 0.25, 1.0 / 15.0).unwrap(),
            12976
        );
    }

    #[test]
    fn budget_monotone_in_w_and_d() {
        let b = |w, d| nonparam_budget(w, d, 1.0, 2, 0.25, 0.25, 1.0 / w as f64).unwrap();
        for w in 2..60 {
            assert!(b(w + 1, 2) > b(w, 2));
            assert!(b(w, 3) > b(w, 2));
        }
    }

    #[test]
    fn budget_rejects_half_noise() {
        let e = nonparam_budget(15, 2, 1.0, 2, 0.25, 0.5, 0.1).unwrap_err();
        assert!(e.is_infeasible());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10)
            .map(|i| (i as f64, 3.0 / (i as f64).powi(2)))
            .collect();
        assert!((loglog_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn lattice_side_inverts_budget() {
        let config = NonparamConfig {
            truth: GeometricTruth::new(vec![0.0, 0.0], vec![0.5, 1.0], 0.25).unwrap(),
            c1: 1.0,
            k: 2,
            beta: 0.25,
            budgets: vec![],
            trials: 1,
            seed: 0,
            odd_w: true,
        };
        assert_eq!(config.lattice_side(12976).unwrap(), Some(15));
        assert_eq!(config.lattice_side(12975).unwrap(), Some(13));
        assert_eq!(config.lattice_side(10).unwrap(), None);
        let any = NonparamConfig {
            odd_w: false,
            ..config
        };
        assert_eq!(any.lattice_side(12976).unwrap(), Some(15));
    }
}
