//! Measurement harness: boundary query complexity, seeded benchmarks,
//! excess-risk scaling and the enumeration lower bounds.

mod bench;
mod counting;
mod dc;
mod nonparam;

pub use bench::{
    bench, bench_generated, recovery_rate, trial_seed, BenchConfig, BenchReport, BenchSummary,
    Budget, Repetitions, Stats, TrialRecord,
};
pub use counting::{
    chain_family_count, chain_lower_bound_log2, chain_params, count_grid_cuts,
    validated_chain_labelings, ChainCount,
};
pub use dc::{dc_query_complexity, DcComplexity};
pub use nonparam::{
    loglog_slope, nonparam_budget, nonparam_experiment, NonparamConfig, NonparamRow,
};
