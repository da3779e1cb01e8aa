//! Parallel Monte Carlo over replications.
//!
//! Episodes run on a rayon pool; their regret curves are folded into the
//! accumulator in replication order, so the summary is bit-identical to the
//! serial `monte_carlo_regret` for any thread count.

use rayon::prelude::*;
use regretlab_core::adversaries::Adversary;
use regretlab_core::harness::{
    matching_bound, run_episode_observed, CurveAccumulator, ExperimentConfig, RunSummary,
};

use crate::error::{AppError, AppResult};

/// Environment variable capping worker threads; 0 or unset means one per core.
pub const THREADS_ENV: &str = "REGRETLAB_THREADS";

/// Replications held in memory at once before being folded.
const BLOCK: u64 = 1024;

pub fn thread_count_from_env() -> AppResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            AppError::invalid(THREADS_ENV, format!("`{v}` is not a nonnegative integer"))
        }),
        Err(_) => Ok(0),
    }
}

/// Monte Carlo estimate on `threads` workers (0 = automatic).
pub fn monte_carlo_regret_parallel(
    config: &ExperimentConfig,
    threads: usize,
) -> AppResult<RunSummary> {
    config.validate()?;
    let adversary = Adversary::new(config.adversary.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AppError::invalid(THREADS_ENV, e.to_string()))?;
    let reps = u64::from(config.replications);
    let mut acc = CurveAccumulator::new(config.horizon);
    let mut start = 0;
    while start < reps {
        let end = (start + BLOCK).min(reps);
        let curves = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|rep| {
                    run_episode_observed(config, &adversary, rep, |_, _| {}).map(|t| t.regret_curve)
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        for curve in &curves {
            acc.push(curve);
        }
        start = end;
    }
    Ok(acc.finish(matching_bound(config)))
}
