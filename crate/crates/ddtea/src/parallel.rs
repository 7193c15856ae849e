//! Sweeps on a rayon pool. Trials are independent and results are gathered
//! in `(point, rep)` order, so the output does not depend on the pool size.

use ddtea_core::experiment::sweep;
use ddtea_core::{run_trial, Axis, SweepPoint, SweepResult, TrialConfig};
use rayon::prelude::*;

/// Sweep over `values` with `n_reps` trials each; `threads = 0` lets rayon
/// pick. Bitwise equal to the sequential core sweep.
pub fn sweep_parallel(
    config: &TrialConfig,
    axis: Axis,
    values: &[f64],
    n_reps: usize,
    threads: usize,
) -> Result<SweepResult, rayon::ThreadPoolBuildError> {
    if threads == 1 {
        return Ok(sweep(config, axis, values, n_reps));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let configs: Vec<TrialConfig> = values.iter().map(|&v| config.at(axis, v)).collect();
    let outcomes: Vec<_> = pool.install(|| {
        (0..values.len() * n_reps)
            .into_par_iter()
            .map(|job| {
                let (point, rep) = (job / n_reps, job % n_reps);
                run_trial(&configs[point], point as u64, rep as u64)
            })
            .collect()
    });
    let points = values
        .iter()
        .enumerate()
        .map(|(i, &v)| SweepPoint::aggregate(v, &outcomes[i * n_reps..(i + 1) * n_reps]))
        .collect();
    Ok(SweepResult { axis, points })
}
