//! Wall-clock comparison of the closed-form step against an RK4 trace over
//! the same interval.

use std::hint::black_box;
use std::time::Instant;

use ddtea_core::{evolve_closed_form, evolve_rk4, DynamicsError, OrbitState, ThieleParams};

/// Closed-form evaluations per timed batch.
const BATCH: usize = 1000;
/// Medians below this are close to the timer resolution.
pub const RESOLUTION_WARNING_NS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub closed_ns_per_eval: f64,
    pub rk4_ns_per_trace: f64,
    pub speedup: f64,
    pub closed_value: f64,
    pub rk4_value: f64,
    pub relative_difference: f64,
    pub evals: usize,
    pub traces: usize,
}

impl BenchReport {
    pub fn below_resolution(&self) -> bool {
        self.closed_ns_per_eval < RESOLUTION_WARNING_NS
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median time of one closed-form evaluation (over at least `evals` calls in
/// batches of 1000) and of one RK4 trace (over at least `traces` runs).
pub fn bench_speed(
    p: &ThieleParams,
    s0: OrbitState,
    dt: f64,
    rk4_step: f64,
    evals: usize,
    traces: usize,
) -> Result<BenchReport, DynamicsError> {
    let closed_value = evolve_closed_form(p, s0, dt)?.get();
    let rk4_value = evolve_rk4(p, s0, dt, rk4_step)?.get();

    let batches = evals.div_ceil(BATCH).max(1);
    let mut per_eval = Vec::with_capacity(batches);
    for _ in 0..batches {
        let start = Instant::now();
        for _ in 0..BATCH {
            black_box(evolve_closed_form(
                black_box(p),
                black_box(s0),
                black_box(dt),
            )?);
        }
        per_eval.push(start.elapsed().as_nanos() as f64 / BATCH as f64);
    }

    let traces = traces.max(1);
    let mut per_trace = Vec::with_capacity(traces);
    for _ in 0..traces {
        let start = Instant::now();
        black_box(evolve_rk4(
            black_box(p),
            black_box(s0),
            black_box(dt),
            black_box(rk4_step),
        )?);
        per_trace.push(start.elapsed().as_nanos() as f64);
    }

    let closed_ns_per_eval = median(per_eval);
    let rk4_ns_per_trace = median(per_trace);
    Ok(BenchReport {
        closed_ns_per_eval,
        rk4_ns_per_trace,
        speedup: rk4_ns_per_trace / closed_ns_per_eval,
        closed_value,
        rk4_value,
        relative_difference: (closed_value - rk4_value).abs() / rk4_value.abs().max(1e-12),
        evals: batches * BATCH,
        traces,
    })
}
