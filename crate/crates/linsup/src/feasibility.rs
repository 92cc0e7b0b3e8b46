//! Half-space projections and the cyclic relaxation method that serves as
//! the basic feasibility-seeking algorithm.
//!
//! One sweep projects the iterate onto every violated row constraint in
//! index order, each projection feeding the next, then clamps negative
//! components to zero once. `seek_feasible` iterates sweeps until the
//! proximity stopping rule fires.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generator::{initial_point, GenError};
use crate::metrics::{self, proximity, target_value};
use crate::problem::{
    ConfigError, Problem, RunReport, SolverConfig, StopReason, TraceSample,
};

/// Borrowed view of one row constraint `<a, x> <= b_i` with its cached
/// squared norm.
#[derive(Debug, Clone, Copy)]
pub struct HalfspaceView<'a> {
    pub a: &'a [f64],
    pub b_i: f64,
    pub norm_sq: f64,
}

impl Problem {
    pub fn halfspace(&self, i: usize) -> HalfspaceView<'_> {
        HalfspaceView {
            a: self.row(i),
            b_i: self.rhs()[i],
            norm_sq: self.row_norm_sq(i),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Init(#[from] GenError),
    #[error("feasibility-seeking run requires superiorize = false")]
    SuperiorizeEnabled,
}

/// Relaxed orthogonal projection onto a half-space. Points already inside
/// are returned unchanged; `relaxation = 1` gives the exact projection,
/// values toward 2 overshoot up to the reflection.
pub fn project_halfspace(z: &[f64], h: &HalfspaceView<'_>, relaxation: f64) -> Vec<f64> {
    let mut out = z.to_vec();
    project_halfspace_in_place(&mut out, h, relaxation);
    out
}

pub(crate) fn project_halfspace_in_place(z: &mut [f64], h: &HalfspaceView<'_>, relaxation: f64) {
    let violation = metrics::dot(h.a, z) - h.b_i;
    if violation > 0.0 {
        let scale = relaxation * violation / h.norm_sq;
        for (zj, aj) in z.iter_mut().zip(h.a) {
            *zj -= scale * aj;
        }
    }
}

/// Componentwise `max(x_j, 0)`.
pub fn clamp_nonnegative(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    clamp_nonnegative_in_place(&mut out);
    out
}

pub(crate) fn clamp_nonnegative_in_place(x: &mut [f64]) {
    for xj in x {
        if *xj < 0.0 {
            *xj = 0.0;
        }
    }
}

/// One full application of the basic algorithm: a cyclic pass of relaxed
/// projections over all rows, then one nonnegativity clamp.
pub fn ams_sweep(y: &[f64], problem: &Problem, relaxation: f64) -> Vec<f64> {
    let mut out = y.to_vec();
    for i in 0..problem.row_count() {
        project_halfspace_in_place(&mut out, &problem.halfspace(i), relaxation);
    }
    clamp_nonnegative_in_place(&mut out);
    out
}

/// Wall clock for a run that keeps the cost of evaluating trace samples
/// out of the reported algorithm time.
pub(crate) struct RunClock {
    start: Instant,
    instrumentation: Duration,
}

impl RunClock {
    pub(crate) fn new() -> Self {
        RunClock {
            start: Instant::now(),
            instrumentation: Duration::ZERO,
        }
    }

    /// Evaluates proximity and target value for the trace, charging their
    /// cost to the instrumentation budget.
    pub(crate) fn sample(&mut self, problem: &Problem, y: &[f64], sweep: usize) -> TraceSample {
        let now = Instant::now();
        let elapsed = now
            .duration_since(self.start)
            .checked_sub(self.instrumentation)
            .unwrap_or_default();
        let prox = proximity(problem, y);
        let phi = target_value(problem, y);
        self.instrumentation += now.elapsed();
        TraceSample {
            sweep,
            elapsed_s: elapsed.as_secs_f64(),
            instrumentation_s: self.instrumentation.as_secs_f64(),
            prox,
            phi,
        }
    }
}

/// `|next - prev| / |prev|`, falling back to the absolute change when the
/// previous iterate is the zero vector.
pub(crate) fn relative_iterate_change(prev: &[f64], next: &[f64]) -> f64 {
    let mut diff_sq = 0.0;
    for (p, n) in prev.iter().zip(next) {
        let d = n - p;
        diff_sq += d * d;
    }
    let prev_norm = metrics::norm(prev);
    if prev_norm == 0.0 {
        diff_sq.sqrt()
    } else {
        diff_sq.sqrt() / prev_norm
    }
}

/// Decides whether the run stops after observing the sweep-`k` iterate.
/// Proximity wins over the iterate-change rule, which wins over the cap.
pub(crate) fn stop_decision(
    config: &SolverConfig,
    prox: f64,
    iterate_change: Option<f64>,
    sweep: usize,
) -> Option<StopReason> {
    if prox <= config.prox_epsilon {
        return Some(StopReason::ProxBelowEpsilon);
    }
    if let (Some(eps), Some(change)) = (config.iterate_change_epsilon, iterate_change) {
        if change <= eps {
            return Some(StopReason::IterateChangeBelowEpsilon);
        }
    }
    if sweep >= config.max_sweeps {
        return Some(StopReason::MaxSweeps);
    }
    None
}

/// Runs the bare feasibility-seeking iteration `y_{k+1} = A(y_k)` from the
/// configured initialization until a stopping rule fires. This is the
/// "without superiorization" arm: no perturbations, no step-size bookkeeping.
pub fn seek_feasible(problem: &Problem, config: &SolverConfig) -> Result<RunReport, RunError> {
    config.validate(problem)?;
    if config.superiorize {
        return Err(RunError::SuperiorizeEnabled);
    }

    let mut clock = RunClock::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut y = initial_point(problem, &config.init, &mut rng)?;

    let mut trace = Vec::new();
    let mut points = config.record_points.then(|| vec![y.clone()]);

    let first = clock.sample(problem, &y, 0);
    let mut stop = stop_decision(config, first.prox, None, 0);
    trace.push(first);

    let mut sweep = 0;
    while stop.is_none() {
        let next = ams_sweep(&y, problem, config.relaxation);
        sweep += 1;
        let sample = clock.sample(problem, &next, sweep);
        let change = config
            .iterate_change_epsilon
            .map(|_| relative_iterate_change(&y, &next));
        stop = stop_decision(config, sample.prox, change, sweep);
        trace.push(sample);
        if let Some(ps) = points.as_mut() {
            ps.push(next.clone());
        }
        y = next;
    }

    Ok(RunReport {
        trace,
        final_point: y,
        stop_reason: stop.unwrap(),
        beta_sum: 0.0,
        sweeps: sweep,
        beta_log: Vec::new(),
        points,
    })
}
