//! The superiorized run loop: per outer sweep, a block of target-reduction
//! perturbation steps with geometrically summable step sizes, followed by
//! one application of the feasibility-seeking sweep.
//!
//! Step sizes are powers of a kernel `alpha`, indexed by a power index that
//! each sweep resets to a uniform draw between the sweep counter and the
//! previous sweep's final index (the ATL2 strategy). There is deliberately
//! no comparison of target values anywhere in the inner loop; the geometry
//! of the steps alone does the steering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::feasibility::{
    ams_sweep, relative_iterate_change, stop_decision, RunClock, RunError,
};
use crate::generator::initial_point;
use crate::metrics::{norm, proximity};
use crate::problem::{BetaEmission, ConfigError, Problem, RunReport, SolverConfig};

/// Generator of the geometric step-size sequence `alpha^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub alpha: f64,
    pub exponent: usize,
}

impl StepSchedule {
    pub fn new(alpha: f64, exponent: usize) -> Self {
        StepSchedule { alpha, exponent }
    }

    /// Emits the current step size and advances the power index.
    pub fn next_beta(&mut self) -> f64 {
        let beta = self.alpha.powi(self.exponent as i32);
        self.exponent += 1;
        beta
    }
}

/// Draws the power index for a new sweep: uniform on the inclusive range
/// between the sweep counter and the previous sweep's final index,
/// whichever order they come in.
pub fn atl2_reset(sweep: usize, exponent_prev: usize, rng: &mut ChaCha8Rng) -> usize {
    let lo = sweep.min(exponent_prev);
    let hi = sweep.max(exponent_prev);
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// One target-reduction step `y - beta * c / |c|`.
pub fn perturb(y: &[f64], cost: &[f64], beta: f64) -> Vec<f64> {
    let cost_norm = norm(cost);
    let unit: Vec<f64> = cost.iter().map(|cj| cj / cost_norm).collect();
    let mut out = y.to_vec();
    perturb_in_place(&mut out, &unit, beta);
    out
}

fn perturb_in_place(y: &mut [f64], unit_cost: &[f64], beta: f64) {
    for (yj, uj) in y.iter_mut().zip(unit_cost) {
        *yj -= beta * uj;
    }
}

/// True when the proximity of `y` is at or below `epsilon`.
pub fn proximity_stop_check(y: &[f64], problem: &Problem, epsilon: f64) -> bool {
    proximity(problem, y) <= epsilon
}

/// Mutable state of a run: current iterate, sweep counter, and the
/// step-size power index bookkeeping.
#[derive(Debug, Clone)]
pub struct RunState {
    pub point: Vec<f64>,
    pub sweep: usize,
    pub exponent: usize,
    pub exponent_prev: usize,
    pub rng: ChaCha8Rng,
}

/// Runs the superiorized iteration with a fixed number of perturbation
/// steps per sweep. With `superiorize = false` the perturbation block is
/// skipped entirely and the run reduces to bare feasibility seeking.
pub fn linsup_run(problem: &Problem, config: &SolverConfig) -> Result<RunReport, RunError> {
    let steps = config.inner_steps;
    linsup_run_with_schedule(problem, config, |_| steps)
}

/// Like `linsup_run`, but the number of perturbation steps may vary by
/// sweep. No shipped experiment exercises a non-constant schedule; the hook
/// exists so step-count schedules can be tried without touching the loop.
pub fn linsup_run_with_schedule(
    problem: &Problem,
    config: &SolverConfig,
    mut steps_for_sweep: impl FnMut(usize) -> usize,
) -> Result<RunReport, RunError> {
    config.validate(problem)?;

    let mut clock = RunClock::new();
    let mut state = RunState {
        point: Vec::new(),
        sweep: 0,
        exponent: 0,
        exponent_prev: 0,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };
    state.point = initial_point(problem, &config.init, &mut state.rng)?;

    let cost_norm = norm(problem.cost());
    let unit_cost: Vec<f64> = problem.cost().iter().map(|cj| cj / cost_norm).collect();

    let mut trace = Vec::new();
    let mut points = config.record_points.then(|| vec![state.point.clone()]);
    let mut beta_log = Vec::new();
    let mut beta_sum = 0.0;

    let first = clock.sample(problem, &state.point, 0);
    let mut stop = stop_decision(config, first.prox, None, 0);
    trace.push(first);

    while stop.is_none() {
        let next = if config.superiorize {
            let steps = steps_for_sweep(state.sweep);
            if steps == 0 {
                return Err(RunError::Config(ConfigError::ZeroInnerSteps));
            }
            state.exponent = atl2_reset(state.sweep, state.exponent_prev, &mut state.rng);
            let mut schedule = StepSchedule::new(config.alpha, state.exponent);
            let mut inner = state.point.clone();
            let sweep_cap = config.alpha.powi(state.sweep as i32);
            for _ in 0..steps {
                let exponent = schedule.exponent;
                let beta = schedule.next_beta();
                debug_assert!(beta <= sweep_cap, "step size {beta} above {sweep_cap}");
                perturb_in_place(&mut inner, &unit_cost, beta);
                beta_sum += beta;
                beta_log.push(BetaEmission {
                    sweep: state.sweep,
                    exponent,
                    beta,
                });
            }
            state.exponent = schedule.exponent;
            state.exponent_prev = state.exponent;
            ams_sweep(&inner, problem, config.relaxation)
        } else {
            ams_sweep(&state.point, problem, config.relaxation)
        };

        state.sweep += 1;
        let sample = clock.sample(problem, &next, state.sweep);
        let change = config
            .iterate_change_epsilon
            .map(|_| relative_iterate_change(&state.point, &next));
        stop = stop_decision(config, sample.prox, change, state.sweep);
        trace.push(sample);
        if let Some(ps) = points.as_mut() {
            ps.push(next.clone());
        }
        state.point = next;
    }

    Ok(RunReport {
        trace,
        final_point: state.point,
        stop_reason: stop.unwrap(),
        beta_sum,
        sweeps: state.sweep,
        beta_log,
        points,
    })
}
