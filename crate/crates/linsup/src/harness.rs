//! Experiment drivers: the superiorized-vs-plain comparison, the race
//! against the simplex baseline at matched proximity, the perturbation-count
//! calibration sweep, and the suboptimally-stopped simplex comparison.
//! Reports aggregate per-instance rows and are written out as CSV.
//!
//! Every cell (instance x configuration) derives its seeds from the master
//! seed, so a report is a pure function of its spec apart from the recorded
//! wall times. Cells run sequentially; the time-ratio measurements assume an
//! uncontended core.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;

use crate::feasibility::{seek_feasible, RunError};
use crate::generator::{generate, GenError, GenSpec};
use crate::metrics::{proximity, ComparisonStats};
use crate::problem::{format_f64, Problem, RunReport, SolverConfig, StopReason};
use crate::simplex::{solve, solve_budgeted, SimplexError, SimplexResult, SimplexStatus};
use crate::superiorization::linsup_run;

/// The four sizes every experiment defaults to; larger sizes are opt-in
/// through the spec's size list since wall time grows steeply.
pub const DESK_SIZES: [(usize, usize); 4] = [(80, 100), (200, 250), (400, 500), (800, 1000)];

const REGENERATION_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    NSweep,
    Task1,
    Task2,
    Suboptimal,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentKind::NSweep => "nsweep",
            ExperimentKind::Task1 => "task1",
            ExperimentKind::Task2 => "task2",
            ExperimentKind::Suboptimal => "suboptimal",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub sizes: Vec<(usize, usize)>,
    /// Instances per size.
    pub reps: usize,
    pub alphas: Vec<f64>,
    /// Perturbation counts, used by the calibration sweep only.
    pub n_values: Vec<usize>,
    pub base_config: SolverConfig,
    pub seed: u64,
    /// Simplex budget as a multiple of the slowest superiorized run.
    pub budget_multiplier: f64,
    /// Pivots between trace samples in budgeted simplex runs.
    pub sample_every: usize,
}

impl ExperimentSpec {
    pub fn task1(seed: u64) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::Task1,
            sizes: DESK_SIZES.to_vec(),
            reps: 10,
            alphas: vec![0.99],
            n_values: Vec::new(),
            base_config: SolverConfig::default(),
            seed,
            budget_multiplier: 1.1,
            sample_every: 25,
        }
    }

    pub fn task2(seed: u64) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::Task2,
            alphas: vec![0.9, 0.99, 0.999],
            ..ExperimentSpec::task1(seed)
        }
    }

    pub fn nsweep(seed: u64) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::NSweep,
            n_values: vec![5, 10, 20, 30, 50, 100],
            ..ExperimentSpec::task1(seed)
        }
    }

    pub fn suboptimal(seed: u64) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::Suboptimal,
            sizes: vec![(800, 1000)],
            reps: 1,
            alphas: vec![0.99, 0.995],
            base_config: SolverConfig {
                prox_epsilon: 0.0,
                iterate_change_epsilon: Some(1e-16),
                ..SolverConfig::default()
            },
            ..ExperimentSpec::task1(seed)
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.sizes.is_empty() {
            return Err(HarnessError::InvalidSpec("size list is empty".into()));
        }
        if self.reps == 0 {
            return Err(HarnessError::InvalidSpec("reps must be at least 1".into()));
        }
        if self.alphas.is_empty() {
            return Err(HarnessError::InvalidSpec("alpha list is empty".into()));
        }
        if self.kind == ExperimentKind::NSweep && self.n_values.is_empty() {
            return Err(HarnessError::InvalidSpec(
                "calibration sweep needs at least one perturbation count".into(),
            ));
        }
        if !(self.budget_multiplier > 0.0) {
            return Err(HarnessError::InvalidSpec(
                "budget multiplier must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("experiment spec invalid: {0}")]
    InvalidSpec(String),
    #[error(
        "no simplex-solvable instance for size {rows}x{cols} rep {rep} after {attempts} attempts"
    )]
    RegenerationExhausted {
        rows: usize,
        cols: usize,
        rep: usize,
        attempts: usize,
    },
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arm {
    Superiorized,
    FeasibilityOnly,
    Simplex,
    SimplexBudgeted,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Arm::Superiorized => "linsup",
            Arm::FeasibilityOnly => "feasibility",
            Arm::Simplex => "simplex",
            Arm::SimplexBudgeted => "simplex_budgeted",
        };
        f.write_str(s)
    }
}

/// One instance-level measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub size: (usize, usize),
    pub rep: usize,
    pub arm: Arm,
    pub alpha: Option<f64>,
    pub inner_steps: Option<usize>,
    pub instance_seed: u64,
    pub run_seed: Option<u64>,
    /// Proximity threshold the run stopped against, where applicable.
    pub epsilon: Option<f64>,
    pub phi: f64,
    pub prox: f64,
    pub time_s: f64,
    pub steps: usize,
    pub stop: String,
    /// Set when the run ended on the sweep cap instead of a stopping rule.
    pub flagged: bool,
    pub phi_simplex: Option<f64>,
    pub re: Option<f64>,
    pub t_simplex: Option<f64>,
    pub tr: Option<f64>,
}

/// Mean of the raw rows sharing a (size, arm, alpha, n) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AvgRow {
    pub size: (usize, usize),
    pub arm: Arm,
    pub alpha: Option<f64>,
    pub inner_steps: Option<usize>,
    pub count: usize,
    pub mean_phi: f64,
    pub mean_prox: f64,
    pub mean_time_s: f64,
    pub mean_re: Option<f64>,
    pub mean_tr: Option<f64>,
}

/// One point of an aligned time series from the suboptimal race.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub series: String,
    pub t_s: f64,
    pub phi: f64,
    pub prox: f64,
}

/// Fraction of instances per size where the superiorized arm finished with
/// the lower target value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinRow {
    pub size: (usize, usize),
    pub wins: usize,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    pub build: String,
    pub config_echo: String,
    pub rows: Vec<RawRow>,
    pub averages: Vec<AvgRow>,
    pub timeseries: Vec<SeriesPoint>,
    pub win_fractions: Vec<WinRow>,
    /// Simplex budget actually applied per (size, rep) in the suboptimal race.
    pub budgets_used_s: Vec<f64>,
}

// Seed derivation: splitmix64 finalizer folded over (master, tags), so each
// cell's randomness is independent of execution order.
fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut state = master;
    for &t in tags {
        state = splitmix_finalize(state.wrapping_add(GOLDEN).wrapping_add(t));
    }
    splitmix_finalize(state)
}

fn config_echo(spec: &ExperimentSpec) -> String {
    format!(
        "kind={} sizes={:?} reps={} alphas={:?} n_values={:?} alpha={} n={} lambda={} eps={:e} iter_change={:?} max_sweeps={} budget_multiplier={} sample_every={}",
        spec.kind,
        spec.sizes,
        spec.reps,
        spec.alphas,
        spec.n_values,
        spec.base_config.alpha,
        spec.base_config.inner_steps,
        spec.base_config.relaxation,
        spec.base_config.prox_epsilon,
        spec.base_config.iterate_change_epsilon,
        spec.base_config.max_sweeps,
        spec.budget_multiplier,
        spec.sample_every,
    )
}

fn empty_report(spec: &ExperimentSpec) -> ExperimentReport {
    ExperimentReport {
        kind: spec.kind,
        master_seed: spec.seed,
        build: format!("linsup {}", env!("CARGO_PKG_VERSION")),
        config_echo: config_echo(spec),
        rows: Vec::new(),
        averages: Vec::new(),
        timeseries: Vec::new(),
        win_fractions: Vec::new(),
        budgets_used_s: Vec::new(),
    }
}

fn run_row(
    size: (usize, usize),
    rep: usize,
    arm: Arm,
    config: &SolverConfig,
    instance_seed: u64,
    report: &RunReport,
    time_s: f64,
) -> RawRow {
    RawRow {
        size,
        rep,
        arm,
        alpha: Some(config.alpha),
        inner_steps: Some(config.inner_steps),
        instance_seed,
        run_seed: Some(config.seed),
        epsilon: Some(config.prox_epsilon),
        phi: report.final_phi(),
        prox: report.final_prox(),
        time_s,
        steps: report.sweeps,
        stop: report.stop_reason.to_string(),
        flagged: report.stop_reason == StopReason::MaxSweeps,
        phi_simplex: None,
        re: None,
        t_simplex: None,
        tr: None,
    }
}

/// Superiorized and plain feasibility-seeking arms on identical instances,
/// initialization, and stopping rule; reports both final target values and
/// the per-size win fraction of the superiorized arm.
pub fn run_task1(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let mut report = empty_report(spec);
    let alpha = spec.alphas[0];

    for (si, &(rows, cols)) in spec.sizes.iter().enumerate() {
        let mut wins = 0;
        for rep in 0..spec.reps {
            let instance_seed = derive_seed(spec.seed, &[1, si as u64, rep as u64]);
            let problem = generate(&GenSpec::new(rows, cols, instance_seed))?;
            let run_seed = derive_seed(spec.seed, &[2, si as u64, rep as u64]);

            let with_config = SolverConfig {
                alpha,
                superiorize: true,
                seed: run_seed,
                ..spec.base_config.clone()
            };
            let t0 = Instant::now();
            let with = linsup_run(&problem, &with_config)?;
            let with_time = t0.elapsed().as_secs_f64();

            let without_config = SolverConfig {
                superiorize: false,
                ..with_config.clone()
            };
            let t0 = Instant::now();
            let without = seek_feasible(&problem, &without_config)?;
            let without_time = t0.elapsed().as_secs_f64();

            if with.final_phi() < without.final_phi() {
                wins += 1;
            }
            report.rows.push(run_row(
                (rows, cols),
                rep,
                Arm::Superiorized,
                &with_config,
                instance_seed,
                &with,
                with_time,
            ));
            report.rows.push(run_row(
                (rows, cols),
                rep,
                Arm::FeasibilityOnly,
                &without_config,
                instance_seed,
                &without,
                without_time,
            ));
        }
        report.win_fractions.push(WinRow {
            size: (rows, cols),
            wins,
            total: spec.reps,
        });
    }

    report.averages = compute_averages(&report.rows);
    Ok(report)
}

/// Draws instances until the simplex baseline solves one to optimality,
/// mirroring the discard policy of the comparison protocol.
fn solvable_instance(
    spec: &ExperimentSpec,
    kind_tag: u64,
    si: usize,
    rep: usize,
    rows: usize,
    cols: usize,
) -> Result<(Problem, u64, SimplexResult, f64), HarnessError> {
    for attempt in 0..REGENERATION_ATTEMPTS {
        let instance_seed = derive_seed(
            spec.seed,
            &[kind_tag, si as u64, rep as u64, attempt as u64],
        );
        let problem = generate(&GenSpec::new(rows, cols, instance_seed))?;
        let t0 = Instant::now();
        match solve(&problem) {
            Ok(result) if result.status == SimplexStatus::Optimal => {
                let t_simplex = t0.elapsed().as_secs_f64();
                return Ok((problem, instance_seed, result, t_simplex));
            }
            Ok(_) | Err(SimplexError::NumericalBreakdown { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(HarnessError::RegenerationExhausted {
        rows,
        cols,
        rep,
        attempts: REGENERATION_ATTEMPTS,
    })
}

fn simplex_row(
    size: (usize, usize),
    rep: usize,
    instance_seed: u64,
    result: &SimplexResult,
    eps_star: f64,
    t_simplex: f64,
) -> RawRow {
    RawRow {
        size,
        rep,
        arm: Arm::Simplex,
        alpha: None,
        inner_steps: None,
        instance_seed,
        run_seed: None,
        epsilon: None,
        phi: result.objective,
        prox: eps_star,
        time_s: t_simplex,
        steps: result.pivots,
        stop: result.status.to_string(),
        flagged: result.status != SimplexStatus::Optimal,
        phi_simplex: None,
        re: None,
        t_simplex: None,
        tr: None,
    }
}

/// The matched-proximity race: simplex solves first, its solution's
/// proximity becomes the superiorized run's stopping threshold, and the
/// relative error and time ratio are recorded per kernel value.
pub fn run_task2(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let mut report = empty_report(spec);

    for (si, &(rows, cols)) in spec.sizes.iter().enumerate() {
        for rep in 0..spec.reps {
            let (problem, instance_seed, simplex, t_simplex) =
                solvable_instance(spec, 3, si, rep, rows, cols)?;
            let eps_star = proximity(&problem, &simplex.x);
            report.rows.push(simplex_row(
                (rows, cols),
                rep,
                instance_seed,
                &simplex,
                eps_star,
                t_simplex,
            ));

            for (ai, &alpha) in spec.alphas.iter().enumerate() {
                let run_seed =
                    derive_seed(spec.seed, &[4, si as u64, rep as u64, ai as u64]);
                let config = SolverConfig {
                    alpha,
                    superiorize: true,
                    prox_epsilon: eps_star,
                    seed: run_seed,
                    ..spec.base_config.clone()
                };
                let t0 = Instant::now();
                let run = linsup_run(&problem, &config)?;
                let t_linsup = t0.elapsed().as_secs_f64();

                let mut row = run_row(
                    (rows, cols),
                    rep,
                    Arm::Superiorized,
                    &config,
                    instance_seed,
                    &run,
                    t_linsup,
                );
                attach_comparison(&mut row, &run, simplex.objective, t_linsup, t_simplex);
                report.rows.push(row);
            }
        }
    }

    report.averages = compute_averages(&report.rows);
    Ok(report)
}

fn attach_comparison(
    row: &mut RawRow,
    run: &RunReport,
    phi_simplex: f64,
    t_linsup: f64,
    t_simplex: f64,
) {
    row.phi_simplex = Some(phi_simplex);
    row.t_simplex = Some(t_simplex);
    if let Ok(stats) = ComparisonStats::new(run.final_phi(), phi_simplex, t_linsup, t_simplex) {
        row.re = Some(stats.re);
        row.tr = Some(stats.tr);
    }
}

/// Relative error as a function of the perturbation count, at a fixed
/// kernel and fixed proximity threshold.
pub fn run_nsweep(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let mut report = empty_report(spec);
    let alpha = spec.alphas[0];

    for (si, &(rows, cols)) in spec.sizes.iter().enumerate() {
        for rep in 0..spec.reps {
            let (problem, instance_seed, simplex, t_simplex) =
                solvable_instance(spec, 5, si, rep, rows, cols)?;
            let eps_star = proximity(&problem, &simplex.x);
            report.rows.push(simplex_row(
                (rows, cols),
                rep,
                instance_seed,
                &simplex,
                eps_star,
                t_simplex,
            ));

            for (ni, &inner_steps) in spec.n_values.iter().enumerate() {
                let run_seed =
                    derive_seed(spec.seed, &[6, si as u64, rep as u64, ni as u64]);
                let config = SolverConfig {
                    alpha,
                    inner_steps,
                    superiorize: true,
                    seed: run_seed,
                    ..spec.base_config.clone()
                };
                let t0 = Instant::now();
                let run = linsup_run(&problem, &config)?;
                let t_linsup = t0.elapsed().as_secs_f64();

                let mut row = run_row(
                    (rows, cols),
                    rep,
                    Arm::Superiorized,
                    &config,
                    instance_seed,
                    &run,
                    t_linsup,
                );
                attach_comparison(&mut row, &run, simplex.objective, t_linsup, t_simplex);
                report.rows.push(row);
            }
        }
    }

    report.averages = compute_averages(&report.rows);
    Ok(report)
}

/// Superiorized runs stopped on iterate change, then a simplex run budgeted
/// to just past the slowest of them; emits aligned (time, target, proximity)
/// series for all runs.
pub fn run_suboptimal(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let mut report = empty_report(spec);

    for (si, &(rows, cols)) in spec.sizes.iter().enumerate() {
        for rep in 0..spec.reps {
            let instance_seed = derive_seed(spec.seed, &[7, si as u64, rep as u64]);
            let problem = generate(&GenSpec::new(rows, cols, instance_seed))?;

            let mut slowest = 0.0f64;
            for (ai, &alpha) in spec.alphas.iter().enumerate() {
                let run_seed =
                    derive_seed(spec.seed, &[8, si as u64, rep as u64, ai as u64]);
                let config = SolverConfig {
                    alpha,
                    superiorize: true,
                    seed: run_seed,
                    ..spec.base_config.clone()
                };
                let t0 = Instant::now();
                let run = linsup_run(&problem, &config)?;
                let t_linsup = t0.elapsed().as_secs_f64();
                slowest = slowest.max(run.total_time_s());

                let series = format!("linsup_alpha{alpha}");
                for sample in &run.trace {
                    report.timeseries.push(SeriesPoint {
                        series: series.clone(),
                        t_s: sample.elapsed_s + sample.instrumentation_s,
                        phi: sample.phi,
                        prox: sample.prox,
                    });
                }
                report.rows.push(run_row(
                    (rows, cols),
                    rep,
                    Arm::Superiorized,
                    &config,
                    instance_seed,
                    &run,
                    t_linsup,
                ));
            }

            let budget = spec.budget_multiplier * slowest;
            report.budgets_used_s.push(budget);
            let t0 = Instant::now();
            let simplex = solve_budgeted(&problem, budget, spec.sample_every)?;
            let t_simplex = t0.elapsed().as_secs_f64();
            for sample in &simplex.trace {
                report.timeseries.push(SeriesPoint {
                    series: "simplex_budgeted".to_string(),
                    t_s: sample.elapsed_s,
                    phi: sample.objective,
                    prox: sample.prox,
                });
            }
            let mut row = simplex_row(
                (rows, cols),
                rep,
                instance_seed,
                &simplex,
                proximity(&problem, &simplex.x),
                t_simplex,
            );
            row.arm = Arm::SimplexBudgeted;
            row.flagged = false;
            report.rows.push(row);
        }
    }

    report.averages = compute_averages(&report.rows);
    Ok(report)
}

fn compute_averages(rows: &[RawRow]) -> Vec<AvgRow> {
    #[derive(Default)]
    struct Acc {
        count: usize,
        phi: f64,
        prox: f64,
        time: f64,
        re: f64,
        re_count: usize,
        tr: f64,
        tr_count: usize,
    }

    type CellKey = ((usize, usize), Arm, Option<u64>, Option<usize>);
    let mut cells: BTreeMap<CellKey, Acc> = BTreeMap::new();
    for row in rows {
        let key = (row.size, row.arm, row.alpha.map(f64::to_bits), row.inner_steps);
        let acc = cells.entry(key).or_default();
        acc.count += 1;
        acc.phi += row.phi;
        acc.prox += row.prox;
        acc.time += row.time_s;
        if let Some(re) = row.re {
            acc.re += re;
            acc.re_count += 1;
        }
        if let Some(tr) = row.tr {
            acc.tr += tr;
            acc.tr_count += 1;
        }
    }

    cells
        .into_iter()
        .map(|((size, arm, alpha_bits, inner_steps), acc)| AvgRow {
            size,
            arm,
            alpha: alpha_bits.map(f64::from_bits),
            inner_steps,
            count: acc.count,
            mean_phi: acc.phi / acc.count as f64,
            mean_prox: acc.prox / acc.count as f64,
            mean_time_s: acc.time / acc.count as f64,
            mean_re: (acc.re_count > 0).then(|| acc.re / acc.re_count as f64),
            mean_tr: (acc.tr_count > 0).then(|| acc.tr / acc.tr_count as f64),
        })
        .collect()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_file(path: &Path, content: &str) -> Result<(), HarnessError> {
    fs::write(path, content).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

/// Raw per-instance rows, one per (instance, kernel, arm), with numerics at
/// 17 significant digits.
pub fn emit_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut out = String::from(
        "size_rows,size_cols,rep,arm,alpha,n,instance_seed,run_seed,epsilon,phi,prox,time_s,steps,stop,flagged,phi_simplex,re,t_simplex,tr\n",
    );
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.size.0,
            r.size.1,
            r.rep,
            r.arm,
            opt_f64(r.alpha),
            opt_usize(r.inner_steps),
            r.instance_seed,
            r.run_seed.map(|s| s.to_string()).unwrap_or_default(),
            opt_f64(r.epsilon),
            format_f64(r.phi),
            format_f64(r.prox),
            format_f64(r.time_s),
            r.steps,
            r.stop,
            r.flagged,
            opt_f64(r.phi_simplex),
            opt_f64(r.re),
            opt_f64(r.t_simplex),
            opt_f64(r.tr),
        ));
    }
    write_file(path.as_ref(), &out)
}

pub fn emit_averages_csv(
    report: &ExperimentReport,
    path: impl AsRef<Path>,
) -> Result<(), HarnessError> {
    let mut out = String::from(
        "size_rows,size_cols,arm,alpha,n,count,mean_phi,mean_prox,mean_time_s,mean_re,mean_tr\n",
    );
    for a in &report.averages {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            a.size.0,
            a.size.1,
            a.arm,
            opt_f64(a.alpha),
            opt_usize(a.inner_steps),
            a.count,
            format_f64(a.mean_phi),
            format_f64(a.mean_prox),
            format_f64(a.mean_time_s),
            opt_f64(a.mean_re),
            opt_f64(a.mean_tr),
        ));
    }
    write_file(path.as_ref(), &out)
}

/// Plot-ready `(x, y, series)` triples: per-size means keyed by arm and
/// kernel for the table experiments, raw time series for the race.
pub fn emit_plotdata(
    report: &ExperimentReport,
    path: impl AsRef<Path>,
) -> Result<(), HarnessError> {
    let mut out = String::from("x,y,series\n");
    match report.kind {
        ExperimentKind::Suboptimal => {
            for p in &report.timeseries {
                out.push_str(&format!(
                    "{},{},phi_{}\n",
                    format_f64(p.t_s),
                    format_f64(p.phi),
                    p.series
                ));
            }
            for p in &report.timeseries {
                out.push_str(&format!(
                    "{},{},prox_{}\n",
                    format_f64(p.t_s),
                    format_f64(p.prox),
                    p.series
                ));
            }
        }
        ExperimentKind::NSweep => {
            for a in &report.averages {
                if let (Some(n), Some(re)) = (a.inner_steps, a.mean_re) {
                    out.push_str(&format!(
                        "{},{},re_{}x{}\n",
                        n,
                        format_f64(re),
                        a.size.0,
                        a.size.1
                    ));
                }
            }
        }
        ExperimentKind::Task1 => {
            for a in &report.averages {
                out.push_str(&format!(
                    "{},{},phi_{}\n",
                    a.size.0,
                    format_f64(a.mean_phi),
                    a.arm
                ));
                out.push_str(&format!(
                    "{},{},time_{}\n",
                    a.size.0,
                    format_f64(a.mean_time_s),
                    a.arm
                ));
            }
        }
        ExperimentKind::Task2 => {
            for a in &report.averages {
                if a.arm != Arm::Superiorized {
                    continue;
                }
                let label = a.alpha.map(|v| v.to_string()).unwrap_or_default();
                if let Some(re) = a.mean_re {
                    out.push_str(&format!("{},{},re_alpha{label}\n", a.size.0, format_f64(re)));
                }
                if let Some(tr) = a.mean_tr {
                    out.push_str(&format!("{},{},tr_alpha{label}\n", a.size.0, format_f64(tr)));
                }
            }
        }
    }
    write_file(path.as_ref(), &out)
}

pub fn emit_metadata_csv(
    report: &ExperimentReport,
    path: impl AsRef<Path>,
) -> Result<(), HarnessError> {
    let mut out = String::from("key,value\n");
    out.push_str(&format!("kind,{}\n", report.kind));
    out.push_str(&format!("master_seed,{}\n", report.master_seed));
    out.push_str(&format!("build,{}\n", report.build));
    out.push_str(&format!("config,\"{}\"\n", report.config_echo));
    for w in &report.win_fractions {
        out.push_str(&format!(
            "win_fraction_{}x{},{}/{}\n",
            w.size.0, w.size.1, w.wins, w.total
        ));
    }
    for (i, b) in report.budgets_used_s.iter().enumerate() {
        out.push_str(&format!("simplex_budget_s_{i},{}\n", format_f64(*b)));
    }
    write_file(path.as_ref(), &out)
}

/// Writes the full report set (`raw.csv`, `averages.csv`, `plotdata.csv`,
/// `metadata.csv`) into a directory.
pub fn emit_report_dir(
    report: &ExperimentReport,
    dir: impl AsRef<Path>,
) -> Result<(), HarnessError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    emit_csv(report, dir.join("raw.csv"))?;
    emit_averages_csv(report, dir.join("averages.csv"))?;
    emit_plotdata(report, dir.join("plotdata.csv"))?;
    emit_metadata_csv(report, dir.join("metadata.csv"))?;
    Ok(())
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    match spec.kind {
        ExperimentKind::Task1 => run_task1(spec),
        ExperimentKind::Task2 => run_task2(spec),
        ExperimentKind::NSweep => run_nsweep(spec),
        ExperimentKind::Suboptimal => run_suboptimal(spec),
    }
}
