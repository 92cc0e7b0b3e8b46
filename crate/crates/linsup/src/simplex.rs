//! Dense two-phase primal simplex for `min <c,x>  s.t.  A x <= b, x >= 0`,
//! with a wall-clock-budgeted variant that snapshots its progress, plus a
//! brute-force vertex-enumeration solver used as an independent check on
//! small instances.
//!
//! Pivot selection follows Bland's smallest-index rule throughout, trading
//! speed for a termination guarantee.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::metrics::{dot, proximity};
use crate::problem::Problem;

const ENTERING_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const RATIO_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Unbounded,
    Infeasible,
    BudgetExhausted,
}

impl std::fmt::Display for SimplexStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SimplexStatus::Optimal => "optimal",
            SimplexStatus::Unbounded => "unbounded",
            SimplexStatus::Infeasible => "infeasible",
            SimplexStatus::BudgetExhausted => "budget_exhausted",
        };
        f.write_str(s)
    }
}

/// Snapshot of the current basic solution, taken every `sample_every`
/// pivots in budgeted mode. `elapsed_s` excludes the time spent computing
/// the snapshots themselves; the cumulative snapshot cost is reported in
/// `instrumentation_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexTraceSample {
    pub elapsed_s: f64,
    pub instrumentation_s: f64,
    pub pivots: usize,
    pub objective: f64,
    pub prox: f64,
    /// 1 while searching for a feasible basis, 2 while optimizing.
    pub phase: u8,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub status: SimplexStatus,
    /// Best structural point found (the optimal vertex when `Optimal`).
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    pub trace: Vec<SimplexTraceSample>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("numerical breakdown after {pivots} pivots: {message}")]
    NumericalBreakdown { pivots: usize, message: String },
    #[error("budget must be positive, got {0}")]
    InvalidBudget(f64),
}

/// Solves the problem to optimality (or proves it unbounded/infeasible).
pub fn solve(problem: &Problem) -> Result<SimplexResult, SimplexError> {
    solve_inner(problem, default_pivot_cap(problem), None)
}

/// Identical pivoting to `solve`, but stops with `BudgetExhausted` once
/// `budget_s` seconds of pivoting time elapse, recording a trace sample
/// every `sample_every` pivots. Snapshot costs are kept out of the budget
/// and the timestamps.
pub fn solve_budgeted(
    problem: &Problem,
    budget_s: f64,
    sample_every: usize,
) -> Result<SimplexResult, SimplexError> {
    if !(budget_s > 0.0) {
        return Err(SimplexError::InvalidBudget(budget_s));
    }
    let sampler = Sampler {
        problem,
        budget: budget_s,
        sample_every: sample_every.max(1),
        start: Instant::now(),
        instrumentation: Duration::ZERO,
        trace: Vec::new(),
    };
    solve_inner(problem, default_pivot_cap(problem), Some(sampler))
}

fn default_pivot_cap(problem: &Problem) -> usize {
    10_000 + 400 * (problem.row_count() + problem.col_count())
}

struct Sampler<'a> {
    problem: &'a Problem,
    budget: f64,
    sample_every: usize,
    start: Instant,
    instrumentation: Duration,
    trace: Vec<SimplexTraceSample>,
}

impl Sampler<'_> {
    fn elapsed_s(&self) -> f64 {
        self.start
            .elapsed()
            .checked_sub(self.instrumentation)
            .unwrap_or_default()
            .as_secs_f64()
    }

    fn record(&mut self, tab: &Tableau, phase: u8, pivots: usize) {
        let t0 = Instant::now();
        let elapsed_s = self.elapsed_s();
        let x = tab.structural_point();
        let objective = dot(self.problem.cost(), &x);
        let prox = proximity(self.problem, &x);
        self.instrumentation += t0.elapsed();
        self.trace.push(SimplexTraceSample {
            elapsed_s,
            instrumentation_s: self.instrumentation.as_secs_f64(),
            pivots,
            objective,
            prox,
            phase,
        });
    }

    fn budget_exhausted(&self) -> bool {
        self.elapsed_s() > self.budget
    }
}

struct Tableau {
    structural: usize,
    cols: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn structural_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.structural];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.structural {
                x[bv] = self.rhs[i];
            }
        }
        x
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize, reduced: &mut [f64], obj: &mut f64) {
        let pivot_val = self.rows[pivot_row][pivot_col];
        let inv = 1.0 / pivot_val;
        for v in &mut self.rows[pivot_row] {
            *v *= inv;
        }
        self.rhs[pivot_row] *= inv;

        for r in 0..self.rows.len() {
            if r == pivot_row {
                continue;
            }
            let factor = self.rows[r][pivot_col];
            if factor == 0.0 {
                continue;
            }
            let (pivot_slice, rhs_p) = (self.rows[pivot_row].clone(), self.rhs[pivot_row]);
            let row = &mut self.rows[r];
            for (v, pv) in row.iter_mut().zip(&pivot_slice) {
                *v -= factor * pv;
            }
            self.rhs[r] -= factor * rhs_p;
        }

        let factor = reduced[pivot_col];
        if factor != 0.0 {
            *obj += factor * self.rhs[pivot_row];
            for (z, pv) in reduced.iter_mut().zip(&self.rows[pivot_row]) {
                *z -= factor * pv;
            }
        }

        self.basis[pivot_row] = pivot_col;
    }
}

enum LoopExit {
    Optimal,
    Unbounded,
    BudgetExhausted,
}

struct PivotState<'a, 'b> {
    pivots: usize,
    pivot_cap: usize,
    sampler: Option<&'b mut Sampler<'a>>,
}

/// Bland's rule pivot loop on the current reduced-cost row: smallest-index
/// entering column with a negative reduced cost, smallest-ratio leaving row
/// with ties broken by smallest basic variable index.
fn bland_loop(
    tab: &mut Tableau,
    reduced: &mut [f64],
    obj: &mut f64,
    active_cols: usize,
    phase: u8,
    state: &mut PivotState<'_, '_>,
) -> Result<LoopExit, SimplexError> {
    loop {
        let entering = (0..active_cols).find(|&j| reduced[j] < -ENTERING_TOL);
        let Some(q) = entering else {
            return Ok(LoopExit::Optimal);
        };

        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..tab.rows.len() {
            let coef = tab.rows[i][q];
            if coef > PIVOT_TOL {
                let ratio = tab.rhs[i].max(0.0) / coef;
                let candidate = (ratio, tab.basis[i], i);
                best = Some(match best {
                    None => candidate,
                    Some(cur) => {
                        if ratio < cur.0 - RATIO_TIE_TOL
                            || ((ratio - cur.0).abs() <= RATIO_TIE_TOL && candidate.1 < cur.1)
                        {
                            candidate
                        } else {
                            cur
                        }
                    }
                });
            }
        }
        let Some((_, _, p)) = best else {
            return Ok(LoopExit::Unbounded);
        };

        let pivot_val = tab.rows[p][q];
        if pivot_val.abs() < PIVOT_TOL {
            return Err(SimplexError::NumericalBreakdown {
                pivots: state.pivots,
                message: format!("pivot element {pivot_val:e} below {PIVOT_TOL:e}"),
            });
        }

        tab.pivot(p, q, reduced, obj);
        state.pivots += 1;

        if state.pivots > state.pivot_cap {
            return Err(SimplexError::NumericalBreakdown {
                pivots: state.pivots,
                message: format!("pivot cap {} exceeded", state.pivot_cap),
            });
        }

        if let Some(sampler) = state.sampler.as_deref_mut() {
            if state.pivots % sampler.sample_every == 0 {
                sampler.record(tab, phase, state.pivots);
            }
            if sampler.budget_exhausted() {
                return Ok(LoopExit::BudgetExhausted);
            }
        }
    }
}

fn solve_inner(
    problem: &Problem,
    pivot_cap: usize,
    mut sampler: Option<Sampler<'_>>,
) -> Result<SimplexResult, SimplexError> {
    let m = problem.row_count();
    let n = problem.col_count();

    // Standard form A x + s = b with slack columns; rows with negative
    // right-hand sides are negated and given an artificial variable.
    let needs_artificial: Vec<usize> = (0..m).filter(|&i| problem.rhs()[i] < 0.0).collect();
    let artificials = needs_artificial.len();
    let cols = n + m + artificials;

    let mut tab = Tableau {
        structural: n,
        cols,
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
    };

    let mut artificial_idx = 0;
    for i in 0..m {
        let mut row = vec![0.0; cols];
        let negate = problem.rhs()[i] < 0.0;
        let sign = if negate { -1.0 } else { 1.0 };
        for (j, &a) in problem.row(i).iter().enumerate() {
            row[j] = sign * a;
        }
        row[n + i] = sign;
        if negate {
            let art_col = n + m + artificial_idx;
            row[art_col] = 1.0;
            tab.basis.push(art_col);
            artificial_idx += 1;
        } else {
            tab.basis.push(n + i);
        }
        tab.rows.push(row);
        tab.rhs.push(sign * problem.rhs()[i]);
    }

    let mut state = PivotState {
        pivots: 0,
        pivot_cap,
        sampler: sampler.as_mut(),
    };

    // Phase 1: minimize the sum of artificial variables.
    if artificials > 0 {
        let mut reduced = vec![0.0; cols];
        let mut obj = 0.0;
        for i in 0..m {
            if tab.basis[i] >= n + m {
                for (z, v) in reduced.iter_mut().zip(&tab.rows[i]) {
                    *z -= v;
                }
                obj += tab.rhs[i];
            }
        }
        for z in &mut reduced[n + m..] {
            *z += 1.0;
        }

        let exit = bland_loop(&mut tab, &mut reduced, &mut obj, cols, 1, &mut state)?;
        match exit {
            LoopExit::Unbounded => {
                return Err(SimplexError::NumericalBreakdown {
                    pivots: state.pivots,
                    message: "phase 1 reported an unbounded direction".into(),
                });
            }
            LoopExit::BudgetExhausted => {
                return Ok(finish(problem, &tab, SimplexStatus::BudgetExhausted, state.pivots, sampler));
            }
            LoopExit::Optimal => {}
        }

        let b_scale = problem.rhs().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if obj > 1e-8 * (1.0 + b_scale) {
            return Ok(finish(problem, &tab, SimplexStatus::Infeasible, state.pivots, sampler));
        }

        // Drive leftover artificials out of the basis; a row that offers no
        // pivot among the real columns is redundant and dropped.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n + m {
                let pivot_col = (0..n + m).find(|&j| tab.rows[i][j].abs() > 1e-9);
                match pivot_col {
                    Some(q) => {
                        let mut dummy = vec![0.0; cols];
                        let mut dummy_obj = 0.0;
                        tab.pivot(i, q, &mut dummy, &mut dummy_obj);
                        state.pivots += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        for row in &mut tab.rows {
            row.truncate(n + m);
        }
        tab.cols = n + m;
    }

    // Phase 2: reduced costs of the real objective over the current basis.
    let cost = |j: usize| -> f64 {
        if j < n {
            problem.cost()[j]
        } else {
            0.0
        }
    };
    let mut reduced: Vec<f64> = (0..tab.cols).map(cost).collect();
    let mut obj = 0.0;
    for i in 0..tab.rows.len() {
        let cb = cost(tab.basis[i]);
        if cb != 0.0 {
            obj += cb * tab.rhs[i];
            let row = tab.rows[i].clone();
            for (z, v) in reduced.iter_mut().zip(&row) {
                *z -= cb * v;
            }
        }
    }

    let cols = tab.cols;
    let exit = bland_loop(&mut tab, &mut reduced, &mut obj, cols, 2, &mut state)?;
    let status = match exit {
        LoopExit::Optimal => SimplexStatus::Optimal,
        LoopExit::Unbounded => SimplexStatus::Unbounded,
        LoopExit::BudgetExhausted => SimplexStatus::BudgetExhausted,
    };
    Ok(finish(problem, &tab, status, state.pivots, sampler))
}

fn finish(
    problem: &Problem,
    tab: &Tableau,
    status: SimplexStatus,
    pivots: usize,
    mut sampler: Option<Sampler<'_>>,
) -> SimplexResult {
    let x = tab.structural_point();
    let objective = dot(problem.cost(), &x);
    let mut trace = Vec::new();
    if let Some(s) = sampler.as_mut() {
        let phase = if matches!(status, SimplexStatus::Infeasible) { 1 } else { 2 };
        s.record(tab, phase, pivots);
        trace = std::mem::take(&mut s.trace);
    }
    SimplexResult {
        status,
        x,
        objective,
        pivots,
        trace,
    }
}

// ---------------------------------------------------------------------------
// Brute-force vertex enumeration.

/// Size bounds above which enumeration is refused.
pub const ORACLE_MAX_ROWS: usize = 12;
pub const ORACLE_MAX_COLS: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance {0}x{1} exceeds the enumeration bound {ORACLE_MAX_ROWS}x{ORACLE_MAX_COLS}")]
    TooLarge(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum VertexSolution {
    Optimal { objective: f64, x: Vec<f64> },
    Unbounded,
    Infeasible,
}

/// Independent solver for tiny instances: enumerates every basic solution
/// of the slack-augmented system `[A I] z = b` and keeps the best feasible
/// vertex, declaring unboundedness by enumerating the extreme rays of the
/// recession cone `{d >= 0, A d <= 0}` and testing the cost against each.
pub fn solve_by_vertex_enumeration(problem: &Problem) -> Result<VertexSolution, OracleError> {
    let m = problem.row_count();
    let n = problem.col_count();
    if m > ORACLE_MAX_ROWS || n > ORACLE_MAX_COLS {
        return Err(OracleError::TooLarge(m, n));
    }

    let b_scale = problem.rhs().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let feas_tol = 1e-9 * (1.0 + b_scale);

    // Column j of [A I] for j < n is the j-th column of A, then slacks.
    let column = |j: usize, i: usize| -> f64 {
        if j < n {
            problem.row(i)[j]
        } else if j - n == i {
            1.0
        } else {
            0.0
        }
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut combo = Combinations::new(n + m, m);
    while let Some(basis) = combo.next() {
        let mut mat: Vec<Vec<f64>> = (0..m)
            .map(|i| basis.iter().map(|&j| column(j, i)).collect())
            .collect();
        let mut rhs = problem.rhs().to_vec();
        let Some(z) = gaussian_solve(&mut mat, &mut rhs) else {
            continue;
        };
        if z.iter().any(|&v| v < -feas_tol) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (&j, &v) in basis.iter().zip(&z) {
            if j < n {
                x[j] = v;
            }
        }
        let objective = dot(problem.cost(), &x);
        let improves = match &best {
            None => true,
            Some((cur, _)) => objective < *cur,
        };
        if improves {
            best = Some((objective, x));
        }
    }

    let Some((objective, x)) = best else {
        return Ok(VertexSolution::Infeasible);
    };

    if has_negative_ray(problem) {
        return Ok(VertexSolution::Unbounded);
    }

    Ok(VertexSolution::Optimal { objective, x })
}

/// Looks for an extreme ray `d` of the recession cone with `<c, d> < 0`.
/// Extreme rays carry `n - 1` linearly independent active constraints among
/// the rows of `A` and the sign constraints, so it is enough to scan those
/// subsets and the one-dimensional nullspaces they pin down.
fn has_negative_ray(problem: &Problem) -> bool {
    let m = problem.row_count();
    let n = problem.col_count();

    // Constraint normals of the cone: a_i (rows) and -e_j (signs).
    let normal = |idx: usize, j: usize| -> f64 {
        if idx < m {
            problem.row(idx)[j]
        } else if idx - m == j {
            -1.0
        } else {
            0.0
        }
    };

    let in_cone = |d: &[f64]| -> bool {
        d.iter().all(|&v| v >= -1e-9)
            && (0..m).all(|i| dot(problem.row(i), d) <= 1e-9)
    };

    let mut combo = Combinations::new(m + n, n.saturating_sub(1));
    while let Some(active) = combo.next() {
        let mat: Vec<Vec<f64>> = active
            .iter()
            .map(|&idx| (0..n).map(|j| normal(idx, j)).collect())
            .collect();
        let Some(mut d) = nullspace_generator(&mat, n) else {
            continue;
        };
        let scale = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if scale == 0.0 {
            continue;
        }
        for v in &mut d {
            *v /= scale;
        }
        for candidate in [d.clone(), d.iter().map(|v| -v).collect::<Vec<_>>()] {
            if in_cone(&candidate) && dot(problem.cost(), &candidate) < -1e-9 {
                return true;
            }
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` on (near-)singular.
fn gaussian_solve(mat: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let m = mat.len();
    let scale = mat
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-10 * (1.0 + scale);
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
            .unwrap();
        if mat[pivot_row][col].abs() <= tol {
            return None;
        }
        mat.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for r in col + 1..m {
            let factor = mat[r][col] / mat[col][col];
            if factor == 0.0 {
                continue;
            }
            for j in col..m {
                mat[r][j] -= factor * mat[col][j];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut z = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = rhs[row];
        for j in row + 1..m {
            acc -= mat[row][j] * z[j];
        }
        z[row] = acc / mat[row][row];
    }
    Some(z)
}

/// One-dimensional nullspace of a `(k x n)` matrix with `k = n - 1`; `None`
/// unless the rank is exactly `n - 1`.
fn nullspace_generator(mat: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let k = mat.len();
    let mut work: Vec<Vec<f64>> = mat.to_vec();
    let scale = work
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-9 * (1.0 + scale);

    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= k {
            break;
        }
        let pivot_row = (row..k)
            .max_by(|&a, &b| work[a][col].abs().total_cmp(&work[b][col].abs()))
            .unwrap();
        if work[pivot_row][col].abs() <= tol {
            continue;
        }
        work.swap(row, pivot_row);
        let inv = 1.0 / work[row][col];
        for v in &mut work[row] {
            *v *= inv;
        }
        for r in 0..k {
            if r != row {
                let factor = work[r][col];
                if factor != 0.0 {
                    for j in 0..n {
                        work[r][j] -= factor * work[row][j];
                    }
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    if pivot_cols.len() != k {
        return None;
    }
    let free_col = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut d = vec![0.0; n];
    d[free_col] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        d[pc] = -work[r][free_col];
    }
    Some(d)
}

/// Lexicographic k-combinations of `0..n`.
struct Combinations {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let state = (k <= n).then(|| (0..k).collect());
        Combinations { n, k, state }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.take()?;
        let mut successor = current.clone();
        let mut i = self.k;
        while i > 0 {
            i -= 1;
            if successor[i] < self.n - (self.k - i) {
                successor[i] += 1;
                for j in i + 1..self.k {
                    successor[j] = successor[j - 1] + 1;
                }
                self.state = Some(successor);
                break;
            }
        }
        Some(current)
    }
}
