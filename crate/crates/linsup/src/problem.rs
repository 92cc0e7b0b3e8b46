//! Problem and solver-configuration data model, validation, and the
//! plain-text problem file format shared by every other module.

use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// A dense instance of the linear feasibility/reduction problem:
/// find x with `A x <= b`, `x >= 0`, steering the target `phi(x) = <c, x>`
/// downward. `A` is stored row-major because every consumer walks whole rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    row_count: usize,
    col_count: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Cached squared Euclidean norm of each row of `A`.
    row_norms_sq: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("row {0} of A has zero Euclidean norm")]
    ZeroRow(usize),
    #[error("cost vector c has zero Euclidean norm")]
    ZeroCost,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in {0}")]
    NonFiniteEntry(&'static str),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Problem {
    /// Builds a problem from raw parts, rejecting anything that violates the
    /// invariants (zero rows, zero cost, wrong lengths, non-finite entries).
    pub fn new(
        row_count: usize,
        col_count: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self, ProblemError> {
        if row_count == 0 || col_count == 0 {
            return Err(ProblemError::DimensionMismatch(format!(
                "need at least one row and one column, got {row_count}x{col_count}"
            )));
        }
        if a.len() != row_count * col_count {
            return Err(ProblemError::DimensionMismatch(format!(
                "A has {} entries, expected {}",
                a.len(),
                row_count * col_count
            )));
        }
        if b.len() != row_count {
            return Err(ProblemError::DimensionMismatch(format!(
                "b has {} entries, expected {row_count}",
                b.len()
            )));
        }
        if c.len() != col_count {
            return Err(ProblemError::DimensionMismatch(format!(
                "c has {} entries, expected {col_count}",
                c.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFiniteEntry("A"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFiniteEntry("b"));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFiniteEntry("c"));
        }
        let mut row_norms_sq = Vec::with_capacity(row_count);
        for i in 0..row_count {
            let row = &a[i * col_count..(i + 1) * col_count];
            let norm_sq: f64 = row.iter().map(|v| v * v).sum();
            if norm_sq == 0.0 {
                return Err(ProblemError::ZeroRow(i));
            }
            row_norms_sq.push(norm_sq);
        }
        if c.iter().map(|v| v * v).sum::<f64>() == 0.0 {
            return Err(ProblemError::ZeroCost);
        }
        Ok(Problem {
            row_count,
            col_count,
            a,
            b,
            c,
            row_norms_sq,
        })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn col_count(&self) -> usize {
        self.col_count
    }

    /// Row `i` of `A` as a slice of length `col_count`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.col_count..(i + 1) * self.col_count]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn cost(&self) -> &[f64] {
        &self.c
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row_norms_sq[i]
    }

    /// Re-checks all construction invariants. Always succeeds on a `Problem`
    /// built through `new`; exposed so stored instances can be audited.
    pub fn validate(&self) -> Result<(), ProblemError> {
        Problem::new(
            self.row_count,
            self.col_count,
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
        )
        .map(|_| ())
    }
}

/// Initialization point policy for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitPolicy {
    /// The vector `10 * 1` of length `col_count`.
    AllTens,
    /// Uniform draw on `[0,1)^J`, multiplied by 10 until it leaves the
    /// feasible set (nonzero proximity).
    RandomEscalated,
    /// A caller-supplied point, used verbatim.
    Explicit(Vec<f64>),
}

/// All tunables of a feasibility-seeking or superiorized run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Kernel of the geometric step-size sequence, in (0,1).
    pub alpha: f64,
    /// Number of perturbation steps per sweep (N), at least 1.
    pub inner_steps: usize,
    /// Relaxation parameter of the projection step, in (0,2).
    pub relaxation: f64,
    /// Stop as soon as the proximity of the iterate drops to this value.
    pub prox_epsilon: f64,
    /// Hard cap on outer sweeps.
    pub max_sweeps: usize,
    /// Seed of the run's deterministic generator.
    pub seed: u64,
    pub init: InitPolicy,
    /// `false` runs the bare feasibility-seeking arm (no perturbations).
    pub superiorize: bool,
    /// Optional alternative stop rule on the relative iterate change
    /// `|y_{k+1} - y_k| / |y_k|`.
    pub iterate_change_epsilon: Option<f64>,
    /// Record the full iterate after every sweep (memory-heavy; used by
    /// trajectory-equality checks).
    pub record_points: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha: 0.99,
            inner_steps: 30,
            relaxation: 1.0,
            prox_epsilon: 1e-10,
            max_sweeps: 200_000,
            seed: 0,
            init: InitPolicy::AllTens,
            superiorize: true,
            iterate_change_epsilon: None,
            record_points: false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("alpha must lie strictly inside (0,1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("inner_steps must be at least 1")]
    ZeroInnerSteps,
    #[error("relaxation must lie strictly inside (0,2), got {0}")]
    RelaxationOutOfRange(f64),
    #[error("prox_epsilon must be finite and nonnegative, got {0}")]
    BadProxEpsilon(f64),
    #[error("iterate_change_epsilon must be finite and nonnegative, got {0}")]
    BadIterateChangeEpsilon(f64),
    #[error("max_sweeps must be at least 1")]
    ZeroMaxSweeps,
    #[error("explicit initialization point has {got} entries, problem needs {want}")]
    InitPointLength { got: usize, want: usize },
}

impl SolverConfig {
    pub fn validate(&self, problem: &Problem) -> Result<(), ConfigError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::AlphaOutOfRange(self.alpha));
        }
        if self.inner_steps == 0 {
            return Err(ConfigError::ZeroInnerSteps);
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(ConfigError::RelaxationOutOfRange(self.relaxation));
        }
        if !self.prox_epsilon.is_finite() || self.prox_epsilon < 0.0 {
            return Err(ConfigError::BadProxEpsilon(self.prox_epsilon));
        }
        if let Some(eps) = self.iterate_change_epsilon {
            if !eps.is_finite() || eps < 0.0 {
                return Err(ConfigError::BadIterateChangeEpsilon(eps));
            }
        }
        if self.max_sweeps == 0 {
            return Err(ConfigError::ZeroMaxSweeps);
        }
        if let InitPolicy::Explicit(point) = &self.init {
            if point.len() != problem.col_count() {
                return Err(ConfigError::InitPointLength {
                    got: point.len(),
                    want: problem.col_count(),
                });
            }
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ProxBelowEpsilon,
    IterateChangeBelowEpsilon,
    MaxSweeps,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::ProxBelowEpsilon => "prox_below_epsilon",
            StopReason::IterateChangeBelowEpsilon => "iterate_change_below_epsilon",
            StopReason::MaxSweeps => "max_sweeps",
        };
        f.write_str(s)
    }
}

/// One per-sweep measurement. `elapsed_s` excludes the accumulated cost of
/// evaluating the sample itself; that cost is reported in
/// `instrumentation_s` (cumulative) so either timing convention can be
/// reconstructed.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub sweep: usize,
    pub elapsed_s: f64,
    pub instrumentation_s: f64,
    pub prox: f64,
    pub phi: f64,
}

/// One perturbation step-size emission: sweep index, the power index the
/// step size was drawn at, and the step size itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEmission {
    pub sweep: usize,
    pub exponent: usize,
    pub beta: f64,
}

/// Everything a run reports back.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// One sample per sweep, plus one for the initial point.
    pub trace: Vec<TraceSample>,
    pub final_point: Vec<f64>,
    pub stop_reason: StopReason,
    /// Sum of every emitted perturbation step size; exactly 0 for
    /// feasibility-only runs.
    pub beta_sum: f64,
    pub sweeps: usize,
    /// Every emitted step size, in order.
    pub beta_log: Vec<BetaEmission>,
    /// Full iterate after every sweep, present when requested.
    pub points: Option<Vec<Vec<f64>>>,
}

impl RunReport {
    /// Total wall time including instrumentation.
    pub fn total_time_s(&self) -> f64 {
        self.trace
            .last()
            .map(|s| s.elapsed_s + s.instrumentation_s)
            .unwrap_or(0.0)
    }

    pub fn final_prox(&self) -> f64 {
        self.trace.last().map(|s| s.prox).unwrap_or(f64::NAN)
    }

    pub fn final_phi(&self) -> f64 {
        self.trace.last().map(|s| s.phi).unwrap_or(f64::NAN)
    }
}

/// Formats a float with 17 significant digits, enough for an exact
/// round trip through decimal text.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(token: &str, line: usize) -> Result<f64, ProblemError> {
    token.parse::<f64>().map_err(|_| ProblemError::ParseError {
        line,
        message: format!("expected a number, got {token:?}"),
    })
}

fn parse_row(
    lines: &mut std::iter::Enumerate<std::str::Lines<'_>>,
    expected: usize,
    what: &str,
) -> Result<(Vec<f64>, usize), ProblemError> {
    for (idx, raw) in lines.by_ref() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let values: Vec<f64> = raw
            .split_whitespace()
            .map(|tok| parse_float(tok, line_no))
            .collect::<Result<_, _>>()?;
        if values.len() != expected {
            return Err(ProblemError::ParseError {
                line: line_no,
                message: format!("{what}: expected {expected} values, got {}", values.len()),
            });
        }
        return Ok((values, line_no));
    }
    Err(ProblemError::ParseError {
        line: 0,
        message: format!("file truncated while reading {what}"),
    })
}

/// Parses the plain-text problem format:
/// a header line `I J`, then `I` rows of `A`, one line with `b`, one with `c`.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let mut lines = text.lines().enumerate();
    let (header, header_line) = parse_row(&mut lines, 2, "header")?;
    let to_dim = |v: f64, name: &str| -> Result<usize, ProblemError> {
        if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
            return Err(ProblemError::ParseError {
                line: header_line,
                message: format!("{name} must be a positive integer, got {v}"),
            });
        }
        Ok(v as usize)
    };
    let row_count = to_dim(header[0], "I")?;
    let col_count = to_dim(header[1], "J")?;

    let mut a = Vec::with_capacity(row_count * col_count);
    for i in 0..row_count {
        let (row, _) = parse_row(&mut lines, col_count, &format!("row {i} of A"))?;
        a.extend_from_slice(&row);
    }
    let (b, _) = parse_row(&mut lines, row_count, "b")?;
    let (c, last_line) = parse_row(&mut lines, col_count, "c")?;
    for (idx, raw) in lines {
        if !raw.trim().is_empty() {
            return Err(ProblemError::ParseError {
                line: idx + 1,
                message: "unexpected trailing content".to_string(),
            });
        }
        let _ = last_line;
    }
    Problem::new(row_count, col_count, a, b, c)
}

/// Renders a problem in the same text format `parse_problem` reads.
pub fn render_problem(problem: &Problem) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", problem.row_count(), problem.col_count()));
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|v| format_f64(*v))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for i in 0..problem.row_count() {
        out.push_str(&join(problem.row(i)));
        out.push('\n');
    }
    out.push_str(&join(problem.rhs()));
    out.push('\n');
    out.push_str(&join(problem.cost()));
    out.push('\n');
    out
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<Problem, ProblemError> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| ProblemError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_problem(&text)
}

pub fn write_problem(problem: &Problem, path: impl AsRef<Path>) -> Result<(), ProblemError> {
    fs::write(path.as_ref(), render_problem(problem))
        .map_err(|e| ProblemError::Io(format!("{}: {e}", path.as_ref().display())))
}
