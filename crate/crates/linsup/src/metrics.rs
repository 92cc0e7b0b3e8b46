//! The three measured quantities: proximity to the target set, target
//! value, and the relative-error / time-ratio comparison statistics.

use thiserror::Error;

use crate::problem::Problem;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("relative error undefined: reference objective is zero")]
    DivisionByZeroObjective,
    #[error("time ratio undefined: denominator {0} is not positive")]
    NonPositiveDenominator(f64),
}

/// Normalized feasibility violation of `x`:
///
/// ```text
/// (1/2I) sum_i ((<a_i, x> - b_i)_+)^2 / |a_i|^2  +  (1/2J) sum_j ((-x_j)_+)^2
/// ```
///
/// Zero exactly on the target set `{A x <= b, x >= 0}`. Row scaling leaves
/// the first term unchanged, so the value is invariant under positive
/// rescaling of any constraint.
pub fn proximity(problem: &Problem, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), problem.col_count());
    let rows = problem.row_count() as f64;
    let cols = problem.col_count() as f64;

    let mut row_term = 0.0;
    for i in 0..problem.row_count() {
        let violation = dot(problem.row(i), x) - problem.rhs()[i];
        if violation > 0.0 {
            row_term += violation * violation / problem.row_norm_sq(i);
        }
    }

    let mut neg_term = 0.0;
    for &xj in x {
        if xj < 0.0 {
            neg_term += xj * xj;
        }
    }

    row_term / (2.0 * rows) + neg_term / (2.0 * cols)
}

/// The linear target `<c, x>`.
pub fn target_value(problem: &Problem, x: &[f64]) -> f64 {
    dot(problem.cost(), x)
}

/// `|phi_linsup - phi_simplex| / |phi_simplex|`.
pub fn relative_error(phi_linsup: f64, phi_simplex: f64) -> Result<f64, MetricsError> {
    if phi_simplex == 0.0 {
        return Err(MetricsError::DivisionByZeroObjective);
    }
    Ok((phi_linsup - phi_simplex).abs() / phi_simplex.abs())
}

/// `t_linsup / t_simplex`.
pub fn time_ratio(t_linsup: f64, t_simplex: f64) -> Result<f64, MetricsError> {
    if t_simplex <= 0.0 {
        return Err(MetricsError::NonPositiveDenominator(t_simplex));
    }
    Ok(t_linsup / t_simplex)
}

/// Target values, times, and the derived comparison quantities for one
/// matched pair of runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonStats {
    pub phi_linsup: f64,
    pub phi_simplex: f64,
    pub re: f64,
    pub t_linsup: f64,
    pub t_simplex: f64,
    pub tr: f64,
}

impl ComparisonStats {
    pub fn new(
        phi_linsup: f64,
        phi_simplex: f64,
        t_linsup: f64,
        t_simplex: f64,
    ) -> Result<Self, MetricsError> {
        Ok(ComparisonStats {
            phi_linsup,
            phi_simplex,
            re: relative_error(phi_linsup, phi_simplex)?,
            t_linsup,
            t_simplex,
            tr: time_ratio(t_linsup, t_simplex)?,
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
