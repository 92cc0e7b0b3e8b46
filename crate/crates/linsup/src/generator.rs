//! Random test-instance generation and initialization-point selection.
//!
//! Instances are built so that the all-ones vector is strictly interior to
//! the target set: `b = A*1 + slack*1` with a positive slack.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::metrics::proximity;
use crate::problem::{InitPolicy, Problem};

/// Parameters of one random instance draw. Entry ranges are half-open
/// `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub rows: usize,
    pub cols: usize,
    pub a_range: (f64, f64),
    pub c_range: (f64, f64),
    /// Margin added to `A*1` when building `b`; keeps `1` interior.
    pub slack: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        GenSpec {
            rows,
            cols,
            a_range: (-1.0, 2.0),
            c_range: (-2.0, 3.0),
            slack: 10.0,
            seed,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("generation spec invalid: {0}")]
    InvalidSpec(String),
    #[error("initialization escalation failed to leave the target set after {0} scalings")]
    EscalationFailed(usize),
}

/// Draws a dense instance: `A` i.i.d. uniform on `a_range`, `c` i.i.d.
/// uniform on `c_range`, and `b = A*1 + slack*1`. The cost vector is redrawn
/// in the measure-zero event that it comes out identically zero.
pub fn generate(spec: &GenSpec) -> Result<Problem, GenError> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(GenError::InvalidSpec("rows and cols must be positive".into()));
    }
    if !(spec.a_range.0 < spec.a_range.1) || !(spec.c_range.0 < spec.c_range.1) {
        return Err(GenError::InvalidSpec("entry ranges must be nonempty".into()));
    }
    if !(spec.slack > 0.0) {
        return Err(GenError::InvalidSpec("slack must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a: Vec<f64> = (0..spec.rows * spec.cols)
        .map(|_| rng.gen_range(spec.a_range.0..spec.a_range.1))
        .collect();

    let mut c: Vec<f64> = (0..spec.cols)
        .map(|_| rng.gen_range(spec.c_range.0..spec.c_range.1))
        .collect();
    while c.iter().all(|&v| v == 0.0) {
        c = (0..spec.cols)
            .map(|_| rng.gen_range(spec.c_range.0..spec.c_range.1))
            .collect();
    }

    let b: Vec<f64> = (0..spec.rows)
        .map(|i| {
            let row_sum: f64 = a[i * spec.cols..(i + 1) * spec.cols].iter().sum();
            row_sum + spec.slack
        })
        .collect();

    // Rows of A can only be zero on a measure-zero draw, and b keeps 1
    // strictly interior, so construction cannot fail here.
    Problem::new(spec.rows, spec.cols, a, b, c)
        .map_err(|e| GenError::InvalidSpec(format!("generated instance rejected: {e}")))
}

const ESCALATION_CAP: usize = 64;

/// Resolves an initialization policy to a concrete starting point.
///
/// `RandomEscalated` draws uniformly on `[0,1)^J` and multiplies by 10 until
/// the point has nonzero proximity, so runs never start already inside the
/// target set.
pub fn initial_point(
    problem: &Problem,
    policy: &InitPolicy,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, GenError> {
    match policy {
        InitPolicy::AllTens => Ok(vec![10.0; problem.col_count()]),
        InitPolicy::Explicit(point) => Ok(point.clone()),
        InitPolicy::RandomEscalated => {
            let mut point: Vec<f64> = (0..problem.col_count())
                .map(|_| rng.gen_range(0.0..1.0))
                .collect();
            let mut scalings = 0;
            while proximity(problem, &point) == 0.0 {
                if scalings >= ESCALATION_CAP {
                    return Err(GenError::EscalationFailed(ESCALATION_CAP));
                }
                for v in &mut point {
                    *v *= 10.0;
                }
                scalings += 1;
            }
            Ok(point)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_vector_is_feasible_with_exact_slack() {
        for &(rows, cols) in &[(80usize, 100usize), (20, 25), (3, 2)] {
            let p = generate(&GenSpec::new(rows, cols, 42)).unwrap();
            assert_eq!(proximity(&p, &vec![1.0; cols]), 0.0);
            for i in 0..rows {
                let row_sum: f64 = p.row(i).iter().sum();
                assert!((p.rhs()[i] - row_sum - 10.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let spec = GenSpec::new(12, 9, 123);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = GenSpec::new(12, 9, 124);
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn entries_respect_ranges() {
        let p = generate(&GenSpec::new(30, 20, 5)).unwrap();
        for i in 0..30 {
            for &v in p.row(i) {
                assert!((-1.0..2.0).contains(&v));
            }
        }
        for &v in p.cost() {
            assert!((-2.0..3.0).contains(&v));
        }
    }

    #[test]
    fn all_tens_policy() {
        let p = generate(&GenSpec::new(4, 3, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            initial_point(&p, &InitPolicy::AllTens, &mut rng).unwrap(),
            vec![10.0, 10.0, 10.0]
        );
    }

    #[test]
    fn random_escalated_leaves_target_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..20 {
            let p = generate(&GenSpec::new(10, 8, seed)).unwrap();
            let point = initial_point(&p, &InitPolicy::RandomEscalated, &mut rng).unwrap();
            assert!(proximity(&p, &point) > 0.0);
        }
    }

    #[test]
    fn explicit_policy_is_verbatim_even_when_feasible() {
        let p = generate(&GenSpec::new(5, 4, 9)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ones = vec![1.0; 4];
        let point = initial_point(&p, &InitPolicy::Explicit(ones.clone()), &mut rng).unwrap();
        assert_eq!(point, ones);
        assert_eq!(proximity(&p, &point), 0.0);
    }

    #[test]
    fn escalation_fails_when_everything_nonnegative_is_feasible() {
        // -x <= 0 holds for every x >= 0, so 10-fold scalings never leave M.
        let p = Problem::new(2, 2, vec![-1.0, 0.0, 0.0, -1.0], vec![0.0, 0.0], vec![1.0, 1.0])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = initial_point(&p, &InitPolicy::RandomEscalated, &mut rng).unwrap_err();
        assert_eq!(err, GenError::EscalationFailed(64));
    }

    // Beyond-desk-scale spot check; run with `cargo test -- --ignored`.
    #[test]
    #[ignore]
    fn ones_feasible_at_large_size() {
        let p = generate(&GenSpec::new(2000, 2500, 1)).unwrap();
        assert_eq!(proximity(&p, &vec![1.0; 2500]), 0.0);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&GenSpec::new(0, 3, 1)).is_err());
        let mut spec = GenSpec::new(2, 2, 1);
        spec.slack = 0.0;
        assert!(generate(&spec).is_err());
        spec.slack = 10.0;
        spec.a_range = (1.0, 1.0);
        assert!(generate(&spec).is_err());
    }
}
