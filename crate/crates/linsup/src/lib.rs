//! Linear superiorization toolkit: a feasibility-seeking projection method
//! interlaced with summable target-reduction perturbations, a dense
//! two-phase simplex baseline, and the experiment drivers that race them.

// Negated float comparisons are used on purpose in validation so NaN fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod feasibility;
pub mod generator;
pub mod harness;
pub mod metrics;
pub mod problem;
pub mod simplex;
pub mod superiorization;
