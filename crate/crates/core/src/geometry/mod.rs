//! Subspaces of F_q^k, their enumeration, and the counting formulas.

mod estimates;
mod qbin;
mod subspace;

pub use estimates::{check_estimates, exp_bounds, CountReport, EstimateCheck};
pub use qbin::{big_pow, count_affine, n_q_formula, qbin};
pub use subspace::{
    count_disjoint_linear, enumerate_affine_subspaces, n_q_oracle, projective_points, span_meets,
    AffineSubspace, AffineUniverse, ProjectivePoint, RrefSpace, SubspaceFilter, UNIVERSE_LIMIT,
};
