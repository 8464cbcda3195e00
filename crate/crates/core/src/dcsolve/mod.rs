//! DC algorithms, Frank-Wolfe and the smooth sub-solvers they rely on.
//!
//! All solvers are sequential. A run records one [`TraceRecord`] per
//! iteration, starting with the initial point at `k = 0`.

mod dca;
mod gradient;
mod problem;
mod stopping;
mod trust_region;

pub use dca::{dca_solve, dcppa_solve, frank_wolfe_solve, SubSolverKind, SubSolverSpec};
pub use gradient::{
    armijo_linesearch, fd_hessian_apply, fd_step, gradient_descent, gradient_descent_observed,
    ArmijoParams, LinesearchOutcome,
};
pub use problem::{is_critical, strongly_convexify, CostFn, DcProblem, GradFn, SubsolverFn};
pub use stopping::{SolverTrace, StopReason, StoppingCriterion, TraceRecord};
pub use trust_region::{trust_region_solve, TrustRegionParams};
