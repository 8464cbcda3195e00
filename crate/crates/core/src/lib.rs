//! Difference-of-convex optimization on Hadamard manifolds.
//!
//! The crate is organised bottom-up: [`matfun`] provides symmetric matrix
//! calculus, [`manifolds`] the geometries, [`dcsolve`] the solvers,
//! [`duality`] grid-based conjugate checks and [`problems`] the concrete
//! problem families.

// `!(x > 0.0)` style guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dcsolve;
pub mod duality;
pub mod error;
pub mod exec;
pub mod manifolds;
pub mod matfun;
pub mod problems;

pub use error::{Error, Result};
pub use exec::Execution;
