use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};

/// Disjunction of termination clauses.
///
/// Tolerance clauses are strict (`value < tol`) and are checked after every
/// iteration in the order gradient norm, iterate change, gradient change;
/// `max_iter` is checked last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingCriterion {
    pub max_iter: usize,
    pub grad_norm_tol: Option<f64>,
    pub iterate_change_tol: Option<f64>,
    pub grad_change_tol: Option<f64>,
}

impl StoppingCriterion {
    pub fn max_iter(max_iter: usize) -> Self {
        StoppingCriterion {
            max_iter,
            grad_norm_tol: None,
            iterate_change_tol: None,
            grad_change_tol: None,
        }
    }

    pub fn with_grad_norm(mut self, tol: f64) -> Self {
        self.grad_norm_tol = Some(tol);
        self
    }

    pub fn with_iterate_change(mut self, tol: f64) -> Self {
        self.iterate_change_tol = Some(tol);
        self
    }

    pub fn with_grad_change(mut self, tol: f64) -> Self {
        self.grad_change_tol = Some(tol);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        for tol in [self.grad_norm_tol, self.iterate_change_tol, self.grad_change_tol]
            .into_iter()
            .flatten()
        {
            if !(tol > 0.0) {
                return Err(Error::InvalidConfig(format!("tolerance {tol} must be positive")));
            }
        }
        Ok(())
    }

    /// First satisfied clause after iteration `k`. Missing measurements skip
    /// their clause.
    pub fn check(
        &self,
        k: usize,
        grad_norm: Option<f64>,
        iterate_change: Option<f64>,
        grad_change: Option<f64>,
    ) -> Option<StopReason> {
        let below = |v: Option<f64>, tol: Option<f64>| matches!((v, tol), (Some(v), Some(t)) if v < t);
        if below(grad_norm, self.grad_norm_tol) {
            Some(StopReason::GradientNorm)
        } else if below(iterate_change, self.iterate_change_tol) {
            Some(StopReason::IterateChange)
        } else if below(grad_change, self.grad_change_tol) {
            Some(StopReason::GradientChange)
        } else if k >= self.max_iter {
            Some(StopReason::MaxIterations)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    MaxIterations,
    GradientNorm,
    IterateChange,
    GradientChange,
    /// The update map returned the current iterate exactly.
    FixedPoint,
    LinesearchStalled,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max-iterations",
            StopReason::GradientNorm => "gradient-norm",
            StopReason::IterateChange => "iterate-change",
            StopReason::GradientChange => "gradient-change",
            StopReason::FixedPoint => "fixed-point",
            StopReason::LinesearchStalled => "linesearch stalled",
        }
    }

    /// Whether the run ended on a tolerance rather than a budget or failure.
    pub fn converged(self) -> bool {
        matches!(
            self,
            StopReason::GradientNorm
                | StopReason::IterateChange
                | StopReason::GradientChange
                | StopReason::FixedPoint
        )
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a solver trace. Record `k = 0` describes the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub f_value: f64,
    /// `d(p⁽ᵏ⁻¹⁾, p⁽ᵏ⁾)`, zero for the first record.
    pub step_distance: f64,
    pub grad_norm: f64,
    pub elapsed: f64,
    /// Step length used to reach this iterate, when the method has one.
    pub step_size: Option<f64>,
    /// Work done by an inner solver to produce this iterate.
    pub inner_iterations: usize,
    pub inner_reason: Option<StopReason>,
}

#[derive(Debug, Clone)]
pub struct SolverTrace<P> {
    pub records: Vec<TraceRecord>,
    /// Iterates `p⁽⁰⁾, p⁽¹⁾, …` for solvers that keep them (DC methods).
    pub iterates: Vec<P>,
    pub reason: StopReason,
}

impl<P> SolverTrace<P> {
    /// Number of iterations performed, i.e. the index of the last record.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace always holds the initial record")
    }

    pub fn f_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.f_value)
    }

    /// Inner solves that ended without reaching a tolerance.
    pub fn inner_failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.inner_reason.is_some_and(|s| !s.converged()))
            .count()
    }
}

/// Builds [`TraceRecord`]s with wall-clock stamps relative to construction.
pub(crate) struct Recorder {
    start: Instant,
}

impl Recorder {
    pub(crate) fn start() -> Self {
        Recorder { start: Instant::now() }
    }

    pub(crate) fn record(&self, k: usize, f_value: f64, step_distance: f64, grad_norm: f64) -> TraceRecord {
        TraceRecord {
            k,
            f_value,
            step_distance,
            grad_norm,
            elapsed: self.start.elapsed().as_secs_f64(),
            step_size: None,
            inner_iterations: 0,
            inner_reason: None,
        }
    }
}
