//! Grid evaluation of Fenchel conjugates `f*(p, X) = sup_q ⟨X, log_p q⟩ − f(q)`
//! on low-dimensional Euclidean instances.

use nalgebra::SVector;

use crate::dcsolve::{DcProblem, SolverTrace};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::manifolds::{Euclidean, Manifold};

/// `count` uniform samples of `[lower, upper]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    lower: f64,
    upper: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidConfig(format!("grid bounds [{lower}, {upper}]")));
        }
        if count < 2 {
            return Err(Error::InvalidConfig("grid needs at least two points".into()));
        }
        Ok(Grid1D { lower, upper, count })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / (self.count - 1) as f64
    }

    pub fn sample(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.upper
        } else {
            self.lower + i as f64 * self.spacing()
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.sample(i)).collect()
    }

    /// The grid halved in spacing; contains every sample of `self`.
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            count: 2 * self.count - 1,
            ..*self
        }
    }

    pub fn points1(&self) -> Vec<SVector<f64, 1>> {
        self.samples().into_iter().map(|x| SVector::from([x])).collect()
    }
}

/// Tensor-product samples for `D ∈ {1, 2}`.
pub fn product_grid<const D: usize>(grids: &[Grid1D; D]) -> Result<Vec<SVector<f64, D>>> {
    match D {
        1 => Ok(grids[0].samples().into_iter().map(|x| SVector::from_fn(|_, _| x)).collect()),
        2 => {
            let (a, b) = (grids[0].samples(), grids[1].samples());
            let mut out = Vec::with_capacity(a.len() * b.len());
            for &x in &a {
                for &y in &b {
                    out.push(SVector::from_fn(|i, _| if i == 0 { x } else { y }));
                }
            }
            Ok(out)
        }
        d => Err(Error::GridIntractable(d)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateEvaluation<M: Manifold> {
    pub base: M::Point,
    pub covector: M::Vector,
    pub value: f64,
    pub maximizer: M::Point,
}

/// Sampled `sup_q ⟨X, log_p q⟩_p − f(q)`.
pub fn conjugate_grid<M, F>(
    f: F,
    geometry: &M,
    samples: &[M::Point],
    p: &M::Point,
    x: &M::Vector,
    exec: Execution,
) -> Result<ConjugateEvaluation<M>>
where
    M: Manifold,
    F: Fn(&M::Point) -> f64 + Sync + Send,
{
    let (i, value) = exec
        .argmax(samples, |q| geometry.inner(p, x, &geometry.log(p, q)) - f(q))
        .ok_or(Error::EmptyGrid)?;
    Ok(ConjugateEvaluation {
        base: p.clone(),
        covector: x.clone(),
        value,
        maximizer: samples[i].clone(),
    })
}

/// `f(q) + f*(p, X) − ⟨X, log_p q⟩_p`.
pub fn fenchel_young_gap<M, F>(f: F, geometry: &M, conj: &ConjugateEvaluation<M>, q: &M::Point) -> f64
where
    M: Manifold,
    F: Fn(&M::Point) -> f64,
{
    f(q) + conj.value - geometry.inner(&conj.base, &conj.covector, &geometry.log(&conj.base, q))
}

/// `min over samples of g − h`.
pub fn primal_grid_value<M: Manifold>(problem: &DcProblem<M>, samples: &[M::Point], exec: Execution) -> Result<f64> {
    let (_, v) = exec
        .argmax(samples, |q| -problem.cost(q))
        .ok_or(Error::EmptyGrid)?;
    Ok(-v)
}

/// `min over X of h*(0, X) − g*(0, X)` with conjugates sampled on
/// `primal_samples`. Outer sweep runs with `exec`; inner sups sequentially.
pub fn dual_grid_value<const D: usize>(
    problem: &DcProblem<Euclidean<D>>,
    primal_samples: &[SVector<f64, D>],
    dual_samples: &[SVector<f64, D>],
    exec: Execution,
) -> Result<f64> {
    if primal_samples.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let geo = Euclidean::<D>;
    let origin = SVector::<f64, D>::zeros();
    let (_, v) = exec
        .argmax(dual_samples, |x| {
            let h = conjugate_grid(&*problem.h_cost, &geo, primal_samples, &origin, x, Execution::Sequential);
            let g = conjugate_grid(&*problem.g_cost, &geo, primal_samples, &origin, x, Execution::Sequential);
            match (h, g) {
                (Ok(h), Ok(g)) => g.value - h.value,
                _ => f64::NAN,
            }
        })
        .ok_or(Error::EmptyGrid)?;
    Ok(-v)
}

/// Per-iteration primal-dual sandwich along a DCA trace:
/// `f(p⁽ᵏ⁺¹⁾) ≤ h*(p⁽ᵏ⁾, X⁽ᵏ⁾) − g*(p⁽ᵏ⁾, X⁽ᵏ⁾) ≤ f(p⁽ᵏ⁾)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichRow {
    pub k: usize,
    pub primal_next: f64,
    pub dual: f64,
    pub primal: f64,
    /// `primal_next − dual`; nonpositive up to grid error.
    pub lower_residual: f64,
    /// `dual − primal`; nonpositive up to grid error.
    pub upper_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub tolerance: f64,
    /// `|f(p_final) − dual_final|`, the gap between the two limits.
    pub final_gap: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.lower_residual <= self.tolerance && r.upper_residual <= self.tolerance)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.lower_residual.max(r.upper_residual))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates the sandwich for every consecutive pair of stored iterates.
/// The dual value at `k` uses grid conjugates of `g` and `h` at
/// `(p⁽ᵏ⁾, grad h(p⁽ᵏ⁾))`.
pub fn primal_dual_sandwich_check<const D: usize>(
    trace: &SolverTrace<SVector<f64, D>>,
    problem: &DcProblem<Euclidean<D>>,
    grids: &[Grid1D; D],
    tolerance: f64,
    exec: Execution,
) -> Result<SandwichReport> {
    let samples = product_grid(grids)?;
    sandwich_on_samples(trace, problem, &samples, tolerance, exec, |c| c)
}

/// As [`primal_dual_sandwich_check`] with a hook applied to the dual value;
/// used for negative controls.
pub fn sandwich_on_samples<const D: usize, T>(
    trace: &SolverTrace<SVector<f64, D>>,
    problem: &DcProblem<Euclidean<D>>,
    samples: &[SVector<f64, D>],
    tolerance: f64,
    exec: Execution,
    tamper: T,
) -> Result<SandwichReport>
where
    T: Fn(f64) -> f64,
{
    if D > 2 {
        return Err(Error::GridIntractable(D));
    }
    if trace.iterates.is_empty() {
        return Err(Error::InvalidConfig("trace carries no iterates".into()));
    }
    let geo = Euclidean::<D>;
    let dual_at = |p: &SVector<f64, D>| -> Result<f64> {
        let x = (problem.h_rgrad)(p);
        let h = conjugate_grid(&*problem.h_cost, &geo, samples, p, &x, exec)?;
        let g = conjugate_grid(&*problem.g_cost, &geo, samples, p, &x, exec)?;
        Ok(tamper(h.value - g.value))
    };
    let mut rows = Vec::with_capacity(trace.iterates.len());
    for (k, w) in trace.iterates.windows(2).enumerate() {
        let dual = dual_at(&w[0])?;
        let primal = problem.cost(&w[0]);
        let primal_next = problem.cost(&w[1]);
        rows.push(SandwichRow {
            k,
            primal_next,
            dual,
            primal,
            lower_residual: primal_next - dual,
            upper_residual: dual - primal,
        });
    }
    let last = trace.iterates.last().expect("non-empty");
    let final_gap = (problem.cost(last) - dual_at(last)?).abs();
    Ok(SandwichReport {
        rows,
        tolerance,
        final_gap,
    })
}
