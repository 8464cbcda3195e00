use super::gradient::{descend, ArmijoParams};
use super::problem::DcProblem;
use super::stopping::{Recorder, SolverTrace, StopReason, StoppingCriterion};
use super::trust_region::{trust_region_core, TrustRegionParams};
use crate::error::{Error, Result};
use crate::manifolds::{Manifold, Tangent};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubSolverKind {
    GradientDescent(ArmijoParams),
    TrustRegion(TrustRegionParams),
    /// Uses the problem's `constrained_subsolver`.
    ClosedForm,
}

/// How each DC subproblem is solved. Inner runs start from the current
/// outer iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubSolverSpec {
    pub kind: SubSolverKind,
    pub stop: StoppingCriterion,
}

impl SubSolverSpec {
    pub fn gradient_descent(stop: StoppingCriterion) -> Self {
        SubSolverSpec {
            kind: SubSolverKind::GradientDescent(ArmijoParams::default()),
            stop,
        }
    }

    pub fn trust_region(stop: StoppingCriterion) -> Self {
        SubSolverSpec {
            kind: SubSolverKind::TrustRegion(TrustRegionParams::default()),
            stop,
        }
    }

    pub fn closed_form() -> Self {
        SubSolverSpec {
            kind: SubSolverKind::ClosedForm,
            stop: StoppingCriterion::max_iter(1),
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            SubSolverKind::GradientDescent(a) => a.validate()?,
            SubSolverKind::TrustRegion(t) => t.validate()?,
            SubSolverKind::ClosedForm => {}
        }
        self.stop.validate()
    }
}

/// DCA: `p⁽ᵏ⁺¹⁾ ∈ argmin g(p) − ⟨X⁽ᵏ⁾, log_{p⁽ᵏ⁾} p⟩` with `X⁽ᵏ⁾ = grad h(p⁽ᵏ⁾)`.
pub fn dca_solve<M: Manifold>(
    problem: &DcProblem<M>,
    p0: M::Point,
    sub: &SubSolverSpec,
    stop: &StoppingCriterion,
) -> Result<(M::Point, SolverTrace<M::Point>)> {
    dc_iterate(problem, p0, None, sub, stop)
}

/// DCPPA: the DCA subproblem plus the proximal term `d²(p, p⁽ᵏ⁾)/(2λ)`.
pub fn dcppa_solve<M: Manifold>(
    problem: &DcProblem<M>,
    p0: M::Point,
    lambda: f64,
    sub: &SubSolverSpec,
    stop: &StoppingCriterion,
) -> Result<(M::Point, SolverTrace<M::Point>)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("lambda {lambda} must be positive")));
    }
    if sub.kind == SubSolverKind::ClosedForm {
        return Err(Error::InvalidConfig("the closed-form hook solves the DCA subproblem only".into()));
    }
    dc_iterate(problem, p0, Some(lambda), sub, stop)
}

fn dc_iterate<M: Manifold>(
    problem: &DcProblem<M>,
    p0: M::Point,
    lambda: Option<f64>,
    sub: &SubSolverSpec,
    stop: &StoppingCriterion,
) -> Result<(M::Point, SolverTrace<M::Point>)> {
    sub.validate()?;
    stop.validate()?;
    if sub.kind == SubSolverKind::ClosedForm && problem.constrained_subsolver.is_none() {
        return Err(Error::InvalidConfig("closed-form sub-solver requested but the problem has no hook".into()));
    }
    let geo = &problem.geometry;
    let rec = Recorder::start();

    let mut p = p0;
    let fp = problem.cost(&p);
    if !fp.is_finite() {
        return Err(Error::NonFiniteCost { iteration: 0 });
    }
    let mut grad = problem.rgrad(&p);
    let mut gn = geo.norm(&p, &grad);
    let mut trace = SolverTrace {
        records: vec![rec.record(0, fp, 0.0, gn)],
        iterates: vec![p.clone()],
        reason: StopReason::MaxIterations,
    };
    if let Some(reason) = stop.check(0, Some(gn), None, None) {
        trace.reason = reason;
        return Ok((p, trace));
    }

    let mut k = 0;
    loop {
        let x = (problem.h_rgrad)(&p);
        let (next, inner_iterations, inner_reason) = solve_subproblem(problem, &p, &x, lambda, sub)?;
        if next == p {
            trace.reason = StopReason::FixedPoint;
            return Ok((p, trace));
        }
        k += 1;
        let f_next = problem.cost(&next);
        if !f_next.is_finite() {
            return Err(Error::NonFiniteCost { iteration: k });
        }
        let step = geo.dist(&p, &next);
        let grad_next = problem.rgrad(&next);
        let gn_next = geo.norm(&next, &grad_next);
        let grad_change = stop
            .grad_change_tol
            .map(|_| geo.norm(&next, &grad_next.sub(&geo.transport(&p, &next, &grad))));

        let mut r = rec.record(k, f_next, step, gn_next);
        r.inner_iterations = inner_iterations;
        r.inner_reason = inner_reason;
        trace.records.push(r);
        trace.iterates.push(next.clone());

        p = next;
        grad = grad_next;
        gn = gn_next;
        if let Some(reason) = stop.check(k, Some(gn), Some(step), grad_change) {
            trace.reason = reason;
            return Ok((p, trace));
        }
    }
}

/// Solves one DC subproblem from `base`; returns the point, the inner
/// iteration count and the inner termination reason.
fn solve_subproblem<M: Manifold>(
    problem: &DcProblem<M>,
    base: &M::Point,
    x: &M::Vector,
    lambda: Option<f64>,
    sub: &SubSolverSpec,
) -> Result<(M::Point, usize, Option<StopReason>)> {
    let geo = &problem.geometry;
    if let SubSolverKind::ClosedForm = sub.kind {
        let hook = problem.constrained_subsolver.as_ref().expect("checked by caller");
        return Ok((hook(base, x), 1, None));
    }
    let cost = |p: &M::Point| {
        let mut v = (problem.g_cost)(p) - geo.inner(base, x, &geo.log(base, p));
        if let Some(l) = lambda {
            v += geo.dist(p, base).powi(2) / (2.0 * l);
        }
        v
    };
    let grad = |p: &M::Point| {
        let mut g = (problem.g_rgrad)(p).sub(&geo.log_pairing_rgrad(base, x, p));
        if let Some(l) = lambda {
            g = g.axpy(-1.0 / l, &geo.log(p, base));
        }
        g
    };
    let out = match &sub.kind {
        SubSolverKind::GradientDescent(a) => descend(geo, cost, grad, base.clone(), a, &sub.stop, |_, _, _, _, _| {}),
        SubSolverKind::TrustRegion(t) => trust_region_core(geo, cost, grad, base.clone(), t, &sub.stop, |_, _, _, _| {}),
        SubSolverKind::ClosedForm => unreachable!(),
    };
    match out {
        Ok(o) => Ok((o.point, o.iterations, Some(o.reason))),
        Err(Error::NonFiniteCost { .. }) => Err(Error::NonFiniteCost { iteration: 0 }),
        Err(e) => Err(e),
    }
}

/// Riemannian Frank-Wolfe with steps `s_k = 2/(2+k)`. `f` is only evaluated
/// for the trace; `feasible` guards the start.
#[allow(clippy::too_many_arguments)]
pub fn frank_wolfe_solve<M, F, G, O, C>(
    geometry: &M,
    f: F,
    rgrad: G,
    oracle: O,
    feasible: C,
    p0: M::Point,
    stop: &StoppingCriterion,
) -> Result<(M::Point, SolverTrace<M::Point>)>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
    G: Fn(&M::Point) -> M::Vector,
    O: Fn(&M::Point, &M::Vector) -> M::Point,
    C: Fn(&M::Point) -> bool,
{
    stop.validate()?;
    if !feasible(&p0) {
        return Err(Error::InfeasibleStart);
    }
    let rec = Recorder::start();
    let mut p = p0;
    let mut g = rgrad(&p);
    let mut trace = SolverTrace {
        records: vec![rec.record(0, f(&p), 0.0, geometry.norm(&p, &g))],
        iterates: vec![p.clone()],
        reason: StopReason::MaxIterations,
    };
    let mut k = 0;
    loop {
        let q = oracle(&p, &g);
        let s = 2.0 / (2.0 + k as f64);
        let next = geometry.geodesic_point(&p, &q, s)?;
        k += 1;
        let step = geometry.dist(&p, &next);
        let g_next = rgrad(&next);
        let gn = geometry.norm(&next, &g_next);
        let grad_change = stop
            .grad_change_tol
            .map(|_| geometry.norm(&next, &g_next.sub(&geometry.transport(&p, &next, &g))));
        let mut r = rec.record(k, f(&next), step, gn);
        r.step_size = Some(s);
        trace.records.push(r);
        trace.iterates.push(next.clone());
        p = next;
        g = g_next;
        if let Some(reason) = stop.check(k, None, Some(step), grad_change) {
            trace.reason = reason;
            return Ok((p, trace));
        }
    }
}
