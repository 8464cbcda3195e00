use super::stopping::{Recorder, SolverTrace, StopReason, StoppingCriterion, TraceRecord};
use crate::error::{Error, Result};
use crate::manifolds::{Manifold, Tangent};

/// Backtracking parameters: trial steps `t₀ βᵐ`, `m ≤ max_backtracks`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoParams {
    pub t0: f64,
    pub beta: f64,
    pub c: f64,
    pub max_backtracks: usize,
}

impl Default for ArmijoParams {
    fn default() -> Self {
        ArmijoParams {
            t0: 1.0,
            beta: 0.5,
            c: 1e-4,
            max_backtracks: 60,
        }
    }
}

impl ArmijoParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t0 > 0.0
            && self.beta > 0.0
            && self.beta < 1.0
            && self.c > 0.0
            && self.c < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid Armijo parameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinesearchOutcome<P> {
    pub t: f64,
    pub point: P,
    pub value: f64,
    pub backtracks: usize,
}

/// Largest `t = t₀βᵐ` with `f(exp_p(t·d)) ≤ f(p) + c·t·⟨grad f(p), d⟩_p`.
pub fn armijo_linesearch<M, F>(
    geometry: &M,
    f: F,
    p: &M::Point,
    f_p: f64,
    grad: &M::Vector,
    direction: &M::Vector,
    params: &ArmijoParams,
) -> Result<LinesearchOutcome<M::Point>>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
{
    let slope = geometry.inner(p, grad, direction);
    if !(slope < 0.0) {
        return Err(Error::NotDescentDirection { slope });
    }
    let mut t = params.t0;
    for m in 0..=params.max_backtracks {
        let q = geometry.exp(p, &direction.scale(t));
        let v = f(&q);
        if v <= f_p + params.c * t * slope {
            return Ok(LinesearchOutcome {
                t,
                point: q,
                value: v,
                backtracks: m,
            });
        }
        t *= params.beta;
    }
    Err(Error::LinesearchStalled {
        backtracks: params.max_backtracks,
    })
}

pub(crate) struct Outcome<P> {
    pub point: P,
    pub iterations: usize,
    pub reason: StopReason,
}

/// Armijo gradient descent loop. `observe` sees every record including the
/// initial one; it is the only place records leave the loop.
pub(crate) fn descend<M, F, G, O>(
    geometry: &M,
    f: F,
    rgrad: G,
    p0: M::Point,
    params: &ArmijoParams,
    stop: &StoppingCriterion,
    mut observe: O,
) -> Result<Outcome<M::Point>>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
    G: Fn(&M::Point) -> M::Vector,
    O: FnMut(usize, f64, f64, f64, Option<f64>),
{
    let mut p = p0;
    let mut fp = f(&p);
    if !fp.is_finite() {
        return Err(Error::NonFiniteCost { iteration: 0 });
    }
    let mut g = rgrad(&p);
    let mut gn = geometry.norm(&p, &g);
    observe(0, fp, 0.0, gn, None);
    if let Some(reason) = stop.check(0, Some(gn), None, None).filter(|r| *r != StopReason::MaxIterations) {
        return Ok(Outcome { point: p, iterations: 0, reason });
    }
    let mut k = 0;
    loop {
        if gn == 0.0 {
            return Ok(Outcome { point: p, iterations: k, reason: StopReason::FixedPoint });
        }
        let d = g.scale(-1.0);
        let ls = match armijo_linesearch(geometry, &f, &p, fp, &g, &d, params) {
            Ok(ls) => ls,
            Err(Error::LinesearchStalled { .. } | Error::NotDescentDirection { .. }) => {
                return Ok(Outcome { point: p, iterations: k, reason: StopReason::LinesearchStalled });
            }
            Err(e) => return Err(e),
        };
        k += 1;
        let step = ls.t * gn;
        let g_new = rgrad(&ls.point);
        let gn_new = geometry.norm(&ls.point, &g_new);
        let grad_change = stop
            .grad_change_tol
            .map(|_| geometry.norm(&ls.point, &g_new.sub(&geometry.transport(&p, &ls.point, &g))));
        observe(k, ls.value, step, gn_new, Some(ls.t));
        p = ls.point;
        fp = ls.value;
        g = g_new;
        gn = gn_new;
        if let Some(reason) = stop.check(k, Some(gn), Some(step), grad_change) {
            return Ok(Outcome { point: p, iterations: k, reason });
        }
    }
}

/// Riemannian gradient descent with Armijo steps, recording every iteration.
pub fn gradient_descent<M, F, G>(
    geometry: &M,
    f: F,
    rgrad: G,
    p0: M::Point,
    params: &ArmijoParams,
    stop: &StoppingCriterion,
) -> Result<(M::Point, SolverTrace<M::Point>)>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
    G: Fn(&M::Point) -> M::Vector,
{
    let mut records = Vec::new();
    let (point, reason) = gradient_descent_observed(geometry, f, rgrad, p0, params, stop, |r| records.push(*r))?;
    Ok((
        point,
        SolverTrace {
            records,
            iterates: Vec::new(),
            reason,
        },
    ))
}

/// As [`gradient_descent`], streaming records to `observer` instead of
/// storing them; suited to runs of millions of iterations.
pub fn gradient_descent_observed<M, F, G, O>(
    geometry: &M,
    f: F,
    rgrad: G,
    p0: M::Point,
    params: &ArmijoParams,
    stop: &StoppingCriterion,
    mut observer: O,
) -> Result<(M::Point, StopReason)>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
    G: Fn(&M::Point) -> M::Vector,
    O: FnMut(&TraceRecord),
{
    params.validate()?;
    stop.validate()?;
    let rec = Recorder::start();
    let out = descend(geometry, f, rgrad, p0, params, stop, |k, fv, d, gn, t| {
        let mut r = rec.record(k, fv, d, gn);
        r.step_size = t;
        observer(&r);
    })?;
    Ok((out.point, out.reason))
}

/// `(T_{q→p} grad f(q) − grad f(p)) / h · ‖X‖` with `q = exp_p(h X/‖X‖)`.
pub fn fd_hessian_apply<M, G>(geometry: &M, rgrad: G, p: &M::Point, x: &M::Vector, h: f64) -> M::Vector
where
    M: Manifold + ?Sized,
    G: Fn(&M::Point) -> M::Vector,
{
    let g_p = rgrad(p);
    fd_hessian_apply_with(geometry, &rgrad, p, &g_p, x, h)
}

pub(crate) fn fd_hessian_apply_with<M, G>(
    geometry: &M,
    rgrad: &G,
    p: &M::Point,
    g_p: &M::Vector,
    x: &M::Vector,
    h: f64,
) -> M::Vector
where
    M: Manifold + ?Sized,
    G: Fn(&M::Point) -> M::Vector,
{
    let nx = geometry.norm(p, x);
    if nx == 0.0 {
        return geometry.zero_vector(p);
    }
    let q = geometry.exp(p, &x.scale(h / nx));
    let back = geometry.transport(&q, p, &rgrad(&q));
    back.sub(g_p).scale(nx / h)
}

/// Default finite-difference step `1e-8·(1 + ‖p‖)`.
pub fn fd_step<M: Manifold + ?Sized>(geometry: &M, p: &M::Point) -> f64 {
    1e-8 * (1.0 + geometry.point_scale(p))
}
