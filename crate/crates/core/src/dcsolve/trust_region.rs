use super::gradient::{fd_hessian_apply_with, fd_step, Outcome};
use super::stopping::{Recorder, SolverTrace, StopReason, StoppingCriterion};
use crate::error::{Error, Result};
use crate::manifolds::{Manifold, Tangent};

/// Radius management and acceptance thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegionParams {
    pub initial_radius: f64,
    pub max_radius: f64,
    pub accept_ratio: f64,
    pub expand_ratio: f64,
    pub shrink_ratio: f64,
    pub shrink_factor: f64,
    pub expand_factor: f64,
}

impl Default for TrustRegionParams {
    fn default() -> Self {
        TrustRegionParams {
            initial_radius: 1.0,
            max_radius: 8.0,
            accept_ratio: 0.1,
            expand_ratio: 0.75,
            shrink_ratio: 0.25,
            shrink_factor: 0.25,
            expand_factor: 2.0,
        }
    }
}

impl TrustRegionParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.initial_radius > 0.0
            && self.max_radius >= self.initial_radius
            && (0.0..self.expand_ratio).contains(&self.accept_ratio)
            && self.expand_ratio < 1.0
            && self.shrink_factor > 0.0
            && self.shrink_factor < 1.0
            && self.expand_factor > 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid trust-region parameters {self:?}")))
        }
    }
}

struct Tcg<V> {
    eta: V,
    h_eta: V,
    hit_boundary: bool,
}

/// Steihaug–Toint truncated CG on `m(η) = ⟨g, η⟩ + ½⟨Hη, η⟩`, `‖η‖ ≤ Δ`.
fn truncated_cg<M, H>(geometry: &M, p: &M::Point, g: &M::Vector, hess: H, radius: f64) -> Tcg<M::Vector>
where
    M: Manifold + ?Sized,
    H: Fn(&M::Vector) -> M::Vector,
{
    let inner = |a: &M::Vector, b: &M::Vector| geometry.inner(p, a, b);
    let gn = inner(g, g).sqrt();
    let tol = gn.sqrt().min(0.5) * gn;
    let mut eta = geometry.zero_vector(p);
    let mut h_eta = geometry.zero_vector(p);
    let mut r = g.clone();
    let mut rr = inner(&r, &r);
    let mut d = r.scale(-1.0);

    // τ ≥ 0 with ‖η + τd‖ = Δ
    let to_boundary = |eta: &M::Vector, d: &M::Vector| {
        let ed = inner(eta, d);
        let dd = inner(d, d);
        let ee = inner(eta, eta);
        let disc = (ed * ed + dd * (radius * radius - ee)).max(0.0);
        (-ed + disc.sqrt()) / dd
    };

    for _ in 0..geometry.dim().max(1) {
        let hd = hess(&d);
        let dhd = inner(&d, &hd);
        if !(dhd > 0.0) {
            let tau = to_boundary(&eta, &d);
            return Tcg {
                eta: eta.axpy(tau, &d),
                h_eta: h_eta.axpy(tau, &hd),
                hit_boundary: true,
            };
        }
        let alpha = rr / dhd;
        let eta_next = eta.axpy(alpha, &d);
        if inner(&eta_next, &eta_next) >= radius * radius {
            let tau = to_boundary(&eta, &d);
            return Tcg {
                eta: eta.axpy(tau, &d),
                h_eta: h_eta.axpy(tau, &hd),
                hit_boundary: true,
            };
        }
        eta = eta_next;
        h_eta = h_eta.axpy(alpha, &hd);
        r = r.axpy(alpha, &hd);
        let rr_next = inner(&r, &r);
        if rr_next.sqrt() <= tol {
            break;
        }
        d = r.scale(-1.0).axpy(rr_next / rr, &d);
        rr = rr_next;
    }
    Tcg {
        eta,
        h_eta,
        hit_boundary: false,
    }
}

pub(crate) fn trust_region_core<M, F, G, O>(
    geometry: &M,
    f: F,
    rgrad: G,
    p0: M::Point,
    params: &TrustRegionParams,
    stop: &StoppingCriterion,
    mut observe: O,
) -> Result<Outcome<M::Point>>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
    G: Fn(&M::Point) -> M::Vector,
    O: FnMut(usize, f64, f64, f64),
{
    let mut p = p0;
    let mut fp = f(&p);
    if !fp.is_finite() {
        return Err(Error::NonFiniteCost { iteration: 0 });
    }
    let mut g = rgrad(&p);
    let mut gn = geometry.norm(&p, &g);
    observe(0, fp, 0.0, gn);
    if let Some(reason) = stop.check(0, Some(gn), None, None) {
        return Ok(Outcome { point: p, iterations: 0, reason });
    }
    if gn == 0.0 {
        return Ok(Outcome { point: p, iterations: 0, reason: StopReason::FixedPoint });
    }
    let mut radius = params.initial_radius;
    let mut k = 0;
    loop {
        k += 1;
        let h = fd_step(geometry, &p);
        let tcg = truncated_cg(geometry, &p, &g, |x| fd_hessian_apply_with(geometry, &rgrad, &p, &g, x, h), radius);
        let model_decrease =
            -(geometry.inner(&p, &g, &tcg.eta) + 0.5 * geometry.inner(&p, &tcg.h_eta, &tcg.eta));
        let q = geometry.exp(&p, &tcg.eta);
        let fq = f(&q);
        let reg = 1e3 * f64::EPSILON * fp.abs().max(1.0);
        let rho = if fq.is_finite() {
            (fp - fq + reg) / (model_decrease + reg)
        } else {
            f64::NEG_INFINITY
        };

        if rho < params.shrink_ratio {
            radius *= params.shrink_factor;
        } else if rho > params.expand_ratio && tcg.hit_boundary {
            radius = (radius * params.expand_factor).min(params.max_radius);
        }

        if rho >= params.accept_ratio && model_decrease > 0.0 {
            let step = geometry.norm(&p, &tcg.eta);
            let g_new = rgrad(&q);
            let gn_new = geometry.norm(&q, &g_new);
            let grad_change = stop
                .grad_change_tol
                .map(|_| geometry.norm(&q, &g_new.sub(&geometry.transport(&p, &q, &g))));
            observe(k, fq, step, gn_new);
            p = q;
            fp = fq;
            g = g_new;
            gn = gn_new;
            if let Some(reason) = stop.check(k, Some(gn), Some(step), grad_change) {
                return Ok(Outcome { point: p, iterations: k, reason });
            }
        } else {
            observe(k, fp, 0.0, gn);
            if k >= stop.max_iter {
                return Ok(Outcome { point: p, iterations: k, reason: StopReason::MaxIterations });
            }
        }
    }
}

/// Riemannian trust-region method with a finite-difference Hessian and a
/// truncated-CG model solver.
pub fn trust_region_solve<M, F, G>(
    geometry: &M,
    f: F,
    rgrad: G,
    p0: M::Point,
    params: &TrustRegionParams,
    stop: &StoppingCriterion,
) -> Result<(M::Point, SolverTrace<M::Point>)>
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
    G: Fn(&M::Point) -> M::Vector,
{
    params.validate()?;
    stop.validate()?;
    let rec = Recorder::start();
    let mut records = Vec::new();
    let out = trust_region_core(geometry, f, rgrad, p0, params, stop, |k, fv, d, gn| {
        records.push(rec.record(k, fv, d, gn))
    })?;
    Ok((
        out.point,
        SolverTrace {
            records,
            iterates: Vec::new(),
            reason: out.reason,
        },
    ))
}
