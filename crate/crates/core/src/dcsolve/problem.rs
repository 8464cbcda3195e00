use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifolds::{Manifold, Tangent};

pub type CostFn<M> = Arc<dyn Fn(&<M as Manifold>::Point) -> f64 + Send + Sync>;
pub type GradFn<M> =
    Arc<dyn Fn(&<M as Manifold>::Point) -> <M as Manifold>::Vector + Send + Sync>;
/// `(p⁽ᵏ⁾, X⁽ᵏ⁾) ↦ p⁽ᵏ⁺¹⁾`, a closed-form solution of the DCA subproblem.
pub type SubsolverFn<M> = Arc<
    dyn Fn(&<M as Manifold>::Point, &<M as Manifold>::Vector) -> <M as Manifold>::Point
        + Send
        + Sync,
>;

/// `min f(p) = g(p) − h(p)` with `g`, `h` geodesically convex.
pub struct DcProblem<M: Manifold> {
    pub geometry: M,
    pub g_cost: CostFn<M>,
    pub g_rgrad: GradFn<M>,
    pub h_cost: CostFn<M>,
    pub h_rgrad: GradFn<M>,
    /// Strong-convexity modulus shared by `g` and `h`.
    pub sigma: Option<f64>,
    pub f_lower: Option<f64>,
    /// Used when `g` is an indicator function and the subproblem has a
    /// closed-form solution.
    pub constrained_subsolver: Option<SubsolverFn<M>>,
}

impl<M: Manifold + Clone> Clone for DcProblem<M> {
    fn clone(&self) -> Self {
        DcProblem {
            geometry: self.geometry.clone(),
            g_cost: self.g_cost.clone(),
            g_rgrad: self.g_rgrad.clone(),
            h_cost: self.h_cost.clone(),
            h_rgrad: self.h_rgrad.clone(),
            sigma: self.sigma,
            f_lower: self.f_lower,
            constrained_subsolver: self.constrained_subsolver.clone(),
        }
    }
}

impl<M: Manifold + fmt::Debug> fmt::Debug for DcProblem<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DcProblem")
            .field("geometry", &self.geometry)
            .field("sigma", &self.sigma)
            .field("f_lower", &self.f_lower)
            .field("constrained", &self.constrained_subsolver.is_some())
            .finish_non_exhaustive()
    }
}

impl<M: Manifold> DcProblem<M> {
    pub fn new<G, GG, H, HG>(geometry: M, g: G, g_rgrad: GG, h: H, h_rgrad: HG) -> Self
    where
        G: Fn(&M::Point) -> f64 + Send + Sync + 'static,
        GG: Fn(&M::Point) -> M::Vector + Send + Sync + 'static,
        H: Fn(&M::Point) -> f64 + Send + Sync + 'static,
        HG: Fn(&M::Point) -> M::Vector + Send + Sync + 'static,
    {
        DcProblem {
            geometry,
            g_cost: Arc::new(g),
            g_rgrad: Arc::new(g_rgrad),
            h_cost: Arc::new(h),
            h_rgrad: Arc::new(h_rgrad),
            sigma: None,
            f_lower: None,
            constrained_subsolver: None,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_f_lower(mut self, f_lower: f64) -> Self {
        self.f_lower = Some(f_lower);
        self
    }

    pub fn with_constrained_subsolver<S>(mut self, s: S) -> Self
    where
        S: Fn(&M::Point, &M::Vector) -> M::Point + Send + Sync + 'static,
    {
        self.constrained_subsolver = Some(Arc::new(s));
        self
    }

    pub fn cost(&self, p: &M::Point) -> f64 {
        (self.g_cost)(p) - (self.h_cost)(p)
    }

    /// `grad g(p) − grad h(p)`.
    pub fn rgrad(&self, p: &M::Point) -> M::Vector {
        (self.g_rgrad)(p).sub(&(self.h_rgrad)(p))
    }
}

/// Adds `(σ/2) d²(q, ·)` to both components. `f` is unchanged; the
/// constrained hook is dropped because it solves the unmodified subproblem.
pub fn strongly_convexify<M>(problem: &DcProblem<M>, sigma: f64, anchor: M::Point) -> Result<DcProblem<M>>
where
    M: Manifold + Clone + 'static,
{
    if !(sigma > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("sigma {sigma} must be positive")));
    }
    let geo = problem.geometry.clone();
    let anchor = Arc::new(anchor);
    let quad = {
        let geo = geo.clone();
        let anchor = anchor.clone();
        move |p: &M::Point| 0.5 * sigma * geo.dist(&anchor, p).powi(2)
    };
    // grad (σ/2) d²(q, ·)(p) = −σ log_p q
    let quad_grad = {
        let geo = geo.clone();
        let anchor = anchor.clone();
        move |p: &M::Point| geo.log(p, &anchor).scale(-sigma)
    };
    let quad = Arc::new(quad);
    let quad_grad = Arc::new(quad_grad);

    let (g, gg, h, hg) = (
        problem.g_cost.clone(),
        problem.g_rgrad.clone(),
        problem.h_cost.clone(),
        problem.h_rgrad.clone(),
    );
    let (q1, q2, qg1, qg2) = (quad.clone(), quad, quad_grad.clone(), quad_grad);
    Ok(DcProblem {
        geometry: geo,
        g_cost: Arc::new(move |p| g(p) + q1(p)),
        g_rgrad: Arc::new(move |p| gg(p).add(&qg1(p))),
        h_cost: Arc::new(move |p| h(p) + q2(p)),
        h_rgrad: Arc::new(move |p| hg(p).add(&qg2(p))),
        sigma: Some(problem.sigma.unwrap_or(0.0) + sigma),
        f_lower: problem.f_lower,
        constrained_subsolver: None,
    })
}

/// `‖grad g(p) − grad h(p)‖_p` and whether it is at most `tol`.
pub fn is_critical<M: Manifold>(problem: &DcProblem<M>, p: &M::Point, tol: f64) -> (bool, f64) {
    let r = problem.geometry.norm(p, &problem.rgrad(p));
    (r <= tol, r)
}
