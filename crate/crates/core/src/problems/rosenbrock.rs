use nalgebra::Vector2;

use crate::dcsolve::DcProblem;
use crate::error::{Error, Result};
use crate::manifolds::Manifold;

/// `f(x) = a(x₁² − x₂)² + (x₁ − b)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosenbrockProblem {
    pub a: f64,
    pub b: f64,
}

impl RosenbrockProblem {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
            Ok(RosenbrockProblem { a, b })
        } else {
            Err(Error::ParameterOutOfRange(format!("Rosenbrock a={a}, b={b} must be positive")))
        }
    }

    pub fn minimizer(&self) -> Vector2<f64> {
        Vector2::new(self.b, self.b * self.b)
    }

    pub fn cost(&self, x: &Vector2<f64>) -> f64 {
        self.a * (x[0] * x[0] - x[1]).powi(2) + (x[0] - self.b).powi(2)
    }

    pub fn egrad(&self, x: &Vector2<f64>) -> Vector2<f64> {
        let r = x[0] * x[0] - x[1];
        Vector2::new(4.0 * self.a * x[0] * r + 2.0 * (x[0] - self.b), -2.0 * self.a * r)
    }

    /// `g(x) = a(x₁² − x₂)² + 2(x₁ − b)²`.
    pub fn g(&self, x: &Vector2<f64>) -> f64 {
        self.a * (x[0] * x[0] - x[1]).powi(2) + 2.0 * (x[0] - self.b).powi(2)
    }

    pub fn g_egrad(&self, x: &Vector2<f64>) -> Vector2<f64> {
        let r = x[0] * x[0] - x[1];
        Vector2::new(4.0 * self.a * x[0] * r + 4.0 * (x[0] - self.b), -2.0 * self.a * r)
    }

    /// `h(x) = (x₁ − b)²`.
    pub fn h(&self, x: &Vector2<f64>) -> f64 {
        (x[0] - self.b).powi(2)
    }

    pub fn h_egrad(&self, x: &Vector2<f64>) -> Vector2<f64> {
        Vector2::new(2.0 * (x[0] - self.b), 0.0)
    }
}

/// The split `g − h` on any plane geometry; gradients pass through the
/// geometry's conversion from coordinate gradients.
pub fn rosenbrock_dcproblem<M>(spec: &RosenbrockProblem, geometry: M) -> DcProblem<M>
where
    M: Manifold<Point = Vector2<f64>, Vector = Vector2<f64>> + Clone + 'static,
{
    let s = *spec;
    let (m1, m2) = (geometry.clone(), geometry.clone());
    DcProblem::new(
        geometry,
        move |x| s.g(x),
        move |x| m1.egrad_to_rgrad(x, &s.g_egrad(x)),
        move |x| s.h(x),
        move |x| m2.egrad_to_rgrad(x, &s.h_egrad(x)),
    )
    .with_f_lower(0.0)
}

/// `φ(p) = a(p₁² − p₂)² + 2(p₁ − b)² − 2(q₁ − b)p₁` and its coordinate gradient.
///
/// On both the Euclidean plane and the Rosenbrock plane this differs from the
/// DCA surrogate `g(p) − ⟨grad h(q), log_q p⟩_q` by a constant.
pub fn rosenbrock_subproblem(
    spec: &RosenbrockProblem,
    q: &Vector2<f64>,
) -> (
    impl Fn(&Vector2<f64>) -> f64 + Send + Sync,
    impl Fn(&Vector2<f64>) -> Vector2<f64> + Send + Sync,
) {
    let s = *spec;
    let c = 2.0 * (q[0] - s.b);
    (
        move |p: &Vector2<f64>| s.g(p) - c * p[0],
        move |p: &Vector2<f64>| s.g_egrad(p) - Vector2::new(c, 0.0),
    )
}
