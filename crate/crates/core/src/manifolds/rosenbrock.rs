//! The plane with the metric that straightens the Rosenbrock valley.
//!
//! `G_p = [[1 + 4p₁², −2p₁], [−2p₁, 1]]` is the pullback of the Euclidean
//! metric through `ψ(z) = (z₁, z₁² − z₂)`, an involution of ℝ². The space is
//! therefore flat and geodesics are images of straight lines under `ψ`.

use nalgebra::{Matrix2, Vector2};

use super::Manifold;
use crate::error::{Error, Result};

/// `ℝ²` with the metric `G_p`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RosenbrockPlane;

/// Returns `(G_p, G_p⁻¹)`.
pub fn rb_metric_tensor(p: &Vector2<f64>) -> (Matrix2<f64>, Matrix2<f64>) {
    let p1 = p[0];
    let g = Matrix2::new(1.0 + 4.0 * p1 * p1, -2.0 * p1, -2.0 * p1, 1.0);
    let g_inv = Matrix2::new(1.0, 2.0 * p1, 2.0 * p1, 1.0 + 4.0 * p1 * p1);
    (g, g_inv)
}

pub fn rb_exp(p: &Vector2<f64>, x: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(p[0] + x[0], p[1] + x[1] + x[0] * x[0])
}

pub fn rb_log(p: &Vector2<f64>, q: &Vector2<f64>) -> Vector2<f64> {
    let d1 = q[0] - p[0];
    Vector2::new(d1, q[1] - p[1] - d1 * d1)
}

/// `G_p⁻¹ ∇h(p)`.
pub fn rb_egrad_to_rgrad(p: &Vector2<f64>, egrad: &Vector2<f64>) -> Vector2<f64> {
    let p1 = p[0];
    Vector2::new(
        egrad[0] + 2.0 * p1 * egrad[1],
        2.0 * p1 * egrad[0] + (1.0 + 4.0 * p1 * p1) * egrad[1],
    )
}

/// The isometry `ψ(z) = (z₁, z₁² − z₂)` from Euclidean ℝ² onto the plane.
pub fn rb_isometry(z: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(z[0], z[0] * z[0] - z[1])
}

/// Differential of [`rb_isometry`] at `z`.
pub fn rb_isometry_differential(z: &Vector2<f64>, v: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(v[0], 2.0 * z[0] * v[0] - v[1])
}

fn inner_at(p: &Vector2<f64>, x: &Vector2<f64>, y: &Vector2<f64>) -> f64 {
    let p1 = p[0];
    (1.0 + 4.0 * p1 * p1) * x[0] * y[0] - 2.0 * p1 * (x[0] * y[1] + x[1] * y[0]) + x[1] * y[1]
}

impl Manifold for RosenbrockPlane {
    type Point = Vector2<f64>;
    type Vector = Vector2<f64>;

    fn name(&self) -> &'static str {
        "rosenbrock-plane"
    }

    fn dim(&self) -> usize {
        2
    }

    fn check_point(&self, p: &Self::Point) -> Result<()> {
        if p.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfig("non-finite coordinates".into()))
        }
    }

    fn check_vector(&self, _p: &Self::Point, x: &Self::Vector) -> Result<()> {
        self.check_point(x)
    }

    fn inner(&self, p: &Self::Point, x: &Self::Vector, y: &Self::Vector) -> f64 {
        inner_at(p, x, y)
    }

    fn exp(&self, p: &Self::Point, x: &Self::Vector) -> Self::Point {
        rb_exp(p, x)
    }

    fn log(&self, p: &Self::Point, q: &Self::Point) -> Self::Vector {
        rb_log(p, q)
    }

    fn dist(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        (rb_isometry(q) - rb_isometry(p)).norm()
    }

    /// In ψ-coordinates transport is the identity, so `T = dψ_q ∘ dψ_p`.
    fn transport(&self, p: &Self::Point, q: &Self::Point, x: &Self::Vector) -> Self::Vector {
        Vector2::new(x[0], x[1] + 2.0 * (q[0] - p[0]) * x[0])
    }

    fn egrad_to_rgrad(&self, p: &Self::Point, egrad: &Self::Vector) -> Self::Vector {
        rb_egrad_to_rgrad(p, egrad)
    }

    fn zero_vector(&self, _p: &Self::Point) -> Self::Vector {
        Vector2::zeros()
    }

    fn log_pairing_rgrad(
        &self,
        base: &Self::Point,
        x: &Self::Vector,
        p: &Self::Point,
    ) -> Self::Vector {
        // ⟨x, log_base p⟩ = yᵀ log_base(p) with y = G_base x
        let (g, _) = rb_metric_tensor(base);
        let y = g * x;
        let d1 = p[0] - base[0];
        let egrad = Vector2::new(y[0] - 2.0 * y[1] * d1, y[1]);
        rb_egrad_to_rgrad(p, &egrad)
    }

    fn point_scale(&self, p: &Self::Point) -> f64 {
        p.norm()
    }
}
