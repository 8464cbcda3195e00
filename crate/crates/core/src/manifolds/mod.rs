//! Riemannian geometries used by the solvers.
//!
//! A geometry is a stateless value implementing [`Manifold`]. Points and
//! tangent vectors are plain data; the geometry supplies the metric, the
//! exponential and logarithmic maps, transport and gradient conversion.
//! All three geometries here are Hadamard manifolds, so `exp` and `log` are
//! global inverses and geodesics are `t ↦ exp_p(t · log_p q)`.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::matfun::SymMatrix;

pub mod euclidean;
pub mod rosenbrock;
pub mod spd;

pub use euclidean::Euclidean;
pub use rosenbrock::RosenbrockPlane;
pub use spd::Spd;

/// Linear structure of a tangent space payload.
pub trait Tangent: Clone + Debug + Send + Sync {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, a: f64) -> Self;

    /// `self + a·x`
    fn axpy(&self, a: f64, x: &Self) -> Self {
        self.add(&x.scale(a))
    }
}

impl<const D: usize> Tangent for nalgebra::SVector<f64, D> {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, a: f64) -> Self {
        self * a
    }
}

impl Tangent for SymMatrix {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, a: f64) -> Self {
        SymMatrix::scale(self, a)
    }
}

pub trait Manifold: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;
    type Vector: Tangent;

    fn name(&self) -> &'static str;

    /// Intrinsic dimension.
    fn dim(&self) -> usize;

    /// Membership predicate for points.
    fn check_point(&self, p: &Self::Point) -> Result<()>;

    fn check_vector(&self, p: &Self::Point, x: &Self::Vector) -> Result<()>;

    fn inner(&self, p: &Self::Point, x: &Self::Vector, y: &Self::Vector) -> f64;

    fn norm(&self, p: &Self::Point, x: &Self::Vector) -> f64 {
        self.inner(p, x, x).max(0.0).sqrt()
    }

    fn exp(&self, p: &Self::Point, x: &Self::Vector) -> Self::Point;

    fn log(&self, p: &Self::Point, q: &Self::Point) -> Self::Vector;

    fn dist(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        self.norm(p, &self.log(p, q))
    }

    /// Parallel transport of `x` from `T_p` to `T_q` along the geodesic.
    fn transport(&self, p: &Self::Point, q: &Self::Point, x: &Self::Vector) -> Self::Vector;

    /// Converts a Euclidean (coordinate) gradient into the Riemannian one.
    fn egrad_to_rgrad(&self, p: &Self::Point, egrad: &Self::Vector) -> Self::Vector;

    fn zero_vector(&self, p: &Self::Point) -> Self::Vector;

    /// Riemannian gradient at `p` of `q ↦ ⟨x, log_base(q)⟩_base`, the linear
    /// term of the DC subproblem.
    fn log_pairing_rgrad(
        &self,
        base: &Self::Point,
        x: &Self::Vector,
        p: &Self::Point,
    ) -> Self::Vector;

    /// Scale of a point, used to size finite-difference steps.
    fn point_scale(&self, p: &Self::Point) -> f64;

    /// `exp_p(t · log_p q)` for `t ∈ [0, 1]`.
    fn geodesic_point(&self, p: &Self::Point, q: &Self::Point, t: f64) -> Result<Self::Point> {
        geodesic_point(self, p, q, t)
    }

    /// Wraps a payload with its base point after validating it.
    fn tangent(&self, base: &Self::Point, payload: Self::Vector) -> Result<TangentVector<Self>>
    where
        Self: Sized,
    {
        self.check_point(base)?;
        self.check_vector(base, &payload)?;
        Ok(TangentVector {
            base: base.clone(),
            payload,
        })
    }

    /// Inner product of two based tangent vectors; rejects mixed base points.
    fn tangent_inner(&self, x: &TangentVector<Self>, y: &TangentVector<Self>) -> Result<f64>
    where
        Self: Sized,
    {
        same_base(x, y)?;
        Ok(self.inner(&x.base, &x.payload, &y.payload))
    }

    fn tangent_add(
        &self,
        x: &TangentVector<Self>,
        y: &TangentVector<Self>,
    ) -> Result<TangentVector<Self>>
    where
        Self: Sized,
    {
        same_base(x, y)?;
        Ok(TangentVector {
            base: x.base.clone(),
            payload: x.payload.add(&y.payload),
        })
    }

    fn tangent_log(&self, p: &Self::Point, q: &Self::Point) -> TangentVector<Self>
    where
        Self: Sized,
    {
        TangentVector {
            base: p.clone(),
            payload: self.log(p, q),
        }
    }

    fn tangent_exp(&self, x: &TangentVector<Self>) -> Self::Point
    where
        Self: Sized,
    {
        self.exp(&x.base, &x.payload)
    }

    fn tangent_transport(&self, x: &TangentVector<Self>, q: &Self::Point) -> TangentVector<Self>
    where
        Self: Sized,
    {
        TangentVector {
            base: q.clone(),
            payload: self.transport(&x.base, q, &x.payload),
        }
    }
}

/// A tangent payload tagged with the point it is attached to.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<M: Manifold> {
    base: M::Point,
    payload: M::Vector,
}

impl<M: Manifold> TangentVector<M> {
    pub fn base(&self) -> &M::Point {
        &self.base
    }

    pub fn payload(&self) -> &M::Vector {
        &self.payload
    }

    pub fn into_payload(self) -> M::Vector {
        self.payload
    }
}

fn same_base<M: Manifold>(x: &TangentVector<M>, y: &TangentVector<M>) -> Result<()> {
    if x.base == y.base {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

/// `exp_p(t · log_p q)`, with the endpoints returned exactly.
pub fn geodesic_point<M: Manifold + ?Sized>(
    geometry: &M,
    p: &M::Point,
    q: &M::Point,
    t: f64,
) -> Result<M::Point> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange(format!(
            "geodesic parameter {t} not in [0, 1]"
        )));
    }
    if t == 0.0 {
        return Ok(p.clone());
    }
    if t == 1.0 {
        return Ok(q.clone());
    }
    Ok(geometry.exp(p, &geometry.log(p, q).scale(t)))
}

/// Error of `grad` against central differences of `f` along the
/// geodesic through `p` with direction `x`:
/// `|(f(exp(hX)) − f(exp(−hX)))/2h − ⟨grad, X⟩| / (‖grad‖·‖X‖)` with
/// `h = 1e-6·(1 + ‖p‖)`. The denominator is floored at 1, so the error is
/// absolute for small gradients where central differences lose relative
/// accuracy.
pub fn gradient_check_error<M, F>(geometry: &M, f: F, grad: &M::Vector, p: &M::Point, x: &M::Vector) -> f64
where
    M: Manifold + ?Sized,
    F: Fn(&M::Point) -> f64,
{
    let h = 1e-6 * (1.0 + geometry.point_scale(p));
    let fp = f(&geometry.exp(p, &x.scale(h)));
    let fm = f(&geometry.exp(p, &x.scale(-h)));
    let fd = (fp - fm) / (2.0 * h);
    let an = geometry.inner(p, grad, x);
    let scale = geometry.norm(p, grad) * geometry.norm(p, x);
    (fd - an).abs() / scale.max(1.0)
}
