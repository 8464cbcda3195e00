//! The cone of symmetric positive definite matrices with the affine-invariant
//! metric `⟨X, Y⟩_p = tr(X p⁻¹ Y p⁻¹)`.
//!
//! `p^{1/2}` and `p^{-1/2}` come from the eigendecomposition cached in every
//! [`SpdMatrix`], so each map costs one extra eigendecomposition:
//!
//! ```text
//! exp_p X = p^{1/2} exp(p^{-1/2} X p^{-1/2}) p^{1/2}
//! log_p q = p^{1/2} log(p^{-1/2} q p^{-1/2}) p^{1/2}
//! d(p, q) = ‖log(p^{-1/2} q p^{-1/2})‖_F
//! ```

use nalgebra::DMatrix;

use super::Manifold;
use crate::error::{Error, Result};
use crate::matfun::{log_derivative, sym_eig, SpdMatrix, SymMatrix};

/// `𝒫ⁿ₊₊` with the affine-invariant metric.
#[derive(Debug, Clone, Copy)]
pub struct Spd {
    n: usize,
}

impl Spd {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "matrix size must be positive");
        Spd { n }
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }
}

fn check_pair(p: &SpdMatrix, x: &SymMatrix) -> Result<()> {
    x.check_dim(p.dim())
}

fn nan_point(n: usize) -> SpdMatrix {
    SpdMatrix::from_trusted(SymMatrix::identity(n).scale(f64::NAN))
}

/// `tr(X p⁻¹ Y p⁻¹)`.
pub fn spd_inner(p: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    check_pair(p, x)?;
    check_pair(p, y)?;
    Ok(inner_unchecked(p, x, y))
}

fn inner_unchecked(p: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> f64 {
    let si = p.inv_sqrt();
    x.sandwich(&si).frobenius_dot(&y.sandwich(&si))
}

pub fn spd_exp(p: &SpdMatrix, x: &SymMatrix) -> Result<SpdMatrix> {
    check_pair(p, x)?;
    exp_unchecked(p, x)
}

fn exp_unchecked(p: &SpdMatrix, x: &SymMatrix) -> Result<SpdMatrix> {
    let w = x.sandwich(&p.inv_sqrt());
    let e = crate::matfun::sym_apply(&w, f64::exp)?;
    Ok(SpdMatrix::from_trusted(e.sandwich(&p.sqrt())))
}

pub fn spd_log(p: &SpdMatrix, q: &SpdMatrix) -> Result<SymMatrix> {
    q.as_sym().check_dim(p.dim())?;
    log_unchecked(p, q)
}

fn log_unchecked(p: &SpdMatrix, q: &SpdMatrix) -> Result<SymMatrix> {
    let w = q.as_sym().sandwich(&p.inv_sqrt());
    let l = crate::matfun::sym_apply(&w, f64::ln)?;
    Ok(l.sandwich(&p.sqrt()))
}

pub fn spd_dist(p: &SpdMatrix, q: &SpdMatrix) -> Result<f64> {
    q.as_sym().check_dim(p.dim())?;
    dist_unchecked(p, q)
}

fn dist_unchecked(p: &SpdMatrix, q: &SpdMatrix) -> Result<f64> {
    let w = q.as_sym().sandwich(&p.inv_sqrt());
    let e = sym_eig(&w)?;
    if e.min() <= 0.0 {
        return Err(Error::SpectrumOutsideDomain);
    }
    Ok(e.eigenvalues.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

/// `p G p`.
pub fn spd_egrad_to_rgrad(p: &SpdMatrix, egrad: &SymMatrix) -> Result<SymMatrix> {
    check_pair(p, egrad)?;
    Ok(egrad.sandwich(p.as_sym()))
}

/// `⟨Hess (φ∘det)(p) X, X⟩_p
///    = (φ″(det p)(det p)² + φ′(det p) det p) · tr(p⁻¹X) · ⟨p, X⟩_p`.
pub fn spd_hess_quadform<F1, F2>(p: &SpdMatrix, dphi: F1, d2phi: F2, x: &SymMatrix) -> Result<f64>
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    check_pair(p, x)?;
    let t = p.det();
    let coefficient = d2phi(t) * t * t + dphi(t) * t;
    let pinv = p.inv();
    let tr_pinv_x = pinv.frobenius_dot(x);
    let p_x = inner_unchecked(p, p.as_sym(), x);
    Ok(coefficient * tr_pinv_x * p_x)
}

/// Transport `X ↦ E X Eᵀ` with `E = (q p⁻¹)^{1/2}
///  = p^{1/2} (p^{-1/2} q p^{-1/2})^{1/2} p^{-1/2}`.
pub fn spd_transport(p: &SpdMatrix, q: &SpdMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    check_pair(p, x)?;
    q.as_sym().check_dim(p.dim())?;
    transport_unchecked(p, q, x)
}

fn transport_unchecked(p: &SpdMatrix, q: &SpdMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    let s = p.sqrt();
    let si = p.inv_sqrt();
    let w = q.as_sym().sandwich(&si);
    let w_half = crate::matfun::sym_apply(&w, f64::sqrt)?;
    let e: DMatrix<f64> = s.as_matrix() * w_half.as_matrix() * si.as_matrix();
    Ok(x.congruence(&e))
}

impl Manifold for Spd {
    type Point = SpdMatrix;
    type Vector = SymMatrix;

    fn name(&self) -> &'static str {
        "spd"
    }

    fn dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    fn check_point(&self, p: &Self::Point) -> Result<()> {
        p.as_sym().check_dim(self.n)?;
        if p.min_eigenvalue() > crate::matfun::SPD_RELATIVE_TOL * p.eig().max().max(1.0) {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite)
        }
    }

    fn check_vector(&self, p: &Self::Point, x: &Self::Vector) -> Result<()> {
        check_pair(p, x)?;
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteMatrix)
        }
    }

    fn inner(&self, p: &Self::Point, x: &Self::Vector, y: &Self::Vector) -> f64 {
        inner_unchecked(p, x, y)
    }

    fn exp(&self, p: &Self::Point, x: &Self::Vector) -> Self::Point {
        exp_unchecked(p, x).unwrap_or_else(|_| nan_point(self.n))
    }

    fn log(&self, p: &Self::Point, q: &Self::Point) -> Self::Vector {
        log_unchecked(p, q).unwrap_or_else(|_| SymMatrix::identity(self.n).scale(f64::NAN))
    }

    fn dist(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        dist_unchecked(p, q).unwrap_or(f64::NAN)
    }

    fn transport(&self, p: &Self::Point, q: &Self::Point, x: &Self::Vector) -> Self::Vector {
        transport_unchecked(p, q, x)
            .unwrap_or_else(|_| SymMatrix::identity(self.n).scale(f64::NAN))
    }

    fn egrad_to_rgrad(&self, p: &Self::Point, egrad: &Self::Vector) -> Self::Vector {
        egrad.sandwich(p.as_sym())
    }

    fn zero_vector(&self, _p: &Self::Point) -> Self::Vector {
        SymMatrix::zeros(self.n)
    }

    /// With `W = b^{-1/2} p b^{-1/2}` and `X̃ = b^{-1/2} X b^{-1/2}` the pairing is
    /// `tr(X̃ log W)`; its Euclidean gradient in `p` is `b^{-1/2} Dlog_W[X̃] b^{-1/2}`.
    fn log_pairing_rgrad(
        &self,
        base: &Self::Point,
        x: &Self::Vector,
        p: &Self::Point,
    ) -> Self::Vector {
        let bi = base.inv_sqrt();
        let w = p.as_sym().sandwich(&bi);
        let Ok(w_eig) = sym_eig(&w) else {
            return SymMatrix::identity(self.n).scale(f64::NAN);
        };
        let dlog = log_derivative(&w_eig, &x.sandwich(&bi));
        let egrad = dlog.sandwich(&bi);
        self.egrad_to_rgrad(p, &egrad)
    }

    fn point_scale(&self, p: &Self::Point) -> f64 {
        p.as_sym().frobenius_norm()
    }
}
