use nalgebra::SVector;

use super::Manifold;
use crate::error::{Error, Result};

/// Flat space `ℝᴰ` with the standard inner product.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean<const D: usize>;

impl<const D: usize> Manifold for Euclidean<D> {
    type Point = SVector<f64, D>;
    type Vector = SVector<f64, D>;

    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn dim(&self) -> usize {
        D
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

    fn inner(&self, _p: &Self::Point, x: &Self::Vector, y: &Self::Vector) -> f64 {
        x.dot(y)
    }

    fn exp(&self, p: &Self::Point, x: &Self::Vector) -> Self::Point {
        p + x
    }

    fn log(&self, p: &Self::Point, q: &Self::Point) -> Self::Vector {
        q - p
    }

    fn dist(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        (q - p).norm()
    }

    fn transport(&self, _p: &Self::Point, _q: &Self::Point, x: &Self::Vector) -> Self::Vector {
        *x
    }

    fn egrad_to_rgrad(&self, _p: &Self::Point, egrad: &Self::Vector) -> Self::Vector {
        *egrad
    }

    fn zero_vector(&self, _p: &Self::Point) -> Self::Vector {
        SVector::zeros()
    }

    fn log_pairing_rgrad(
        &self,
        _base: &Self::Point,
        x: &Self::Vector,
        _p: &Self::Point,
    ) -> Self::Vector {
        *x
    }

    fn point_scale(&self, p: &Self::Point) -> f64 {
        p.norm()
    }
}
