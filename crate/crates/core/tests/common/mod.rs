#![allow(dead_code)]

use nalgebra::{DMatrix, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riemann_dc::matfun::{SpdMatrix, SymMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Well-conditioned SPD matrix: eigenvalues in [0.2, ~n+0.2].
pub fn spd(rng: &mut ChaCha8Rng, n: usize) -> SpdMatrix {
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    SpdMatrix::from_matrix(&b * b.transpose() + DMatrix::identity(n, n) * 0.2).unwrap()
}

pub fn sym(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymMatrix {
    SymMatrix::from_matrix(DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale))).unwrap()
}

pub fn vec2(rng: &mut ChaCha8Rng, scale: f64) -> Vector2<f64> {
    Vector2::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn invertible(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        if a.clone().determinant().abs() > 0.1 {
            return a;
        }
    }
}
