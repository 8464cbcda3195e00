//! Dense symmetric-matrix calculus.
//!
//! Everything on the SPD cone reduces to eigendecompositions of small dense
//! symmetric matrices: square roots, logarithms and exponentials are all
//! evaluated as `Q diag(f(λ)) Qᵀ`. Results of matrix functions are always
//! re-symmetrized so round-off asymmetry cannot accumulate over iterations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative floor on the smallest eigenvalue for a matrix to count as SPD.
pub const SPD_RELATIVE_TOL: f64 = 1e-12;

/// A dense real symmetric matrix. Symmetry is exact: construction replaces
/// the input by `(M + Mᵀ)/2`.
#[derive(Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{}", self.0)
    }
}

/// Returns `(M + Mᵀ)/2`.
pub fn symmetrize(m: &DMatrix<f64>) -> Result<SymMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    Ok(SymMatrix(symmetrized(m)))
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            m[(i, i)]
        } else {
            0.5 * (m[(i, j)] + m[(j, i)])
        }
    })
}

impl SymMatrix {
    /// Symmetrizes `m`; fails if it is not square.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        symmetrize(&m)
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        symmetrize(&DMatrix::from_row_slice(n, n, data))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    /// Wraps a matrix already known to be symmetric up to round-off.
    pub(crate) fn from_nearly_symmetric(m: DMatrix<f64>) -> Self {
        SymMatrix(symmetrized(&m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// `tr(A B)` for symmetric `A`, `B`, i.e. the Frobenius inner product.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix(&self.0 * a)
    }

    /// `A M Aᵀ` for an arbitrary square `A`.
    pub fn congruence(&self, a: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::from_nearly_symmetric(a * &self.0 * a.transpose())
    }

    /// `S M S` for symmetric `S`.
    pub fn sandwich(&self, s: &SymMatrix) -> SymMatrix {
        SymMatrix::from_nearly_symmetric(&s.0 * &self.0 * &s.0)
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                actual: self.dim(),
            })
        }
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix(-&self.0)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomp {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigDecomp {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `Q diag(f(λ)) Qᵀ`; fails when `f` is not finite at some eigenvalue.
    pub fn reconstruct_with<F: Fn(f64) -> f64>(&self, f: F) -> Result<SymMatrix> {
        let mapped = self.eigenvalues.map(f);
        if mapped.iter().any(|v| !v.is_finite()) {
            return Err(Error::SpectrumOutsideDomain);
        }
        Ok(self.reconstruct_values(&mapped))
    }

    pub(crate) fn reconstruct_values(&self, values: &DVector<f64>) -> SymMatrix {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= values[j];
        }
        SymMatrix::from_nearly_symmetric(scaled * q.transpose())
    }
}

/// Symmetric eigendecomposition with ascending eigenvalues.
pub fn sym_eig(a: &SymMatrix) -> Result<EigDecomp> {
    if !a.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let n = a.dim();
    let eig = SymmetricEigen::new(a.0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies a scalar function through the spectrum: `Q diag(f(λᵢ)) Qᵀ`.
pub fn sym_apply<F: Fn(f64) -> f64>(a: &SymMatrix, f: F) -> Result<SymMatrix> {
    sym_eig(a)?.reconstruct_with(f)
}

/// Upper-triangular `P` with `PᵀP = A`.
pub fn spd_chol(a: &SymMatrix) -> Result<DMatrix<f64>> {
    if !a.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let chol = nalgebra::Cholesky::new(a.0.clone()).ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.l().transpose())
}

/// A symmetric positive definite matrix together with its eigendecomposition.
#[derive(Clone)]
pub struct SpdMatrix {
    sym: SymMatrix,
    eig: EigDecomp,
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpdMatrix{}", self.sym.0)
    }
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.sym == other.sym
    }
}

impl SpdMatrix {
    /// Accepts `a` iff `λ_min > 1e-12 · max(1, λ_max)`.
    pub fn new(a: SymMatrix) -> Result<Self> {
        let eig = sym_eig(&a)?;
        if !(eig.min() > SPD_RELATIVE_TOL * eig.max().max(1.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(SpdMatrix { sym: a, eig })
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        Self::new(SymMatrix::from_matrix(m)?)
    }

    /// Builds a point from a matrix that is SPD in exact arithmetic (e.g. the
    /// output of an exponential map); only the eigendecomposition is computed.
    pub(crate) fn from_trusted(a: SymMatrix) -> Self {
        let eig = sym_eig(&a).unwrap_or_else(|_| EigDecomp {
            eigenvalues: DVector::from_element(a.dim(), f64::NAN),
            eigenvectors: DMatrix::identity(a.dim(), a.dim()),
        });
        SpdMatrix { sym: a, eig }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0).expect("identity is SPD")
    }

    pub fn scaled_identity(n: usize, c: f64) -> Result<Self> {
        Self::new(SymMatrix::identity(n).scale(c))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.sym.0
    }

    pub fn eig(&self) -> &EigDecomp {
        &self.eig
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.min()
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<SymMatrix> {
        self.eig.reconstruct_with(f)
    }

    pub fn sqrt(&self) -> SymMatrix {
        self.eig.reconstruct_values(&self.eig.eigenvalues.map(f64::sqrt))
    }

    pub fn inv_sqrt(&self) -> SymMatrix {
        self.eig
            .reconstruct_values(&self.eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
    }

    pub fn inv(&self) -> SymMatrix {
        self.eig.reconstruct_values(&self.eig.eigenvalues.map(|l| 1.0 / l))
    }

    /// `log det` as a sum of log-eigenvalues; never overflows.
    pub fn log_det(&self) -> f64 {
        self.eig.eigenvalues.iter().map(|l| l.ln()).sum()
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace()
    }
}

/// Fréchet derivative of the matrix logarithm at `W` applied to `H`, given
/// the eigendecomposition of `W`. The derivative is self-adjoint in the
/// Frobenius inner product, so this is also its adjoint.
pub fn log_derivative(w: &EigDecomp, h: &SymMatrix) -> SymMatrix {
    let q = &w.eigenvectors;
    let lam = &w.eigenvalues;
    let n = lam.len();
    let mut inner = q.transpose() * h.as_matrix() * q;
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (lam[i], lam[j]);
            let divided = if li == lj {
                1.0 / lj
            } else {
                ((li - lj) / lj).ln_1p() / (li - lj)
            };
            inner[(i, j)] *= divided;
        }
    }
    SymMatrix::from_nearly_symmetric(q * inner * q.transpose())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &SymMatrix) -> Result<f64> {
    Ok(sym_eig(a)?.min())
}
