use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dcsolve::DcProblem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::manifolds::{Manifold, Spd};
use crate::matfun::{min_eigenvalue, spd_chol, sym_apply, sym_eig, SpdMatrix, SymMatrix};

/// Weighted data on `𝒫ⁿ₊₊` and a Loewner box `L ⪯ p ⪯ U`.
#[derive(Debug, Clone)]
pub struct FrechetBoxProblem {
    data: Vec<SpdMatrix>,
    weights: Vec<f64>,
    lower: SpdMatrix,
    upper: SpdMatrix,
    exec: Execution,
}

impl FrechetBoxProblem {
    pub fn new(data: Vec<SpdMatrix>, weights: Vec<f64>, lower: SpdMatrix, upper: SpdMatrix) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidConfig("no data points".into()));
        }
        if data.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: data.len(),
                actual: weights.len(),
            });
        }
        let n = lower.dim();
        for q in data.iter().chain([&upper]) {
            q.as_sym().check_dim(n)?;
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig("weights must be nonnegative and sum to 1".into()));
        }
        SpdMatrix::new(upper.as_sym() - lower.as_sym()).map_err(|_| Error::DegenerateBox)?;
        Ok(FrechetBoxProblem {
            data,
            weights,
            lower,
            upper,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn data(&self) -> &[SpdMatrix] {
        &self.data
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lower(&self) -> &SpdMatrix {
        &self.lower
    }

    pub fn upper(&self) -> &SpdMatrix {
        &self.upper
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// Weighted sum of per-point terms; terms are computed with the configured
    /// execution mode and summed in data order.
    fn weighted_sum<F>(&self, term: F) -> SymMatrix
    where
        F: Fn(&SpdMatrix) -> SymMatrix + Sync + Send,
    {
        let idx: Vec<usize> = (0..self.data.len()).collect();
        let terms = self.exec.map(&idx, |&j| term(&self.data[j]).scale(self.weights[j]));
        let mut acc = SymMatrix::zeros(self.dim());
        for t in &terms {
            acc = &acc + t;
        }
        acc
    }

    /// `h(p) = Σ μⱼ d²(p, qⱼ)`.
    pub fn variance(&self, p: &SpdMatrix) -> f64 {
        let geo = Spd::new(self.dim());
        let terms = self.exec.map(&self.data, |q| geo.dist(p, q).powi(2));
        self.weights.iter().zip(&terms).map(|(w, d)| w * d).sum()
    }

    /// `−2 Σ μⱼ p^{1/2} log(p^{-1/2} qⱼ p^{-1/2}) p^{1/2}`.
    pub fn grad(&self, p: &SpdMatrix) -> SymMatrix {
        let geo = Spd::new(self.dim());
        self.weighted_sum(|q| geo.log(p, q)).scale(-2.0)
    }

    /// `2 Σ μⱼ p^{1/2} log(p^{1/2} qⱼ⁻¹ p^{1/2}) p^{1/2}`.
    pub fn grad_alt(&self, p: &SpdMatrix) -> SymMatrix {
        let s = p.sqrt();
        let inner = self.weighted_sum(|q| {
            let w = q.inv().sandwich(&s);
            sym_apply(&w, f64::ln).unwrap_or_else(|_| SymMatrix::identity(w.dim()).scale(f64::NAN))
        });
        inner.sandwich(&s).scale(2.0)
    }

    /// Minimum eigenvalue of `p − L` and `U − p`; nonnegative iff `p ∈ C`.
    pub fn feasibility_slack(&self, p: &SpdMatrix) -> f64 {
        box_slack(p, &self.lower, &self.upper)
    }

    pub fn is_feasible(&self, p: &SpdMatrix) -> bool {
        self.feasibility_slack(p) >= 0.0
    }
}

fn box_slack(p: &SpdMatrix, lower: &SpdMatrix, upper: &SpdMatrix) -> f64 {
    let a = min_eigenvalue(&(p.as_sym() - lower.as_sym())).unwrap_or(f64::NEG_INFINITY);
    let b = min_eigenvalue(&(upper.as_sym() - p.as_sym())).unwrap_or(f64::NEG_INFINITY);
    a.min(b)
}

/// `s = −p^{-1/2} grad h(p) p^{-1/2} = 2 Σ μⱼ log(p^{-1/2} qⱼ p^{-1/2})`.
pub fn frechet_subproblem_matrix(prob: &FrechetBoxProblem, p: &SpdMatrix) -> SymMatrix {
    let si = p.inv_sqrt();
    prob.weighted_sum(|q| {
        let w = q.as_sym().sandwich(&si);
        sym_apply(&w, f64::ln).unwrap_or_else(|_| SymMatrix::identity(w.dim()).scale(f64::NAN))
    })
    .scale(2.0)
}

/// `−2 Σ μⱼ log(p^{1/2} qⱼ⁻¹ p^{1/2})`, the same matrix via inverse data.
pub fn frechet_subproblem_matrix_alt(prob: &FrechetBoxProblem, p: &SpdMatrix) -> SymMatrix {
    let s = p.sqrt();
    prob.weighted_sum(|q| {
        let w = q.inv().sandwich(&s);
        sym_apply(&w, f64::ln).unwrap_or_else(|_| SymMatrix::identity(w.dim()).scale(f64::NAN))
    })
    .scale(-2.0)
}

/// Closed-form candidate for `min_{L ⪯ Z ⪯ U} tr(S log(XZX))`:
///
/// ```text
/// Z = X⁻¹ Q (Pᵀ [−sgn D]₊ P + L̂) Qᵀ X⁻¹
/// ```
///
/// with `S = QDQᵀ`, `L̂ = QᵀXLXQ`, `Û = QᵀXUXQ` and `PᵀP = Û − L̂` (Cholesky).
/// Zero eigenvalues of `S` anchor to `L̂`.
pub fn box_linear_subproblem(s: &SymMatrix, x: &SpdMatrix, lower: &SpdMatrix, upper: &SpdMatrix) -> Result<SpdMatrix> {
    let n = x.dim();
    s.check_dim(n)?;
    lower.as_sym().check_dim(n)?;
    upper.as_sym().check_dim(n)?;
    SpdMatrix::new(upper.as_sym() - lower.as_sym()).map_err(|_| Error::DegenerateBox)?;

    let e = sym_eig(s)?;
    let q = &e.eigenvectors;
    let xm = x.as_sym();
    let to_hat = |m: &SpdMatrix| m.as_sym().sandwich(xm).congruence(&q.transpose());
    let l_hat = to_hat(lower);
    let u_hat = to_hat(upper);
    let p = spd_chol(&(&u_hat - &l_hat)).map_err(|_| Error::DegenerateBox)?;
    let mask = DMatrix::from_diagonal(&e.eigenvalues.map(|d| if d < 0.0 { 1.0 } else { 0.0 }));
    let inner = p.transpose() * mask * &p + l_hat.as_matrix();
    let xi = x.inv();
    let z = xi.as_matrix() * q * inner * q.transpose() * xi.as_matrix();
    Ok(SpdMatrix::from_trusted(SymMatrix::from_matrix(z)?))
}

/// `tr(S log(XZX))`, the objective of [`box_linear_subproblem`].
pub fn box_objective(s: &SymMatrix, x: &SpdMatrix, z: &SpdMatrix) -> f64 {
    let w = z.as_sym().sandwich(x.as_sym());
    sym_apply(&w, f64::ln).map_or(f64::NAN, |l| s.frobenius_dot(&l))
}

/// Steps along `γ_{q*→p_prev}` tried by [`feasibility_safeguard`].
pub fn safeguard_schedule() -> impl Iterator<Item = f64> {
    std::iter::once(0.0)
        .chain((0..12).map(|j| 1e-12 * 10f64.powi(j)))
        .chain(std::iter::once(1.0))
}

/// First point on the geodesic from `q_star` to the feasible `p_prev`, over
/// [`safeguard_schedule`], that lies in the box at zero tolerance. Returns the
/// point and the step used.
pub fn feasibility_safeguard(
    p_prev: &SpdMatrix,
    q_star: &SpdMatrix,
    lower: &SpdMatrix,
    upper: &SpdMatrix,
) -> (SpdMatrix, f64) {
    let geo = Spd::new(p_prev.dim());
    for t in safeguard_schedule() {
        if t == 1.0 {
            break;
        }
        let z = if t == 0.0 {
            q_star.clone()
        } else {
            match geo.geodesic_point(q_star, p_prev, t) {
                Ok(z) => z,
                Err(_) => continue,
            }
        };
        if box_slack(&z, lower, upper) >= 0.0 {
            return (z, t);
        }
    }
    (p_prev.clone(), 1.0)
}

/// `argmin_{q ∈ C} ⟨G, log_p q⟩_p`, the Frank-Wolfe linear oracle.
pub fn frechet_linear_oracle(prob: &FrechetBoxProblem, p: &SpdMatrix, g: &SymMatrix) -> Result<SpdMatrix> {
    let si = p.inv_sqrt();
    let x = SpdMatrix::from_trusted(si.clone());
    box_linear_subproblem(&g.sandwich(&si), &x, &prob.lower, &prob.upper)
}

/// `f = ι_C − h` with the closed-form subproblem followed by the safeguard.
pub fn frechet_dcproblem(prob: &FrechetBoxProblem) -> DcProblem<Spd> {
    let n = prob.dim();
    let (a, b, c, d) = (prob.clone(), prob.clone(), prob.clone(), prob.clone());
    DcProblem::new(
        Spd::new(n),
        move |p: &SpdMatrix| if a.is_feasible(p) { 0.0 } else { f64::INFINITY },
        move |_: &SpdMatrix| SymMatrix::zeros(n),
        move |p: &SpdMatrix| b.variance(p),
        move |p: &SpdMatrix| c.grad(p),
    )
    .with_constrained_subsolver(move |p: &SpdMatrix, x: &SymMatrix| {
        // the DCA linear term is −⟨X, log_p ·⟩ with X = grad h(p)
        let minus_x = x.scale(-1.0);
        match frechet_linear_oracle(&d, p, &minus_x) {
            Ok(q_star) => feasibility_safeguard(p, &q_star, d.lower(), d.upper()).0,
            Err(_) => p.clone(),
        }
    })
}

/// Reproducible instance description: data is regenerated from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrechetInstanceSpec {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
}

impl fmt::Display for FrechetInstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "m {}", self.m)
    }
}

impl FromStr for FrechetInstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut seed, mut n, mut m) = (None, None, None);
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let mut it = line.split_whitespace();
            let (Some(key), Some(val), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::InvalidConfig(format!("malformed line {line:?}")));
            };
            let bad = |_| Error::InvalidConfig(format!("bad value in {line:?}"));
            match key {
                "seed" => seed = Some(val.parse().map_err(bad)?),
                "n" => n = Some(val.parse().map_err(bad)?),
                "m" => m = Some(val.parse().map_err(bad)?),
                _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
            }
        }
        match (seed, n, m) {
            (Some(seed), Some(n), Some(m)) => Ok(FrechetInstanceSpec { seed, n, m }),
            _ => Err(Error::InvalidConfig("instance needs seed, n and m".into())),
        }
    }
}

/// `BBᵀ + nεI` with standard normal `B` and `ε = 1e-3`.
pub fn random_spd(rng: &mut impl Rng, n: usize) -> SpdMatrix {
    let b = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let a = &b * b.transpose() + DMatrix::identity(n, n) * (n as f64 * 1e-3);
    SpdMatrix::from_trusted(SymMatrix::from_matrix(a).expect("square"))
}

/// Seeded data, uniform weights, `L = (Σ wᵢqᵢ⁻¹)⁻¹`, `U = Σ wᵢqᵢ` and the
/// start `p⁰ = (L + U)/2`.
pub fn random_frechet_instance(n: usize, m: usize, seed: u64) -> Result<(FrechetBoxProblem, SpdMatrix)> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig("n and m must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<SpdMatrix> = (0..m).map(|_| random_spd(&mut rng, n)).collect();
    let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    frechet_instance_from_data(data, weights)
}

pub fn frechet_instance_from_data(data: Vec<SpdMatrix>, weights: Vec<f64>) -> Result<(FrechetBoxProblem, SpdMatrix)> {
    let n = data.first().ok_or(Error::EmptyGrid)?.dim();
    let mut harm = SymMatrix::zeros(n);
    let mut arith = SymMatrix::zeros(n);
    for (q, w) in data.iter().zip(&weights) {
        harm = &harm + &q.inv().scale(*w);
        arith = &arith + &q.as_sym().scale(*w);
    }
    let lower = SpdMatrix::from_trusted(SpdMatrix::new(harm)?.inv());
    let upper = SpdMatrix::new(arith)?;
    let p0 = SpdMatrix::new((lower.as_sym() + upper.as_sym()).scale(0.5))?;
    let prob = FrechetBoxProblem::new(data, weights, lower, upper)?;
    Ok((prob, p0))
}
