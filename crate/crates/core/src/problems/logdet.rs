use std::fmt;
use std::sync::Arc;

use crate::dcsolve::DcProblem;
use crate::manifolds::Spd;
use crate::matfun::{SpdMatrix, SymMatrix};

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar `φ` composed with the determinant, stored in log-det coordinates
/// `ℓ = log det p` so that large `n` never forms `det p` itself.
///
/// With `u(ℓ) = φ(eˡ)`: `u′(ℓ) = tφ′(t)` and `u″(ℓ) = t²φ″(t) + tφ′(t)` for
/// `t = eˡ`. The convexity condition on `𝒫ⁿ₊₊` is `u″ ≥ 0`.
#[derive(Clone)]
pub struct DetProfile {
    value: Scalar,
    first: Scalar,
    second: Scalar,
}

impl fmt::Debug for DetProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DetProfile")
    }
}

impl DetProfile {
    pub fn from_log_coordinates<V, D1, D2>(value: V, first: D1, second: D2) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DetProfile {
            value: Arc::new(value),
            first: Arc::new(first),
            second: Arc::new(second),
        }
    }

    /// `φ(t) = a (log t)ᵏ`.
    pub fn log_power(a: f64, k: i32) -> Self {
        let kf = k as f64;
        DetProfile::from_log_coordinates(
            move |l: f64| a * l.powi(k),
            move |l: f64| if k == 0 { 0.0 } else { a * kf * l.powi(k - 1) },
            move |l: f64| if k <= 1 { 0.0 } else { a * kf * (kf - 1.0) * l.powi(k - 2) },
        )
    }

    /// `φ(eˡ)`.
    pub fn value(&self, l: f64) -> f64 {
        (self.value)(l)
    }

    /// `tφ′(t)` at `t = eˡ`.
    pub fn t_dphi(&self, l: f64) -> f64 {
        (self.first)(l)
    }

    /// `t²φ″(t) + tφ′(t)` at `t = eˡ`.
    pub fn curvature(&self, l: f64) -> f64 {
        (self.second)(l)
    }

    /// `φ′(t)`.
    pub fn dphi(&self, t: f64) -> f64 {
        self.t_dphi(t.ln()) / t
    }

    /// `φ″(t)`.
    pub fn d2phi(&self, t: f64) -> f64 {
        let l = t.ln();
        (self.curvature(l) - self.t_dphi(l)) / (t * t)
    }
}

/// `f(p) = φ₁(det p) − φ₂(det p)` on `𝒫ⁿ₊₊`.
#[derive(Debug, Clone)]
pub struct LogDetProblem {
    pub n: usize,
    pub phi1: DetProfile,
    pub phi2: DetProfile,
}

impl LogDetProblem {
    /// `(log det p)⁴ − (log det p)²`.
    pub fn quartic(n: usize) -> Self {
        LogDetProblem {
            n,
            phi1: DetProfile::log_power(1.0, 4),
            phi2: DetProfile::log_power(1.0, 2),
        }
    }

    pub fn cost(&self, p: &SpdMatrix) -> f64 {
        let l = p.log_det();
        self.phi1.value(l) - self.phi2.value(l)
    }

    /// `φ₁′(det p) − φ₂′(det p)`, which vanishes exactly at critical points.
    pub fn critical_residual(&self, p: &SpdMatrix) -> f64 {
        let l = p.log_det();
        (self.phi1.t_dphi(l) - self.phi2.t_dphi(l)) * (-l).exp()
    }

    /// Start point `log(n)·Iₙ`.
    pub fn default_start(&self) -> SpdMatrix {
        SpdMatrix::scaled_identity(self.n, (self.n as f64).ln())
            .expect("log n > 0 for n ≥ 2")
    }
}

fn det_grad(profile: &DetProfile, p: &SpdMatrix) -> SymMatrix {
    p.as_sym().scale(profile.t_dphi(p.log_det()))
}

/// `g = φ₁∘det`, `h = φ₂∘det` with `grad φ(det p) = (φ′(det p) det p)·p`.
pub fn logdet_dcproblem(spec: &LogDetProblem) -> DcProblem<Spd> {
    let (a, b, c, d) = (spec.phi1.clone(), spec.phi1.clone(), spec.phi2.clone(), spec.phi2.clone());
    DcProblem::new(
        Spd::new(spec.n),
        move |p: &SpdMatrix| a.value(p.log_det()),
        move |p: &SpdMatrix| det_grad(&b, p),
        move |p: &SpdMatrix| c.value(p.log_det()),
        move |p: &SpdMatrix| det_grad(&d, p),
    )
}

pub type SpdCost = Box<dyn Fn(&SpdMatrix) -> f64 + Send + Sync>;
pub type SpdGrad = Box<dyn Fn(&SpdMatrix) -> SymMatrix + Send + Sync>;

/// `ψ(p) = φ₁(det p) − (φ₂′(det q) det q)(log det p − log det q)` and its
/// Riemannian gradient `(φ₁′(det p) det p − φ₂′(det q) det q)·p`.
pub fn logdet_subproblem(spec: &LogDetProblem, q: &SpdMatrix) -> (SpdCost, SpdGrad) {
    let lq = q.log_det();
    let c = spec.phi2.t_dphi(lq);
    let (a, b) = (spec.phi1.clone(), spec.phi1.clone());
    (
        Box::new(move |p: &SpdMatrix| {
            let l = p.log_det();
            a.value(l) - c * (l - lq)
        }),
        Box::new(move |p: &SpdMatrix| p.as_sym().scale(b.t_dphi(p.log_det()) - c)),
    )
}

/// `f(p) = φ₁(tr p) − φ₂(det p)` with `φ₁(t) = a₁t^{b₁}` and
/// `φ₂(t) = a₂t^{b₂}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrDetProblem {
    pub n: usize,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl TrDetProblem {
    /// An instance with `a₁b₁n^{b₁−1} = a₂b₂`, so that `I` is critical, and
    /// `nb₂ < b₁`, so that `f` is bounded below.
    pub fn balanced(n: usize) -> Self {
        let (a1, b1) = (1.0, 2.0);
        let b2 = (1.0 / n as f64).min(0.5);
        TrDetProblem {
            n,
            a1,
            b1,
            a2: a1 * b1 * (n as f64).powf(b1 - 1.0) / b2,
            b2,
        }
    }

    pub fn phi1(&self, t: f64) -> f64 {
        self.a1 * t.powf(self.b1)
    }

    pub fn dphi1(&self, t: f64) -> f64 {
        self.a1 * self.b1 * t.powf(self.b1 - 1.0)
    }

    pub fn d2phi1(&self, t: f64) -> f64 {
        self.a1 * self.b1 * (self.b1 - 1.0) * t.powf(self.b1 - 2.0)
    }

    /// `φ₂` in log-det coordinates: `a₂ e^{b₂ℓ}`.
    pub fn phi2_profile(&self) -> DetProfile {
        let (a, b) = (self.a2, self.b2);
        DetProfile::from_log_coordinates(
            move |l: f64| a * (b * l).exp(),
            move |l: f64| a * b * (b * l).exp(),
            move |l: f64| a * b * b * (b * l).exp(),
        )
    }

    pub fn cost(&self, p: &SpdMatrix) -> f64 {
        self.phi1(p.trace()) - self.phi2_profile().value(p.log_det())
    }
}

/// `grad g(p) = φ₁′(tr p)·p²`, `grad h(p) = (φ₂′(det p) det p)·p`.
pub fn trdet_dcproblem(spec: &TrDetProblem) -> DcProblem<Spd> {
    let s = *spec;
    let phi2 = spec.phi2_profile();
    let phi2b = phi2.clone();
    DcProblem::new(
        Spd::new(spec.n),
        move |p: &SpdMatrix| s.phi1(p.trace()),
        move |p: &SpdMatrix| SymMatrix::identity(s.n).sandwich(p.as_sym()).scale(s.dphi1(p.trace())),
        move |p: &SpdMatrix| phi2.value(p.log_det()),
        move |p: &SpdMatrix| det_grad(&phi2b, p),
    )
}

/// `ψ(p) = φ₁(tr p) − (φ₂′(det q) det q)(log det p − log det q)`.
pub fn trdet_subproblem(spec: &TrDetProblem, q: &SpdMatrix) -> (SpdCost, SpdGrad) {
    let s = *spec;
    let lq = q.log_det();
    let c = spec.phi2_profile().t_dphi(lq);
    (
        Box::new(move |p: &SpdMatrix| s.phi1(p.trace()) - c * (p.log_det() - lq)),
        Box::new(move |p: &SpdMatrix| {
            let p2 = SymMatrix::identity(s.n).sandwich(p.as_sym()).scale(s.dphi1(p.trace()));
            &p2 - &p.as_sym().scale(c)
        }),
    )
}
