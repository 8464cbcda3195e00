use std::path::PathBuf;
use std::time::Instant;

use anyhow::{ensure, Result};
use nalgebra::Vector2;
use riemann_dc::dcsolve::{
    dca_solve, gradient_descent_observed, ArmijoParams, StopReason, StoppingCriterion, SubSolverSpec,
};
use riemann_dc::manifolds::{Euclidean, Manifold, RosenbrockPlane};
use riemann_dc::problems::{rosenbrock_dcproblem, RosenbrockProblem};

use crate::{csv_writer, fmt_float, Check};

/// Euclidean GD cap without `--long-run`.
pub const EUCLIDEAN_GD_CAP: usize = 200_000;
/// Cap for every other run, and for Euclidean GD with `--long-run`.
pub const OUTER_CAP: usize = 10_000_000;
pub const LONG_RUN_CAP: usize = 60_000_000;

#[derive(Debug, Clone)]
pub struct RosenbrockConfig {
    pub a: f64,
    pub b: f64,
    pub long_run: bool,
    pub out: Option<PathBuf>,
}

impl Default for RosenbrockConfig {
    fn default() -> Self {
        RosenbrockConfig {
            a: 2e5,
            b: 1.0,
            long_run: false,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub name: &'static str,
    pub seconds: f64,
    pub iterations: usize,
    pub reason: StopReason,
    pub final_point: Vector2<f64>,
    /// First iteration within 1e-6 of the minimizer. Tracked for DCA runs
    /// only, whose traces keep their iterates.
    pub first_hit: Option<usize>,
    pub f_values: Vec<f64>,
}

impl AlgorithmRun {
    pub fn final_error(&self, minimizer: &Vector2<f64>) -> f64 {
        (self.final_point - minimizer).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RosenbrockSummary {
    pub spec: RosenbrockProblem,
    pub start: Vector2<f64>,
    pub initial_cost: f64,
    pub euclidean_gd: AlgorithmRun,
    pub euclidean_dca: AlgorithmRun,
    pub riemannian_gd: AlgorithmRun,
    pub riemannian_dca: AlgorithmRun,
}

impl RosenbrockSummary {
    pub fn runs(&self) -> [&AlgorithmRun; 4] {
        [&self.euclidean_gd, &self.euclidean_dca, &self.riemannian_gd, &self.riemannian_dca]
    }
}

const HIT_RADIUS: f64 = 1e-6;

fn outer_stop(cap: usize) -> StoppingCriterion {
    StoppingCriterion::max_iter(cap).with_iterate_change(1e-16)
}

fn gd<M>(name: &'static str, geo: &M, spec: &RosenbrockProblem, p0: Vector2<f64>, cap: usize) -> Result<AlgorithmRun>
where
    M: Manifold<Point = Vector2<f64>, Vector = Vector2<f64>>,
{
    let s = *spec;
    let mut f_values = Vec::new();
    let mut last = 0;
    let t = Instant::now();
    let (p, reason) = gradient_descent_observed(
        geo,
        |x| s.cost(x),
        |x| geo.egrad_to_rgrad(x, &s.egrad(x)),
        p0,
        &ArmijoParams::default(),
        &outer_stop(cap),
        |r| {
            f_values.push(r.f_value);
            last = r.k;
        },
    )?;
    let seconds = t.elapsed().as_secs_f64();
    Ok(AlgorithmRun {
        name,
        seconds,
        iterations: last,
        reason,
        final_point: p,
        first_hit: None,
        f_values,
    })
}

fn dca<M>(name: &'static str, geo: M, spec: &RosenbrockProblem, p0: Vector2<f64>) -> Result<AlgorithmRun>
where
    M: Manifold<Point = Vector2<f64>, Vector = Vector2<f64>> + Clone + 'static,
{
    let problem = rosenbrock_dcproblem(spec, geo);
    let sub = SubSolverSpec::gradient_descent(StoppingCriterion::max_iter(1000).with_grad_norm(1e-16));
    let t = Instant::now();
    let (p, trace) = dca_solve(&problem, p0, &sub, &outer_stop(OUTER_CAP))?;
    let seconds = t.elapsed().as_secs_f64();
    let xstar = spec.minimizer();
    let first_hit = trace.iterates.iter().position(|x| (x - xstar).norm() <= HIT_RADIUS);
    Ok(AlgorithmRun {
        name,
        seconds,
        iterations: trace.iterations(),
        reason: trace.reason,
        final_point: p,
        first_hit,
        f_values: trace.f_values().collect(),
    })
}

/// The four-algorithm comparison from `(0.1, 0.2)`.
pub fn run_rosenbrock(cfg: &RosenbrockConfig) -> Result<RosenbrockSummary> {
    ensure!(cfg.a > 0.0 && cfg.b > 0.0, "a and b must be positive");
    let spec = RosenbrockProblem::new(cfg.a, cfg.b)?;
    let p0 = Vector2::new(0.1, 0.2);
    let egd_cap = if cfg.long_run { LONG_RUN_CAP } else { EUCLIDEAN_GD_CAP };
    let summary = RosenbrockSummary {
        spec,
        start: p0,
        initial_cost: spec.cost(&p0),
        euclidean_gd: gd("euclidean_gd", &Euclidean::<2>, &spec, p0, egd_cap)?,
        euclidean_dca: dca("euclidean_dca", Euclidean::<2>, &spec, p0)?,
        riemannian_gd: gd("riemannian_gd", &RosenbrockPlane, &spec, p0, OUTER_CAP)?,
        riemannian_dca: dca("riemannian_dca", RosenbrockPlane, &spec, p0)?,
    };
    if let Some(dir) = &cfg.out {
        for run in summary.runs() {
            let mut w = csv_writer(dir, &format!("rosenbrock_{}.csv", run.name))?;
            w.write_record(["i", "f"])?;
            for (i, f) in run.f_values.iter().enumerate() {
                w.write_record([i.to_string(), fmt_float(*f)])?;
            }
            w.flush()?;
        }
        let mut w = csv_writer(dir, "rosenbrock_summary.csv")?;
        w.write_record(["algorithm", "seconds", "iterations", "reason", "final_error", "first_hit"])?;
        let xstar = spec.minimizer();
        for run in summary.runs() {
            w.write_record([
                run.name.to_string(),
                fmt_float(run.seconds),
                run.iterations.to_string(),
                run.reason.to_string(),
                fmt_float(run.final_error(&xstar)),
                run.first_hit.map_or(String::new(), |k| k.to_string()),
            ])?;
        }
        w.flush()?;
    }
    Ok(summary)
}

pub fn rosenbrock_checks(s: &RosenbrockSummary) -> Vec<Check> {
    let xstar = s.spec.minimizer();
    let (rdca, edca, rgd) = (&s.riemannian_dca, &s.euclidean_dca, &s.riemannian_gd);
    let reach = |run: &AlgorithmRun, limit: usize| {
        let ok = run.first_hit.is_some_and(|k| k <= limit) && run.final_error(&xstar) <= HIT_RADIUS;
        Check::new(
            format!("{} reaches (b, b^2) within {limit} iterations", run.name),
            ok,
            format!(
                "first within 1e-6 at {:?}, final error {:.3e}, {} iterations ({})",
                run.first_hit,
                run.final_error(&xstar),
                run.iterations,
                run.reason
            ),
        )
    };
    let mut checks = Vec::new();
    // the reference value is only known for the default instance
    if s.spec == RosenbrockProblem::new(2e5, 1.0).expect("valid") && s.start == Vector2::new(0.1, 0.2) {
        checks.push(Check::new(
            "initial cost",
            (s.initial_cost - 7220.81).abs() <= 0.01,
            format!("{:.6}", s.initial_cost),
        ));
    }
    checks.extend([
        reach(rdca, 10_000),
        reach(edca, 150_000),
        Check::new(
            "iteration ordering",
            rdca.iterations < edca.iterations && edca.iterations < rgd.iterations,
            format!("riemannian DCA {} < euclidean DCA {} < riemannian GD {}", rdca.iterations, edca.iterations, rgd.iterations),
        ),
    ]);
    checks
}
