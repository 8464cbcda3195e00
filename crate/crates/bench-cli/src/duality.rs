use std::path::PathBuf;

use anyhow::Result;
use nalgebra::Vector1;
use riemann_dc::dcsolve::{dca_solve, DcProblem, StoppingCriterion, SubSolverSpec};
use riemann_dc::duality::{
    conjugate_grid, dual_grid_value, fenchel_young_gap, primal_grid_value, sandwich_on_samples, Grid1D, SandwichReport,
};
use riemann_dc::manifolds::Euclidean;
use riemann_dc::Execution;

use crate::{all_passed, csv_writer, fmt_float, write_checks, Check};

#[derive(Debug, Clone, Default)]
pub struct DualityConfig {
    pub out: Option<PathBuf>,
    /// Negates every sampled dual value; a negative control that must fail.
    pub tamper: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub checks: Vec<Check>,
    pub sandwich: SandwichReport,
    pub dca_iterations: usize,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

type P1 = Vector1<f64>;

/// `g = x⁴ + x²`, `h = 2x²`: `f = x⁴ − x²`, minimal value −1/4 at ±1/√2.
pub fn quartic_problem() -> DcProblem<Euclidean<1>> {
    DcProblem::new(
        Euclidean::<1>,
        |x: &P1| x[0].powi(4) + x[0] * x[0],
        |x: &P1| P1::new(4.0 * x[0].powi(3) + 2.0 * x[0]),
        |x: &P1| 2.0 * x[0] * x[0],
        |x: &P1| P1::new(4.0 * x[0]),
    )
}

const GRID_TOL: f64 = 1e-3;

/// Conjugate, Fenchel-Young, primal-dual and sandwich checks on the 1-D
/// quartic problem over `[−10, 10]` with 20001 samples.
pub fn run_duality_checks(cfg: &DualityConfig) -> Result<DualityReport> {
    let exec = Execution::Parallel;
    let geo = Euclidean::<1>;
    let grid = Grid1D::new(-10.0, 10.0, 20001)?;
    let samples = grid.points1();
    let sign = if cfg.tamper { -1.0 } else { 1.0 };
    let conj = |f: &(dyn Fn(&P1) -> f64 + Sync + Send), p: f64, x: f64| {
        conjugate_grid(f, &geo, &samples, &P1::new(p), &P1::new(x), exec).map(|mut c| {
            c.value *= sign;
            c
        })
    };
    let mut checks = Vec::new();

    let half_square = |x: &P1| 0.5 * x[0] * x[0];
    let mut worst: f64 = 0.0;
    for y in [-4.0, -1.5, 0.0, 0.5, 2.0, 3.25] {
        worst = worst.max((conj(&half_square, 0.0, y)?.value - 0.5 * y * y).abs());
    }
    worst = worst.max((conj(&half_square, 1.0, 1.0)?.value + 0.5).abs());
    checks.push(Check::new(
        "conjugate of x^2/2",
        worst <= grid.spacing(),
        format!("largest deviation from the analytic conjugate {worst:.3e}"),
    ));

    let prob = quartic_problem();
    let bound = 10.0 * grid.spacing();
    let mut min_gap = f64::INFINITY;
    for p in [-1.0, 0.0, 0.7] {
        for x in [-3.0, -0.5, 0.0, 1.0, 2.5] {
            for f in [&*prob.g_cost, &*prob.h_cost] {
                let c = conj(f, p, x)?;
                for i in 0..41 {
                    let q = P1::new(-4.0 + 0.2 * i as f64);
                    min_gap = min_gap.min(fenchel_young_gap(f, &geo, &c, &q));
                }
            }
        }
    }
    checks.push(Check::new(
        "Fenchel-Young gaps",
        min_gap >= -bound,
        format!("minimum gap {min_gap:.3e}, bound -{bound:.1e}"),
    ));

    let coarse = Grid1D::new(-6.0, 6.0, 301)?;
    let mut monotone = true;
    for x in [-2.0, 0.3, 1.7] {
        let f = &*prob.g_cost;
        let a = conjugate_grid(f, &geo, &coarse.points1(), &P1::zeros(), &P1::new(x), exec)?;
        let b = conjugate_grid(f, &geo, &coarse.refined().points1(), &P1::zeros(), &P1::new(x), exec)?;
        monotone &= b.value >= a.value;
    }
    checks.push(Check::new("grid refinement monotone", monotone, "doubling the grid never lowers a conjugate"));

    let primal = primal_grid_value(&prob, &samples, exec)?;
    let dual_samples = Grid1D::new(-10.0, 10.0, 2001)?.points1();
    let dual = sign * dual_grid_value(&prob, &samples, &dual_samples, exec)?;
    checks.push(Check::new(
        "primal and dual values agree",
        (primal - dual).abs() <= GRID_TOL,
        format!("primal {primal:.9} dual {dual:.9}"),
    ));

    let sub = SubSolverSpec::trust_region(StoppingCriterion::max_iter(500).with_grad_norm(1e-12));
    let (_, trace) = dca_solve(&prob, P1::new(3.0), &sub, &StoppingCriterion::max_iter(60).with_grad_norm(1e-10))?;
    let sandwich = sandwich_on_samples(&trace, &prob, &samples, GRID_TOL, exec, |d| sign * d)?;
    checks.push(Check::new(
        "DCA sandwich",
        sandwich.holds(),
        format!("{} iterations, largest residual {:.3e}", sandwich.rows.len(), sandwich.max_residual()),
    ));
    checks.push(Check::new(
        "primal and dual limits coincide",
        sandwich.final_gap <= GRID_TOL,
        format!("final gap {:.3e}", sandwich.final_gap),
    ));

    if let Some(dir) = &cfg.out {
        let mut w = csv_writer(dir, "sandwich.csv")?;
        w.write_record(["k", "primal_next", "dual", "primal", "lower_residual", "upper_residual"])?;
        for r in &sandwich.rows {
            w.write_record([
                r.k.to_string(),
                fmt_float(r.primal_next),
                fmt_float(r.dual),
                fmt_float(r.primal),
                fmt_float(r.lower_residual),
                fmt_float(r.upper_residual),
            ])?;
        }
        w.flush()?;
        write_checks(dir, "duality_report.txt", &checks)?;
    }
    Ok(DualityReport {
        checks,
        dca_iterations: trace.iterations(),
        sandwich,
    })
}
