use std::path::PathBuf;
use std::time::Instant;

use anyhow::{ensure, Result};
use riemann_dc::dcsolve::{dca_solve, frank_wolfe_solve, SolverTrace, StopReason, StoppingCriterion, SubSolverSpec};
use riemann_dc::manifolds::Spd;
use riemann_dc::matfun::SpdMatrix;
use riemann_dc::problems::{frechet_dcproblem, frechet_linear_oracle, random_frechet_instance, FrechetBoxProblem};
use riemann_dc::Execution;

use crate::{csv_writer, fmt_float, Check, DEFAULT_SEED};

const DCA_CAP: usize = 10_000;

#[derive(Debug, Clone)]
pub struct FrechetConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for FrechetConfig {
    fn default() -> Self {
        FrechetConfig {
            n: 5,
            m: 20,
            seed: DEFAULT_SEED,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetRun {
    pub iterations: usize,
    pub reason: StopReason,
    pub seconds: f64,
    /// `h(p⁽ᵏ⁾)` for every stored iterate.
    pub h: Vec<f64>,
    /// Minimum eigenvalue of `p⁽ᵏ⁾ − L` and `U − p⁽ᵏ⁾`.
    pub slack: Vec<f64>,
    pub step_sizes: Vec<Option<f64>>,
}

impl FrechetRun {
    fn from_trace(prob: &FrechetBoxProblem, trace: &SolverTrace<SpdMatrix>, seconds: f64) -> Self {
        FrechetRun {
            iterations: trace.iterations(),
            reason: trace.reason,
            seconds,
            h: trace.iterates.iter().map(|p| prob.variance(p)).collect(),
            slack: trace.iterates.iter().map(|p| prob.feasibility_slack(p)).collect(),
            step_sizes: trace.records.iter().map(|r| r.step_size).collect(),
        }
    }

    pub fn final_h(&self) -> f64 {
        *self.h.last().expect("trace has a start record")
    }

    pub fn seconds_per_iteration(&self) -> f64 {
        self.seconds / self.iterations.max(1) as f64
    }

    /// Largest decrease `h(p⁽ᵏ⁾) − h(p⁽ᵏ⁺¹⁾)` over the run (≤ 0 when monotone).
    pub fn max_decrease(&self) -> f64 {
        self.h.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetSummary {
    pub config_seed: u64,
    pub dca: FrechetRun,
    pub frank_wolfe: FrechetRun,
}

/// DCA with the closed-form subproblem and safeguard, then Frank-Wolfe for
/// the same number of iterations, both from `(L + U)/2`.
pub fn run_frechet(cfg: &FrechetConfig) -> Result<FrechetSummary> {
    ensure!(cfg.n >= 2 && cfg.m >= 2, "n and m must be at least 2");
    let (prob, p0) = random_frechet_instance(cfg.n, cfg.m, cfg.seed)?;
    let prob = prob.with_execution(Execution::Sequential);

    let dc = frechet_dcproblem(&prob);
    let stop = StoppingCriterion::max_iter(DCA_CAP).with_iterate_change(1e-14).with_grad_change(1e-9);
    let t = Instant::now();
    let (_, trace) = dca_solve(&dc, p0.clone(), &SubSolverSpec::closed_form(), &stop)?;
    let dca = FrechetRun::from_trace(&prob, &trace, t.elapsed().as_secs_f64());

    let geo = Spd::new(cfg.n);
    let fw_stop = StoppingCriterion::max_iter(dca.iterations.max(1));
    let t = Instant::now();
    let (_, trace) = frank_wolfe_solve(
        &geo,
        |p: &SpdMatrix| -prob.variance(p),
        |p: &SpdMatrix| prob.grad(p).scale(-1.0),
        |p: &SpdMatrix, g: &riemann_dc::matfun::SymMatrix| frechet_linear_oracle(&prob, p, g).unwrap_or_else(|_| p.clone()),
        |p: &SpdMatrix| prob.is_feasible(p),
        p0,
        &fw_stop,
    )?;
    let frank_wolfe = FrechetRun::from_trace(&prob, &trace, t.elapsed().as_secs_f64());

    let summary = FrechetSummary {
        config_seed: cfg.seed,
        dca,
        frank_wolfe,
    };
    if let Some(dir) = &cfg.out {
        for (name, run) in [("dca", &summary.dca), ("frank_wolfe", &summary.frank_wolfe)] {
            let mut w = csv_writer(dir, &format!("frechet_{name}.csv"))?;
            w.write_record(["i", "h", "feas_slack"])?;
            for (i, (h, s)) in run.h.iter().zip(&run.slack).enumerate() {
                w.write_record([i.to_string(), fmt_float(*h), fmt_float(*s)])?;
            }
            w.flush()?;
        }
        let mut w = csv_writer(dir, "frechet_summary.csv")?;
        w.write_record(["algorithm", "iterations", "reason", "seconds_per_iteration", "final_h", "min_slack"])?;
        for (name, run) in [("dca", &summary.dca), ("frank_wolfe", &summary.frank_wolfe)] {
            w.write_record([
                name.to_string(),
                run.iterations.to_string(),
                run.reason.to_string(),
                fmt_float(run.seconds_per_iteration()),
                fmt_float(run.final_h()),
                fmt_float(run.min_slack()),
            ])?;
        }
        w.flush()?;
    }
    Ok(summary)
}

pub fn frechet_checks(s: &FrechetSummary) -> Vec<Check> {
    let (dca, fw) = (&s.dca, &s.frank_wolfe);
    vec![
        Check::new(
            "DCA h nondecreasing",
            dca.max_decrease() <= 1e-12,
            format!("largest per-step decrease {:.3e}", dca.max_decrease()),
        ),
        Check::new(
            "DCA iterates feasible",
            dca.min_slack() >= -1e-10,
            format!("minimum eigenvalue slack {:.3e}", dca.min_slack()),
        ),
        Check::new(
            "DCA stops on gradient change",
            dca.reason == StopReason::GradientChange,
            format!("{} after {} iterations", dca.reason, dca.iterations),
        ),
        Check::new(
            "Frank-Wolfe below DCA",
            fw.final_h() <= dca.final_h() + 1e-6,
            format!("FW h {:.12} vs DCA h {:.12} after {} iterations", fw.final_h(), dca.final_h(), fw.iterations),
        ),
        Check::new(
            "runtime",
            dca.seconds + fw.seconds <= 60.0,
            format!("{:.3} s", dca.seconds + fw.seconds),
        ),
    ]
}
