use std::path::PathBuf;
use std::time::Instant;

use anyhow::{ensure, Result};
use riemann_dc::dcsolve::{dca_solve, dcppa_solve, SolverTrace, StopReason, StoppingCriterion, SubSolverSpec};
use riemann_dc::matfun::SpdMatrix;
use riemann_dc::problems::{logdet_dcproblem, LogDetProblem};

use crate::{csv_writer, fmt_float, Check};

const F_STAR: f64 = -0.25;

#[derive(Debug, Clone)]
pub struct DcaVsDcppaConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub out: Option<PathBuf>,
}

impl Default for DcaVsDcppaConfig {
    fn default() -> Self {
        DcaVsDcppaConfig {
            n_min: 2,
            n_max: 20,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub seconds: f64,
    pub iterations: usize,
    pub reason: StopReason,
    pub final_f: f64,
    pub final_det: f64,
    pub f_values: Vec<f64>,
}

/// One timing-table row; `dca`/`dcppa` are `Err` with a message when that
/// run diverged.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDetRow {
    pub n: usize,
    pub dim: usize,
    pub dca: Result<SolverOutcome, String>,
    pub dcppa: Result<SolverOutcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcaVsDcppaSummary {
    pub rows: Vec<LogDetRow>,
}

impl DcaVsDcppaSummary {
    pub fn row(&self, n: usize) -> Option<&LogDetRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn inner_spec() -> SubSolverSpec {
    SubSolverSpec::trust_region(StoppingCriterion::max_iter(5000).with_grad_norm(1e-10))
}

fn outer_stop() -> StoppingCriterion {
    StoppingCriterion::max_iter(100).with_grad_norm(1e-10)
}

fn outcome(seconds: f64, p: &SpdMatrix, trace: &SolverTrace<SpdMatrix>, spec: &LogDetProblem) -> SolverOutcome {
    SolverOutcome {
        seconds,
        iterations: trace.iterations(),
        reason: trace.reason,
        final_f: spec.cost(p),
        final_det: p.log_det().exp(),
        f_values: trace.f_values().collect(),
    }
}

fn run_one(n: usize) -> LogDetRow {
    let spec = LogDetProblem::quartic(n);
    let problem = logdet_dcproblem(&spec);
    let p0 = spec.default_start();
    let sub = inner_spec();
    let stop = outer_stop();

    let t = Instant::now();
    let dca = dca_solve(&problem, p0.clone(), &sub, &stop);
    let dca_s = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let dcppa = dcppa_solve(&problem, p0, 1.0 / (2.0 * n as f64), &sub, &stop);
    let dcppa_s = t.elapsed().as_secs_f64();

    LogDetRow {
        n,
        dim: n * (n + 1) / 2,
        dca: dca.map(|(p, tr)| outcome(dca_s, &p, &tr, &spec)).map_err(|e| e.to_string()),
        dcppa: dcppa.map(|(p, tr)| outcome(dcppa_s, &p, &tr, &spec)).map_err(|e| e.to_string()),
    }
}

/// DCA and DCPPA (λ = 1/(2n)) on the quartic log-det problem for every
/// `n` in range, from `log(n)·Iₙ`. Runs are sequential so timings do not
/// contend.
pub fn run_dca_vs_dcppa(cfg: &DcaVsDcppaConfig) -> Result<DcaVsDcppaSummary> {
    ensure!(cfg.n_min >= 2 && cfg.n_min <= cfg.n_max && cfg.n_max <= 80, "n range must lie within [2, 80]");
    let rows: Vec<LogDetRow> = (cfg.n_min..=cfg.n_max).map(run_one).collect();
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &rows)?;
    }
    Ok(DcaVsDcppaSummary { rows })
}

fn write_outputs(dir: &std::path::Path, rows: &[LogDetRow]) -> Result<()> {
    for row in rows {
        for (name, run) in [("dca", &row.dca), ("dcppa", &row.dcppa)] {
            let mut w = csv_writer(dir, &format!("{name}_n{}.csv", row.n))?;
            w.write_record(["i", "f", "fabs"])?;
            if let Ok(o) = run {
                for (i, f) in o.f_values.iter().enumerate() {
                    w.write_record([i.to_string(), fmt_float(*f), fmt_float((f - F_STAR).abs())])?;
                }
            }
            w.flush()?;
        }
    }
    let mut w = csv_writer(dir, "timing.csv")?;
    w.write_record(["n", "d", "dca_seconds", "dcppa_seconds", "dca_iters", "dcppa_iters"])?;
    let secs = |r: &Result<SolverOutcome, String>| r.as_ref().map_or("NaN".to_string(), |o| fmt_float(o.seconds));
    let its = |r: &Result<SolverOutcome, String>| r.as_ref().map_or("failed".to_string(), |o| o.iterations.to_string());
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.dim.to_string(),
            secs(&row.dca),
            secs(&row.dcppa),
            its(&row.dca),
            its(&row.dcppa),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Target values for `n ∈ {2, 3, 5, 8}` present in the run, and iteration
/// bands for `n ∈ {6, 7, 8}`.
pub fn dca_vs_dcppa_checks(summary: &DcaVsDcppaSummary) -> Vec<Check> {
    let det_star = std::f64::consts::FRAC_1_SQRT_2.exp();
    let mut checks = Vec::new();
    for row in &summary.rows {
        for (name, run) in [("DCA", &row.dca), ("DCPPA", &row.dcppa)] {
            match run {
                Ok(o) => {
                    let ok = (o.final_f - F_STAR).abs() <= 1e-8 && (o.final_det - det_star).abs() <= 1e-6;
                    checks.push(Check::new(
                        format!("{name} n={} targets", row.n),
                        ok,
                        format!(
                            "|f+1/4|={:.3e} |det-e^(1/sqrt2)|={:.3e} ({} its, {})",
                            (o.final_f - F_STAR).abs(),
                            (o.final_det - det_star).abs(),
                            o.iterations,
                            o.reason
                        ),
                    ));
                }
                Err(e) => checks.push(Check::new(format!("{name} n={} targets", row.n), false, e.clone())),
            }
        }
        if (6..=8).contains(&row.n) {
            for (name, run, lo, hi) in [("DCA", &row.dca, 10, 40), ("DCPPA", &row.dcppa, 20, 60)] {
                let its = run.as_ref().map_or(usize::MAX, |o| o.iterations);
                checks.push(Check::new(
                    format!("{name} n={} iteration band", row.n),
                    (lo..=hi).contains(&its),
                    format!("{its} iterations, band [{lo}, {hi}]"),
                ));
            }
        }
    }
    checks
}
