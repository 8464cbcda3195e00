//! Experiment drivers behind the `dcbench` binary. Each runner returns a
//! summary and, when given an output directory, writes its CSV traces there.

use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

mod duality;
mod frechet;
mod logdet;
mod rosenbrock;

pub use duality::{run_duality_checks, DualityConfig, DualityReport};
pub use frechet::{frechet_checks, run_frechet, FrechetConfig, FrechetRun, FrechetSummary};
pub use logdet::{dca_vs_dcppa_checks, run_dca_vs_dcppa, DcaVsDcppaConfig, DcaVsDcppaSummary, LogDetRow, SolverOutcome};
pub use rosenbrock::{rosenbrock_checks, run_rosenbrock, AlgorithmRun, RosenbrockConfig, RosenbrockSummary};

/// Environment variable consulted for the Fréchet seed when no flag is given.
pub const SEED_ENV: &str = "DCBENCH_SEED";
pub const DEFAULT_SEED: u64 = 42;

/// One named pass/fail verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Floats are written with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    csv::Writer::from_path(&path).with_context(|| format!("opening {}", path.display()))
}

pub(crate) fn write_checks(dir: &Path, name: &str, checks: &[Check]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let text: String = checks.iter().map(|c| format!("{c}\n")).collect();
    fs::write(dir.join(name), text)?;
    Ok(())
}
