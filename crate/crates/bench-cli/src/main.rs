use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dc_bench::*;

#[derive(Parser)]
#[command(name = "dcbench", version, about = "Reproduce the DC solver experiments and duality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark experiment.
    Bench {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Run a verification suite.
    Check {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// DCA vs DCPPA on the log-det problem.
    DcaVsDcppa {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// GD and DCA, Euclidean and Riemannian, on the Rosenbrock function.
    Rosenbrock {
        #[arg(long, default_value_t = 2e5)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Lift the Euclidean gradient descent cap to the full-length run.
        #[arg(long)]
        long_run: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// DCA vs Frank-Wolfe on box-constrained Fréchet variance maximization.
    Frechet {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Fenchel conjugate checks on the 1-D quartic problem.
    Duality {
        #[arg(long)]
        out: PathBuf,
        /// Negate the sampled dual values (negative control).
        #[arg(long, hide = true)]
        tamper: bool,
    },
}

fn report(checks: &[Check]) -> ExitCode {
    for c in checks {
        println!("{c}");
    }
    if all_passed(checks) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    Ok(match cli.command {
        Command::Bench { experiment } => match experiment {
            Experiment::DcaVsDcppa { n_min, n_max, out } => {
                let s = run_dca_vs_dcppa(&DcaVsDcppaConfig { n_min, n_max, out: Some(out) })?;
                for r in &s.rows {
                    let its = |o: &Result<_, String>| match o {
                        Ok(o) => {
                            let o: &dc_bench::SolverOutcome = o;
                            format!("{:>3} its {:>9.4} s", o.iterations, o.seconds)
                        }
                        Err(e) => format!("failed: {e}"),
                    };
                    println!("n={:<3} d={:<5} DCA {}  DCPPA {}", r.n, r.dim, its(&r.dca), its(&r.dcppa));
                }
                report(&dca_vs_dcppa_checks(&s))
            }
            Experiment::Rosenbrock { a, b, long_run, out } => {
                let s = run_rosenbrock(&RosenbrockConfig { a, b, long_run, out: Some(out) })?;
                for run in s.runs() {
                    println!("{:<15} {:>10} its {:>10.3} s  {}", run.name, run.iterations, run.seconds, run.reason);
                }
                report(&rosenbrock_checks(&s))
            }
            Experiment::Frechet { n, m, seed, out } => {
                let s = run_frechet(&FrechetConfig { n, m, seed, out: Some(out) })?;
                for (name, run) in [("dca", &s.dca), ("frank_wolfe", &s.frank_wolfe)] {
                    println!(
                        "{name:<12} {:>6} its  h={:.12}  {:.3e} s/it  {}",
                        run.iterations,
                        run.final_h(),
                        run.seconds_per_iteration(),
                        run.reason
                    );
                }
                report(&frechet_checks(&s))
            }
        },
        Command::Check { suite: Suite::Duality { out, tamper } } => {
            let r = run_duality_checks(&DualityConfig { out: Some(out), tamper })?;
            report(&r.checks)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
