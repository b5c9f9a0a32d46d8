//! Command-line front end. [`main_with_args`] returns the process exit code:
//! 0 on success, 1 when a verification fails or a run errors, 2 on usage errors.

use crate::criteria::{self, Outcome};
use crate::error::{Error, Result};
use crate::experiment::{run_experiment_with, ExperimentConfig};
use crate::export;
use crate::plot::{render_plot, PlotOptions, RateOverlay};
use crate::problem::{ProblemConfig, X0Rule, FAMILIES};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nagfree_core::exec::Execution;
use nagfree_core::solvers::{SolverKind, SolverSpec};
use nagfree_core::theory;
use std::io::Write;
use std::path::PathBuf;

/// Restart period used for `nagfree_restart` when `--restart-period` is absent.
pub const DEFAULT_RESTART_PERIOD: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "nagfree",
    version,
    about = "Run, plot and verify accelerated methods with online strong-convexity estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run solvers over seeds on one problem and write CSV and JSON results.
    Run(RunArgs),
    /// Render an aggregated CSV or result JSON to SVG.
    Plot(PlotArgs),
    /// Check the analytical statements on their fixed grids.
    VerifyTheory,
    /// Run the desk-scale rate checks.
    VerifyRates,
    /// List problem families and solvers.
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StartArg {
    Zeros,
    Ones,
    Uniform,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// One of quadratic, logsumexp, logistic, cubic, matfact.
    #[arg(long)]
    problem: String,
    /// Comma-separated solver names.
    #[arg(long, value_delimiter = ',', default_value = "nagfree")]
    solvers: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Output directory.
    #[arg(long, default_value = "nagfree-out")]
    out: PathBuf,
    /// Quadratic eigenvalues, comma-separated.
    #[arg(long, value_delimiter = ',')]
    spec: Option<Vec<f64>>,
    /// Quadratic dimension; expands three eigenvalues (a,b,c) to (a,b,…,b,c).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// LIBSVM file (logistic, cubic) or ratings CSV (matfact), by path or name in the data directory.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Seed for generated problem data.
    #[arg(long)]
    problem_seed: Option<u64>,
    #[arg(long)]
    restart_period: Option<usize>,
    /// Smoothness surrogate passed to every solver.
    #[arg(long)]
    l_bar: Option<f64>,
    #[arg(long, value_enum)]
    x0: Option<StartArg>,
    /// Cache directory for reference optimal values.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Aggregated CSV or result JSON.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Reference rate r drawn as r^t; repeatable.
    #[arg(long)]
    overlay_rate: Vec<f64>,
    /// Draw overlays as r^{2t}.
    #[arg(long)]
    squared: bool,
    #[arg(long)]
    title: Option<String>,
}

fn problem_from(args: &RunArgs) -> Result<ProblemConfig> {
    let mut p = ProblemConfig::default_for(&args.problem)?;
    match &mut p {
        ProblemConfig::Quadratic { eigenvalues, dim } => {
            if let Some(s) = &args.spec {
                *eigenvalues = s.clone();
            }
            *dim = args.dim;
        }
        ProblemConfig::LogSumExp { n, d, theta, eta, seed } => {
            *n = args.n.unwrap_or(*n);
            *d = args.d.unwrap_or(*d);
            *theta = args.theta.unwrap_or(*theta);
            *eta = args.eta.unwrap_or(*eta);
            *seed = args.problem_seed.unwrap_or(*seed);
        }
        ProblemConfig::Logistic { dataset, eta } => {
            *dataset = args.dataset.clone();
            *eta = args.eta.unwrap_or(*eta);
        }
        ProblemConfig::Cubic { dataset } => *dataset = args.dataset.clone(),
        ProblemConfig::MatrixFactorization {
            ratings,
            rows,
            cols,
            rank,
            seed,
        } => {
            *ratings = args.dataset.clone();
            *rows = args.rows.unwrap_or(*rows);
            *cols = args.cols.unwrap_or(*cols);
            *rank = args.rank.unwrap_or(*rank);
            *seed = args.problem_seed.unwrap_or(*seed);
        }
    }
    Ok(p)
}

fn config_from(args: &RunArgs) -> Result<ExperimentConfig> {
    let problem = problem_from(args)?;
    let mut specs = Vec::with_capacity(args.solvers.len());
    for name in &args.solvers {
        let kind: SolverKind = name.trim().parse()?;
        let mut spec = SolverSpec::new(kind, args.iters);
        if kind == SolverKind::NagFreeRestart {
            spec = spec.restart_period(args.restart_period.unwrap_or(DEFAULT_RESTART_PERIOD));
        }
        if let Some(l) = args.l_bar {
            spec = spec.l_bar(l);
        }
        specs.push(spec);
    }
    let mut cfg = ExperimentConfig::new(problem, specs, args.iters).seeds(args.seeds.clone());
    if let Some(start) = args.x0 {
        cfg = cfg.x0(match start {
            StartArg::Zeros => X0Rule::Zeros,
            StartArg::Ones => X0Rule::Ones,
            StartArg::Uniform => X0Rule::Uniform {
                lo: 0.0,
                hi: 0.1,
                seed: args.problem_seed.unwrap_or(0),
            },
        });
    }
    cfg.output_dir = Some(args.out.clone());
    cfg.reference_cache = args.cache_dir.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = config_from(args)?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = run_experiment_with(&cfg, exec)?;
    let paths = export::write_all(&result, &args.out)?;
    for s in &result.series {
        let last = s.mean.last().copied().unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{:<24} seeds={} final mean {} = {last:.6e}",
            s.solver_id,
            s.seed_count,
            s.metric.label()
        );
    }
    for (label, step) in &result.grid_steps {
        let _ = writeln!(out, "{label}: grid-searched step {step:.6e}");
    }
    for p in paths {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(0)
}

fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<i32> {
    let series = export::read_series(&args.input)?;
    let overlays = args
        .overlay_rate
        .iter()
        .map(|&r| {
            let o = RateOverlay::new(r);
            if args.squared {
                o.squared()
            } else {
                o
            }
        })
        .collect();
    let y_label = series.first().map(|s| s.metric.label()).unwrap_or("value").to_string();
    let svg = render_plot(
        &series,
        &PlotOptions {
            title: args.title.clone(),
            y_label,
            overlays,
            ..Default::default()
        },
    )?;
    std::fs::write(&args.out, svg).map_err(|e| Error::io(&args.out, e))?;
    let _ = writeln!(out, "wrote {}", args.out.display());
    Ok(0)
}

fn report(outcomes: &[Outcome], out: &mut dyn Write) -> i32 {
    for o in outcomes {
        let _ = writeln!(out, "{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let _ = writeln!(out, "{} passed, {failed} failed", outcomes.len() - failed);
    i32::from(failed > 0)
}

fn cmd_verify_theory(out: &mut dyn Write) -> i32 {
    let checks = theory::verify_all();
    for c in &checks {
        let _ = writeln!(
            out,
            "[{}] {} ({} cases, worst {:.2e}, tol {:.0e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.cases,
            c.worst,
            c.tol
        );
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(out, "{} passed, {failed} failed", checks.len() - failed);
    i32::from(failed > 0)
}

fn cmd_list(out: &mut dyn Write) -> i32 {
    let _ = writeln!(out, "problems:");
    for f in FAMILIES {
        let _ = writeln!(out, "  {f}");
    }
    let _ = writeln!(out, "solvers:");
    for k in SolverKind::ALL {
        let _ = writeln!(out, "  {:<24} {}", k.name(), k.description());
    }
    0
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Plot(a) => cmd_plot(a, out),
        Command::VerifyTheory => Ok(cmd_verify_theory(out)),
        Command::VerifyRates => Ok(report(&criteria::run_rates(), out)),
        Command::List => Ok(cmd_list(out)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(
            std::iter::once("nagfree").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn list_shows_every_solver_and_family() {
        let (code, out, _) = call(&["list"]);
        assert_eq!(code, 0);
        for k in SolverKind::ALL {
            assert!(out.contains(k.name()));
        }
        for f in FAMILIES {
            assert!(out.contains(f));
        }
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = call(&["run", "--problem", "quadratic", "--bogus"]);
        assert_eq!(code, 2);
        assert!(err.contains("Usage"));
        assert_eq!(call(&["frobnicate"]).0, 2);
    }

    #[test]
    fn unknown_solver_or_problem_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            call(&["run", "--problem", "quadratic", "--solvers", "sgd", "--out", out]).0,
            2
        );
        assert_eq!(call(&["run", "--problem", "svm", "--out", out]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify-theory"));
    }

    #[test]
    fn restart_period_reaches_the_spec() {
        let args = RunArgs::try_parse_from([
            "run",
            "--problem",
            "cubic",
            "--solvers",
            "nagfree_restart,gd",
            "--restart-period",
            "1",
        ]);
        let cfg = config_from(&args.unwrap()).unwrap();
        assert_eq!(cfg.solvers[0].params.restart_period, Some(1));
        assert_eq!(cfg.solvers[1].params.restart_period, None);
    }

    impl RunArgs {
        fn try_parse_from<const N: usize>(argv: [&str; N]) -> std::result::Result<Self, clap::Error> {
            #[derive(Parser)]
            struct Wrap {
                #[command(flatten)]
                inner: RunArgs,
            }
            Wrap::try_parse_from(argv).map(|w| w.inner)
        }
    }
}
