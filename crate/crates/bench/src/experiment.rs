//! Multi-seed experiment execution and aggregation.

use crate::error::{Error, Result};
use crate::problem::{ProblemConfig, X0Rule};
use nagfree_core::estimators::init_estimate;
use nagfree_core::exec::Execution;
use nagfree_core::objective::Objective;
use nagfree_core::solvers::{grid_search_around, run_named, GridMethod, SolverKind, SolverSpec};
use nagfree_core::{rng, Trace};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Reference runs use this multiple of the experiment budget.
pub const REFERENCE_BUDGET_FACTOR: usize = 10;

/// File name of the reference-value cache inside a cache directory.
pub const REFERENCE_CACHE_FILE: &str = "fstar_cache.json";

pub fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    /// Each spec's own `max_iters` is replaced by [`ExperimentConfig::max_iters`].
    pub solvers: Vec<SolverSpec>,
    /// Falls back to [`ProblemConfig::default_x0`].
    #[serde(default)]
    pub x0: Option<X0Rule>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub max_iters: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Directory holding cached reference values; caching is off when unset.
    #[serde(default)]
    pub reference_cache: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemConfig, solvers: Vec<SolverSpec>, max_iters: usize) -> Self {
        Self {
            problem,
            solvers,
            x0: None,
            seeds: default_seeds(),
            max_iters,
            output_dir: None,
            reference_cache: None,
        }
    }

    pub fn seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn x0(mut self, rule: X0Rule) -> Self {
        self.x0 = Some(rule);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::Config("at least one solver is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("seeds must be distinct".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        Ok(())
    }

    pub fn x0_rule(&self) -> X0Rule {
        self.x0.clone().unwrap_or_else(|| self.problem.default_x0())
    }
}

/// Quantity plotted on the y-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `f(x_t) − f*`.
    Suboptimality,
    /// `‖∇f(x_t)‖`, used when no reference value exists.
    GradNorm,
    /// Values read back from an aggregated CSV, which does not record the metric.
    Value,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Suboptimality => "suboptimality",
            Metric::GradNorm => "gradient norm",
            Metric::Value => "value",
        }
    }
}

/// Pointwise mean, minimum and maximum across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedSeries {
    pub solver_id: String,
    pub metric: Metric,
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub seed_count: usize,
}

impl AggregatedSeries {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

/// Aggregates per-run series of possibly different lengths. Entry `t` uses
/// every run that reached `t`.
pub fn aggregate(solver_id: &str, metric: Metric, runs: &[Vec<f64>]) -> AggregatedSeries {
    let len = runs.iter().map(Vec::len).max().unwrap_or(0);
    let (mut mean, mut min, mut max) = (
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    );
    for t in 0..len {
        let vals: Vec<f64> = runs.iter().filter_map(|r| r.get(t).copied()).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Rounding in the sum can push the mean a hair outside [lo, hi].
        let avg = (vals.iter().sum::<f64>() / vals.len() as f64).clamp(lo, hi);
        mean.push(avg);
        min.push(lo);
        max.push(hi);
    }
    AggregatedSeries {
        solver_id: solver_id.to_string(),
        metric,
        mean,
        min,
        max,
        seed_count: runs.len(),
    }
}

/// Where the reference value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    ClosedForm,
    ReferenceRuns,
    Cache,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub metric: Metric,
    pub f_star: Option<f64>,
    pub f_star_source: Option<ReferenceSource>,
    /// Step sizes picked by grid search, keyed by solver label.
    pub grid_steps: BTreeMap<String, f64>,
    pub series: Vec<AggregatedSeries>,
    pub traces: Vec<Trace>,
    /// Seconds.
    pub wall_time: f64,
}

impl ExperimentResult {
    pub fn series_for(&self, solver_id: &str) -> Option<&AggregatedSeries> {
        self.series.iter().find(|s| s.solver_id == solver_id)
    }

    pub fn traces_for<'a>(&'a self, solver_id: &'a str) -> impl Iterator<Item = &'a Trace> + 'a {
        self.traces.iter().filter(move |t| t.solver_id == solver_id)
    }
}

/// Unique labels: the kind name, suffixed `#k` when a kind appears more than once.
pub fn solver_labels(specs: &[SolverSpec]) -> Vec<String> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let total = specs.iter().filter(|o| o.kind == s.kind).count();
            if total == 1 {
                s.kind.name().to_string()
            } else {
                let k = specs[..=i].iter().filter(|o| o.kind == s.kind).count();
                format!("{}#{k}", s.kind.name())
            }
        })
        .collect()
}

/// Fixed-step kinds that need a step when the objective has no smoothness bound.
fn grid_method(kind: SolverKind) -> Option<GridMethod> {
    match kind {
        SolverKind::Gd => Some(GridMethod::Gd),
        SolverKind::Nag | SolverKind::NagRestart => Some(GridMethod::NagWeak),
        _ => None,
    }
}

/// Fills in missing step sizes by grid search and the weakly convex
/// momentum for NAG without a strong-convexity bound.
fn prepare_specs(
    config: &ExperimentConfig,
    obj: &dyn Objective,
    x0: &[f64],
    labels: &[String],
) -> Result<(Vec<SolverSpec>, BTreeMap<String, f64>)> {
    let mut steps = BTreeMap::new();
    let mut l_hat = None;
    let mut specs = Vec::with_capacity(config.solvers.len());
    for (spec, label) in config.solvers.iter().zip(labels) {
        let mut spec = spec.clone();
        spec.max_iters = config.max_iters;
        let unset = spec.params.l_bar.is_none() && spec.params.step.is_none();
        if let Some(method) = grid_method(spec.kind).filter(|_| unset && obj.smoothness_bound().is_none()) {
            let probe = match l_hat {
                Some(v) => v,
                None => *l_hat.insert(init_estimate(obj, x0, &mut rng::seeded(0))?),
            };
            let step = grid_search_around(obj, x0, probe, config.max_iters, method)?;
            spec.params.step = Some(step);
            steps.insert(label.clone(), step);
        }
        if spec.kind == SolverKind::Nag && spec.params.m_lower.is_none() && obj.strong_convexity_bound().is_none() {
            spec.params.m_lower = Some(0.0);
        }
        specs.push(spec);
    }
    Ok((specs, steps))
}

fn lowest_value(traces: &[Trace]) -> f64 {
    traces
        .iter()
        .flat_map(|t| t.records.iter().flat_map(|r| [r.f_x, r.f_y]))
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min)
}

fn cache_key(config: &ExperimentConfig, specs: &[SolverSpec]) -> String {
    serde_json::json!({
        "problem": config.problem,
        "x0": config.x0_rule(),
        "solvers": specs,
        "seed": config.seeds[0],
        "budget": config.max_iters * REFERENCE_BUDGET_FACTOR,
    })
    .to_string()
}

fn read_cache(path: &Path) -> Result<BTreeMap<String, f64>> {
    if !path.is_file() {
        return Ok(BTreeMap::new());
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}

/// Best value reached by the experiment's solvers when given
/// [`REFERENCE_BUDGET_FACTOR`] times the budget, from the first seed.
fn reference_runs(
    exec: Execution,
    obj: &dyn Objective,
    x0: &[f64],
    specs: &[SolverSpec],
    seed: u64,
    family: &str,
) -> Result<f64> {
    let long: Vec<SolverSpec> = specs
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.max_iters *= REFERENCE_BUDGET_FACTOR;
            s
        })
        .collect();
    let traces = exec
        .map(&long, |s| run_named(s, obj, x0, seed, family))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(lowest_value(&traces))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(config, Execution::default())
}

/// Runs every `(solver, seed)` pair, with randomized solvers once per seed and
/// deterministic ones once (under the first seed), then aggregates per solver.
pub fn run_experiment_with(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult> {
    let start = Instant::now();
    config.validate()?;
    let obj = config.problem.build()?;
    let obj: &dyn Objective = obj.as_ref();
    let x0 = config.x0_rule().point(obj.dim())?;
    let family = config.problem.family();
    let labels = solver_labels(&config.solvers);
    let (specs, grid_steps) = prepare_specs(config, obj, &x0, &labels)?;

    let jobs: Vec<(usize, u64)> = specs
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            let seeds = if s.kind.is_randomized() {
                &config.seeds[..]
            } else {
                &config.seeds[..1]
            };
            seeds.iter().map(move |&seed| (i, seed))
        })
        .collect();
    let mut traces = exec
        .map(&jobs, |&(i, seed)| run_named(&specs[i], obj, &x0, seed, family))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    for (trace, &(i, _)) in traces.iter_mut().zip(&jobs) {
        trace.solver_id = labels[i].clone();
    }

    let (f_star, source) = if let Some(gt) = obj.ground_truth() {
        (Some(gt.f_star), Some(ReferenceSource::ClosedForm))
    } else if matches!(config.problem, ProblemConfig::MatrixFactorization { .. }) {
        (None, None)
    } else {
        let (value, source) = match &config.reference_cache {
            Some(dir) => {
                let path = dir.join(REFERENCE_CACHE_FILE);
                let mut cache = read_cache(&path)?;
                let key = cache_key(config, &specs);
                match cache.get(&key) {
                    Some(&v) => (v, ReferenceSource::Cache),
                    None => {
                        let v = reference_runs(exec, obj, &x0, &specs, config.seeds[0], family)?;
                        cache.insert(key, v);
                        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                        let text = serde_json::to_string_pretty(&cache).map_err(|e| Error::format(&path, e))?;
                        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
                        (v, ReferenceSource::ReferenceRuns)
                    }
                }
            }
            None => (
                reference_runs(exec, obj, &x0, &specs, config.seeds[0], family)?,
                ReferenceSource::ReferenceRuns,
            ),
        };
        (Some(value.min(lowest_value(&traces))), Some(source))
    };

    let metric = if f_star.is_some() {
        Metric::Suboptimality
    } else {
        Metric::GradNorm
    };
    let series = labels
        .iter()
        .map(|label| {
            let runs: Vec<Vec<f64>> = traces
                .iter()
                .filter(|t| &t.solver_id == label)
                .map(|t| match f_star {
                    Some(fs) => t.suboptimality_series(fs),
                    None => t.grad_norm_series(),
                })
                .collect();
            aggregate(label, metric, &runs)
        })
        .collect();

    Ok(ExperimentResult {
        config: config.clone(),
        metric,
        f_star,
        f_star_source: source,
        grid_steps,
        series,
        traces,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(kind: SolverKind) -> SolverSpec {
        SolverSpec::new(kind, 1)
    }

    #[test]
    fn single_run_collapses_the_band() {
        let s = aggregate("gd", Metric::Suboptimality, &[vec![3.0, 2.0, 1.0]]);
        assert_eq!(s.mean, s.min);
        assert_eq!(s.mean, s.max);
        assert_eq!(s.seed_count, 1);
    }

    #[test]
    fn ragged_runs_use_available_entries() {
        let s = aggregate("x", Metric::GradNorm, &[vec![1.0, 2.0], vec![3.0]]);
        assert_eq!(s.mean, vec![2.0, 2.0]);
        assert_eq!(s.min, vec![1.0, 2.0]);
        assert_eq!(s.max, vec![3.0, 2.0]);
    }

    #[test]
    fn gd_on_unit_parabola_converges_in_one_step() {
        let cfg = ExperimentConfig::new(
            ProblemConfig::Quadratic {
                eigenvalues: vec![1.0],
                dim: None,
            },
            vec![SolverSpec::new(SolverKind::Gd, 3).l_bar(1.0)],
            3,
        )
        .seeds(vec![1]);
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.metric, Metric::Suboptimality);
        assert_eq!(r.series[0].mean, vec![0.5, 0.0, 0.0, 0.0]);
        assert_eq!(r.f_star_source, Some(ReferenceSource::ClosedForm));
    }

    #[test]
    fn deterministic_solvers_run_once() {
        let cfg = ExperimentConfig::new(
            ProblemConfig::Quadratic {
                eigenvalues: vec![1.0, 10.0],
                dim: None,
            },
            vec![spec(SolverKind::Gd), spec(SolverKind::NagFree)],
            20,
        );
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.traces_for("gd").count(), 1);
        assert_eq!(r.traces_for("nagfree").count(), 5);
        assert_eq!(r.series_for("nagfree").unwrap().seed_count, 5);
    }

    #[test]
    fn labels_disambiguate_repeated_kinds() {
        let specs = [
            spec(SolverKind::NagFreeRestart),
            spec(SolverKind::Gd),
            spec(SolverKind::NagFreeRestart),
        ];
        assert_eq!(solver_labels(&specs), ["nagfree_restart#1", "gd", "nagfree_restart#2"]);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let p = ProblemConfig::default_for("quadratic").unwrap();
        assert!(ExperimentConfig::new(p.clone(), vec![], 5).validate().is_err());
        let dup = ExperimentConfig::new(p.clone(), vec![spec(SolverKind::Gd)], 5).seeds(vec![1, 1]);
        assert!(dup.validate().is_err());
        assert!(ExperimentConfig::new(p, vec![spec(SolverKind::Gd)], 0)
            .validate()
            .is_err());
    }

    #[test]
    fn cubic_gd_gets_a_grid_searched_step() {
        let cfg = ExperimentConfig::new(
            ProblemConfig::Cubic { dataset: None },
            vec![spec(SolverKind::Gd), spec(SolverKind::Nag)],
            50,
        )
        .seeds(vec![1]);
        let r = run_experiment(&cfg).unwrap();
        assert!(r.grid_steps["gd"] > 0.0 && r.grid_steps["nag"] > 0.0);
        assert_eq!(r.f_star_source, Some(ReferenceSource::ReferenceRuns));
        assert!(r.series.iter().all(|s| s.min.iter().all(|v| *v >= 0.0)));
    }

    #[test]
    fn matrix_factorization_reports_gradient_norm() {
        let cfg = ExperimentConfig::new(
            ProblemConfig::MatrixFactorization {
                ratings: None,
                rows: 6,
                cols: 5,
                rank: 2,
                seed: 1,
            },
            vec![spec(SolverKind::NagFree)],
            30,
        )
        .seeds(vec![1, 2]);
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.metric, Metric::GradNorm);
        assert_eq!(r.f_star, None);
    }

    #[test]
    fn reference_cache_is_reused() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(
            ProblemConfig::LogSumExp {
                n: 8,
                d: 6,
                theta: 0.5,
                eta: 0.1,
                seed: 2,
            },
            vec![spec(SolverKind::NagFree)],
            40,
        )
        .seeds(vec![1]);
        cfg.reference_cache = Some(dir.path().to_path_buf());
        let first = run_experiment(&cfg).unwrap();
        let second = run_experiment(&cfg).unwrap();
        assert_eq!(first.f_star_source, Some(ReferenceSource::ReferenceRuns));
        assert_eq!(second.f_star_source, Some(ReferenceSource::Cache));
        assert_eq!(first.f_star, second.f_star);
        assert!(dir.path().join(REFERENCE_CACHE_FILE).is_file());
    }

    proptest! {
        #[test]
        fn band_orders_pointwise(runs in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 1..20), 1..6)) {
            let s = aggregate("p", Metric::Value, &runs);
            prop_assert_eq!(s.mean.len(), s.min.len());
            prop_assert_eq!(s.max.len(), s.min.len());
            for t in 0..s.len() {
                prop_assert!(s.min[t] <= s.mean[t] && s.mean[t] <= s.max[t]);
            }
        }
    }
}
