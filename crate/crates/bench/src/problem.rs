//! Problem registry: a serializable description of each objective family and
//! the code that builds it, including dataset lookup.

use crate::error::{Error, Result};
use nagfree_core::objective::Objective;
use nagfree_core::problems::{
    cubic_eta_from_logistic, cubic_reg_objective, cubic_setup_from_logistic, logistic_objective,
    matrix_factorization_objective, parse_libsvm, parse_ratings_csv, random_log_sum_exp, synthetic_low_rank, Dataset,
    Quadratic,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable that overrides the dataset directory.
pub const DATA_DIR_VAR: &str = "NAGFREE_DATA_DIR";

/// Bundled 200×20 sparse classification set used by the logistic and cubic problems.
pub const DEFAULT_DATASET: &str = "synthetic_200x20.libsvm";

/// Regularization used for logistic regression when none is given.
pub const DEFAULT_LOGISTIC_ETA: f64 = 1e-3;

/// Noise scale of the synthetic matrix-factorization target.
pub const MATFACT_NOISE: f64 = 0.1;

pub const FAMILIES: [&str; 5] = ["quadratic", "logsumexp", "logistic", "cubic", "matfact"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum ProblemConfig {
    /// `½xᵀdiag(λ)x`. With `dim` set and three eigenvalues `(a, b, c)`, the
    /// spectrum is `(a, b, …, b, c)` of length `dim`.
    #[serde(rename = "quadratic")]
    Quadratic {
        eigenvalues: Vec<f64>,
        #[serde(default)]
        dim: Option<usize>,
    },
    /// Seeded Gaussian `A ∈ ℝ^{n×d}` and `b`.
    #[serde(rename = "logsumexp")]
    LogSumExp {
        n: usize,
        d: usize,
        theta: f64,
        eta: f64,
        seed: u64,
    },
    #[serde(rename = "logistic")]
    Logistic {
        #[serde(default)]
        dataset: Option<String>,
        eta: f64,
    },
    /// Cubic regularization built from the logistic loss at the origin.
    #[serde(rename = "cubic")]
    Cubic {
        #[serde(default)]
        dataset: Option<String>,
    },
    /// Ratings CSV when `ratings` is set, otherwise a seeded low-rank
    /// `rows×cols` target.
    #[serde(rename = "matfact")]
    MatrixFactorization {
        #[serde(default)]
        ratings: Option<String>,
        rows: usize,
        cols: usize,
        rank: usize,
        seed: u64,
    },
}

/// Starting point rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Rule {
    Zeros,
    Ones,
    /// I.i.d. uniform entries in `[lo, hi]`, drawn once from `seed`.
    Uniform {
        lo: f64,
        hi: f64,
        seed: u64,
    },
    Explicit(Vec<f64>),
}

impl X0Rule {
    pub fn point(&self, dim: usize) -> Result<Vec<f64>> {
        Ok(match self {
            X0Rule::Zeros => vec![0.0; dim],
            X0Rule::Ones => vec![1.0; dim],
            X0Rule::Uniform { lo, hi, seed } => {
                if !(lo <= hi) {
                    return Err(Error::Config(format!("uniform x0 needs lo ≤ hi, got [{lo}, {hi}]")));
                }
                nagfree_core::rng::uniform_vec(&mut nagfree_core::rng::stream(*seed, 0x3f), dim, *lo, *hi)
            }
            X0Rule::Explicit(x) => {
                if x.len() != dim {
                    return Err(Error::Config(format!(
                        "explicit x0 has length {}, problem has dim {dim}",
                        x.len()
                    )));
                }
                x.clone()
            }
        })
    }
}

/// The directory searched for datasets: `$NAGFREE_DATA_DIR`, else the bundled `data/`.
pub fn data_dir() -> PathBuf {
    match std::env::var_os(DATA_DIR_VAR) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => Path::new(env!("CARGO_MANIFEST_DIR")).join("data"),
    }
}

/// Resolves a dataset name: an existing path is used as is, anything else is
/// looked up in [`data_dir`].
pub fn resolve_dataset(name: &str) -> Result<PathBuf> {
    let direct = PathBuf::from(name);
    if direct.is_file() {
        return Ok(direct);
    }
    let joined = data_dir().join(name);
    if joined.is_file() {
        Ok(joined)
    } else {
        Err(Error::MissingFile(joined))
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a LIBSVM dataset by name or path.
pub fn load_libsvm(name: &str) -> Result<Dataset> {
    let path = resolve_dataset(name)?;
    let mut data = parse_libsvm(&read_text(&path)?).map_err(|e| Error::format(&path, e))?;
    data.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(data)
}

impl ProblemConfig {
    /// Desk-scale defaults for a family name from [`FAMILIES`].
    pub fn default_for(family: &str) -> Result<Self> {
        Ok(match family {
            "quadratic" => ProblemConfig::Quadratic {
                eigenvalues: vec![1.0, 5.0, 1e4],
                dim: None,
            },
            "logsumexp" => ProblemConfig::LogSumExp {
                n: 60,
                d: 60,
                theta: 0.1,
                eta: 0.1,
                seed: 0,
            },
            "logistic" => ProblemConfig::Logistic {
                dataset: None,
                eta: DEFAULT_LOGISTIC_ETA,
            },
            "cubic" => ProblemConfig::Cubic { dataset: None },
            "matfact" => ProblemConfig::MatrixFactorization {
                ratings: None,
                rows: 40,
                cols: 60,
                rank: 5,
                seed: 0,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown problem {other:?}; expected one of {}",
                    FAMILIES.join(", ")
                )))
            }
        })
    }

    pub fn family(&self) -> &'static str {
        match self {
            ProblemConfig::Quadratic { .. } => "quadratic",
            ProblemConfig::LogSumExp { .. } => "logsumexp",
            ProblemConfig::Logistic { .. } => "logistic",
            ProblemConfig::Cubic { .. } => "cubic",
            ProblemConfig::MatrixFactorization { .. } => "matfact",
        }
    }

    /// Start used when the experiment does not specify one.
    pub fn default_x0(&self) -> X0Rule {
        match self {
            ProblemConfig::Quadratic { .. } => X0Rule::Ones,
            ProblemConfig::MatrixFactorization { seed, .. } => X0Rule::Uniform {
                lo: 0.0,
                hi: 0.1,
                seed: *seed,
            },
            _ => X0Rule::Zeros,
        }
    }

    /// Full quadratic spectrum after `dim` expansion.
    pub fn quadratic_spectrum(eigenvalues: &[f64], dim: Option<usize>) -> Result<Vec<f64>> {
        match dim {
            None => Ok(eigenvalues.to_vec()),
            Some(d) if d == eigenvalues.len() => Ok(eigenvalues.to_vec()),
            Some(d) if eigenvalues.len() == 3 && d >= 2 => {
                let mut out = vec![eigenvalues[1]; d];
                out[0] = eigenvalues[0];
                out[d - 1] = eigenvalues[2];
                Ok(out)
            }
            Some(d) => Err(Error::Config(format!(
                "dim {d} needs exactly three eigenvalues to expand, got {}",
                eigenvalues.len()
            ))),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Objective>> {
        Ok(match self {
            ProblemConfig::Quadratic { eigenvalues, dim } => {
                Box::new(Quadratic::diagonal(&Self::quadratic_spectrum(eigenvalues, *dim)?)?)
            }
            ProblemConfig::LogSumExp { n, d, theta, eta, seed } => {
                Box::new(random_log_sum_exp(*n, *d, *theta, *eta, *seed)?)
            }
            ProblemConfig::Logistic { dataset, eta } => {
                let data = load_libsvm(dataset.as_deref().unwrap_or(DEFAULT_DATASET))?;
                Box::new(logistic_objective(data, *eta)?)
            }
            ProblemConfig::Cubic { dataset } => {
                let data = load_libsvm(dataset.as_deref().unwrap_or(DEFAULT_DATASET))?;
                let (g, h) = cubic_setup_from_logistic(&data)?;
                let eta = cubic_eta_from_logistic(&h, data.len());
                Box::new(cubic_reg_objective(g, h, eta)?)
            }
            ProblemConfig::MatrixFactorization {
                ratings,
                rows,
                cols,
                rank,
                seed,
            } => {
                let target = match ratings {
                    Some(name) => {
                        let path = resolve_dataset(name)?;
                        parse_ratings_csv(&read_text(&path)?, None).map_err(|e| Error::format(&path, e))?
                    }
                    None => synthetic_low_rank(*rows, *cols, *rank, MATFACT_NOISE, *seed),
                };
                Box::new(matrix_factorization_objective(target, *rank)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nagfree_core::problems::{serialize_libsvm, synthetic_dataset};

    #[test]
    fn bundled_dataset_is_the_seeded_synthetic_set() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(DEFAULT_DATASET);
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, serialize_libsvm(&synthetic_dataset(200, 20, 0.5, 7)));
    }

    #[test]
    fn every_family_builds() {
        for family in FAMILIES {
            let p = ProblemConfig::default_for(family).unwrap();
            assert_eq!(p.family(), family);
            let f = p.build().unwrap();
            let x0 = p.default_x0().point(f.dim()).unwrap();
            assert!(f.value(&x0).is_finite());
        }
        assert!(matches!(ProblemConfig::default_for("svm"), Err(Error::Config(_))));
    }

    #[test]
    fn spectrum_expansion() {
        let s = ProblemConfig::quadratic_spectrum(&[1.0, 5.0, 1e4], Some(5)).unwrap();
        assert_eq!(s, vec![1.0, 5.0, 5.0, 5.0, 1e4]);
        assert!(ProblemConfig::quadratic_spectrum(&[1.0, 2.0], Some(5)).is_err());
    }

    #[test]
    fn missing_dataset_names_the_path() {
        let err = ProblemConfig::Logistic {
            dataset: Some("no_such_file.libsvm".into()),
            eta: 0.1,
        }
        .build()
        .err()
        .unwrap();
        assert!(err.to_string().contains("no_such_file.libsvm"));
    }

    #[test]
    fn config_round_trips_through_json() {
        let p = ProblemConfig::default_for("matfact").unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"family\":\"matfact\""));
        assert_eq!(serde_json::from_str::<ProblemConfig>(&text).unwrap(), p);
    }

    #[test]
    fn uniform_start_is_fixed_by_its_seed() {
        let rule = X0Rule::Uniform {
            lo: 0.0,
            hi: 0.1,
            seed: 3,
        };
        let a = rule.point(7).unwrap();
        assert_eq!(a, rule.point(7).unwrap());
        assert!(a.iter().all(|v| (0.0..=0.1).contains(v)));
        assert!(X0Rule::Explicit(vec![1.0]).point(2).is_err());
    }
}
