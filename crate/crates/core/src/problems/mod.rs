//! The objective families used in the experiments.

pub mod cubic;
pub mod dataset;
pub mod logistic;
pub mod logsumexp;
pub mod matfact;
pub mod quadratic;

pub use cubic::{cubic_eta_from_logistic, cubic_reg_objective, CubicReg};
pub use dataset::{parse_libsvm, serialize_libsvm, synthetic_dataset, Dataset};
pub use logistic::{cubic_setup_from_logistic, logistic_objective, Logistic};
pub use logsumexp::{log_sum_exp_objective, random_log_sum_exp, LogSumExp};
pub use matfact::{matrix_factorization_objective, parse_ratings_csv, synthetic_low_rank, MatrixFactorization};
pub use quadratic::{quadratic_from_spectrum, random_quadratic, Quadratic, QuadraticSpec};
