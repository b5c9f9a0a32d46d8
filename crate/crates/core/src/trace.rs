use serde::{Deserialize, Serialize};

/// Per-iteration telemetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub f_x: f64,
    pub f_y: f64,
    pub grad_norm: f64,
    pub c_t: Option<f64>,
    pub m_t: Option<f64>,
    #[serde(rename = "L_t")]
    pub l_t: Option<f64>,
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub solver_id: String,
    pub problem_id: String,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
    /// Seconds.
    pub wall_time: f64,
    /// Set when the run was aborted on a non-finite or exploding iterate.
    pub diverged: bool,
    /// First `t` whose gradient norm fell to the stopping tolerance.
    pub converged_at: Option<usize>,
}

impl Trace {
    pub fn new(solver_id: impl Into<String>, problem_id: impl Into<String>, seed: u64) -> Self {
        Self {
            solver_id: solver_id.into(),
            problem_id: problem_id.into(),
            seed,
            records: Vec::new(),
            wall_time: 0.0,
            diverged: false,
            converged_at: None,
        }
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn final_value(&self) -> Option<f64> {
        self.last().map(|r| r.f_x)
    }

    /// `f(x_t) − f_star` for every record.
    pub fn suboptimality_series(&self, f_star: f64) -> Vec<f64> {
        self.records.iter().map(|r| r.f_x - f_star).collect()
    }

    pub fn grad_norm_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.grad_norm).collect()
    }

    /// Monotone `t` and nonnegative telemetry.
    pub fn is_well_formed(&self) -> bool {
        !self.records.is_empty()
            && self.records.windows(2).all(|w| w[0].t < w[1].t)
            && self.records.iter().all(|r| {
                r.grad_norm >= 0.0
                    && r.c_t.is_none_or(|c| c >= 0.0)
                    && r.m_t.is_none_or(|m| m > 0.0)
                    && r.l_t.is_none_or(|l| l > 0.0)
            })
    }
}
