use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{Space, DEFAULT_ENUM_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

impl Verdict {
    /// Fail dominates Undecided, which dominates Pass.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Pass,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Undecided => 2,
        }
    }
}

/// Budgets and identifiers shared by every operation and echoed in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Minimum number of one-step extensions a reduct must keep.
    pub mu: usize,
    pub depth_budget: usize,
    pub retries: usize,
    pub enum_cap: usize,
    pub seed: u64,
    pub instance: String,
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span_cap: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mu: 1,
            depth_budget: 8,
            retries: 3,
            enum_cap: DEFAULT_ENUM_CAP,
            seed: 0,
            instance: String::new(),
            instance_digest: String::new(),
            span_cap: None,
        }
    }
}

impl RunConfig {
    pub fn for_space(space: &Space) -> Self {
        let ground = space.model().ground();
        RunConfig {
            instance: ground.kind.to_string(),
            instance_digest: ground.digest(),
            ..RunConfig::default()
        }
    }

    pub fn with_mu(mut self, mu: usize) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub verdict: Verdict,
    pub witness: Value,
    pub coverage: f64,
    pub details: Value,
    pub config: RunConfig,
}

impl Report {
    pub fn new(check: impl Into<String>, verdict: Verdict, config: &RunConfig) -> Self {
        Report {
            check: check.into(),
            verdict,
            witness: Value::Null,
            coverage: 1.0,
            details: Value::Null,
            config: config.clone(),
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_coverage(mut self, coverage: f64) -> Self {
        self.coverage = coverage;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
