//! Structured results for verification suites: one record per check,
//! aggregated into a suite report that passes iff every check passes.
//! Serialization is deterministic for a given configuration and seed
//! (`wall_ms` stays 0 unless timing is explicitly requested).

use serde::Serialize;

/// Where a check's expectation comes from: a proven operator identity, an
/// independent numerical oracle, an analytic bound, a nonnegativity
/// statement, or a deliberately injected fault that must be caught.
pub const PROVENANCE_IDENTITY: &str = "identity";
pub const PROVENANCE_ORACLE: &str = "oracle";
pub const PROVENANCE_BOUND: &str = "bound";
pub const PROVENANCE_POSITIVITY: &str = "positivity";
pub const PROVENANCE_CONTROL: &str = "control";

/// One verification check: what ran, on what inputs, what the expectation
/// was, and how far off the result came (exact checks report a residual
/// witness, numeric checks a margin).
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: String,
    pub expected_provenance: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub pass: bool,
}

impl CheckRecord {
    /// Exact check: passes iff the residual witness is empty.
    pub fn exact(
        name: impl Into<String>,
        inputs: impl Into<String>,
        provenance: &'static str,
        witness: Option<String>,
    ) -> Self {
        let pass = witness.is_none();
        CheckRecord {
            name: name.into(),
            inputs: inputs.into(),
            expected_provenance: provenance,
            residual: Some(witness.unwrap_or_else(|| "0".into())),
            margin: None,
            pass,
        }
    }

    /// Numeric check: records the measured margin and whether it clears
    /// the stated requirement.
    pub fn numeric(
        name: impl Into<String>,
        inputs: impl Into<String>,
        provenance: &'static str,
        margin: f64,
        pass: bool,
    ) -> Self {
        CheckRecord {
            name: name.into(),
            inputs: inputs.into(),
            expected_provenance: provenance,
            residual: None,
            margin: Some(margin),
            pass,
        }
    }
}

/// A suite run: ordered check records and the conjunction of their
/// verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub wall_ms: u64,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            checks: Vec::new(),
            pass: true,
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}
