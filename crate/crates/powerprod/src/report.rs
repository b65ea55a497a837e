//! Machine-readable verification reports shared by the sweep runners and
//! the command-line front end.

use serde::Serialize;

/// Outcome of one verification sweep: what was run, over which parameter
/// ranges, and the first counterexample if anything failed.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: String,
    pub checked: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SuiteReport {
    pub fn pass(suite: &str, params: impl Into<String>, checked: u64) -> Self {
        Self {
            suite: suite.to_string(),
            params: params.into(),
            checked,
            passed: true,
            counterexample: None,
        }
    }

    pub fn fail(
        suite: &str,
        params: impl Into<String>,
        checked: u64,
        counterexample: impl Into<String>,
    ) -> Self {
        Self {
            suite: suite.to_string(),
            params: params.into(),
            checked,
            passed: false,
            counterexample: Some(counterexample.into()),
        }
    }
}
