//! Named residual checks, shared by the validation operations and the CLI.

use serde::{Deserialize, Serialize};

/// One residual check.  `required = false` marks diagnostics that are
/// recorded but never fail a report (e.g. commutator norms standing in for
/// compactness at finite dimension).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub required: bool,
}

impl Check {
    pub fn required(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            pass: residual.is_finite() && residual <= threshold,
            required: true,
        }
    }

    pub fn diagnostic(name: impl Into<String>, residual: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold: f64::INFINITY,
            pass: true,
            required: false,
        }
    }

    /// A boolean check reported as residual 0/1.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.5,
            pass: ok,
            required: true,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport { checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.required)
    }

    pub fn max_required_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.required)
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    /// First failing required check, for error messages.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.required && !c.pass)
    }
}
