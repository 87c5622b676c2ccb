//! Check reports shared by the invariant suites: each check records what was
//! compared, the observed residual and the tolerance it had to meet.

use serde::Serialize;

/// Outcome of one numeric check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `residual ≤ tolerance`. A tolerance of zero demands
    /// bit-exact agreement.
    pub fn residual(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }

    /// Check that must be at least `bound` (e.g. a frozen probability floor).
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            residual: value,
            tolerance: bound,
            passed: value >= bound,
        }
    }
}

/// A labelled batch of checks.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub label: String,
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Largest residual among residual-style checks.
    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}
