//! Structured results for identity suites.
//!
//! Every suite returns a [`Report`]: one [`Check`] per verified identity, each
//! with a stable id, a human-readable tag, and a pass/fail status. Failing
//! checks always carry a witness string pinpointing the first counterexample.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A single verified identity or family of identities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    /// Stable machine id, unique within a report (e.g. "zx-straighten/n=5/i=2/j=3").
    pub id: String,
    /// Short descriptive label for the identity family.
    pub tag: String,
    pub status: Status,
    /// First counterexample found; present exactly when `status` is `Fail`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), checks: Vec::new() }
    }

    /// Record an equality-style check: pass when `ok`, else fail with witness.
    pub fn check(&mut self, id: impl Into<String>, tag: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check {
            id: id.into(),
            tag: tag.into(),
            status,
            witness: if ok { None } else { Some(witness()) },
        });
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Absorb another report's checks, prefixing ids to keep them unique.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut check in other.checks {
            check.id = format!("{prefix}/{}", check.id);
            self.checks.push(check);
        }
    }
}
