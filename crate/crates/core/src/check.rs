//! Named pass/fail findings with role-based anchors, witnesses and the
//! exact values they certify.

use crate::algebra::Outcome;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub outcome: Outcome,
    /// exact values recorded alongside the verdict, in insertion order
    pub values: Vec<(String, String)>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, outcome: Outcome) -> Self {
        Check { name: name.into(), anchor: anchor.into(), outcome, values: Vec::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.values.push((key.into(), value.into()));
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// `Ok` if `cond`, otherwise the lazily built witness.
pub fn ensure(cond: bool, witness: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

/// The first failure of a sequence of outcomes.
pub fn first_failure(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
    outcomes.into_iter().find(|o| o.is_err()).unwrap_or(Ok(()))
}
