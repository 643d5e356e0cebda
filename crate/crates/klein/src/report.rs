//! Check reports shared by the axiom checkers.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::exactlin::Scalar;

/// Witnesses kept per report; the total count is always exact.
pub const MAX_WITNESSES: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Which law failed, e.g. `associativity`.
    pub law: String,
    /// Basis elements the law was evaluated on.
    pub inputs: Vec<String>,
    /// Output coordinate where the two sides differ.
    pub coordinate: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
    /// Extra context such as a full residual vector.
    pub detail: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on ({}): coefficient of {} is {} vs {}",
            self.law,
            self.inputs.join(", "),
            self.coordinate,
            self.lhs,
            self.rhs
        )?;
        if let Some(d) = &self.detail {
            write!(f, " [{d}]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub failures_by_law: BTreeMap<String, usize>,
    pub witnesses: Vec<Violation>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            checked: 0,
            failures: 0,
            failures_by_law: BTreeMap::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn record(&mut self, v: Violation) {
        self.failures += 1;
        *self.failures_by_law.entry(v.law.clone()).or_default() += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(v);
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        for (law, k) in other.failures_by_law {
            *self.failures_by_law.entry(law).or_default() += k;
        }
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
    }

    pub fn has_law(&self, law: &str) -> bool {
        self.count(law) > 0
    }

    pub fn count(&self, law: &str) -> usize {
        self.failures_by_law.get(law).copied().unwrap_or(0)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{}: {} ({} checked, {} failed)", self.name, status, self.checked, self.failures)?;
        for w in &self.witnesses {
            write!(f, "\n  {w}")?;
        }
        if self.failures > self.witnesses.len() {
            write!(f, "\n  ... {} more", self.failures - self.witnesses.len())?;
        }
        Ok(())
    }
}
