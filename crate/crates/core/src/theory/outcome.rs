use std::fmt;

use serde::{Deserialize, Serialize};

/// An outcome label: a tuple of atomic labels.
///
/// Sequential and parallel composition concatenate tuples. Tests coming
/// from structural generators (identities, permutations) carry the empty
/// tuple, rendered `*`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome(pub Vec<String>);

impl Outcome {
    pub fn empty() -> Self {
        Outcome(Vec::new())
    }

    pub fn atom(label: impl Into<String>) -> Self {
        Outcome(vec![label.into()])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[String] {
        &self.0
    }

    pub fn join(&self, other: &Outcome) -> Outcome {
        let mut parts = self.0.clone();
        parts.extend(other.0.iter().cloned());
        Outcome(parts)
    }

    /// Reorders components: component `k` of the result is component `layout[k]` of `self`.
    pub fn permuted(&self, layout: &[usize]) -> Outcome {
        Outcome(layout.iter().map(|&k| self.0[k].clone()).collect())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "*");
        }
        write!(f, "{}", self.0.join("."))
    }
}

impl From<&str> for Outcome {
    fn from(label: &str) -> Self {
        Outcome::atom(label)
    }
}
