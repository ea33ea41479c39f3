use std::fmt;

use serde::{Deserialize, Serialize};

/// The automaton class a structure function was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SfClass {
    Exact,
    SingleRun,
    MultiRun,
}

impl fmt::Display for SfClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SfClass::Exact => "exact",
            SfClass::SingleRun => "single-run",
            SfClass::MultiRun => "multi-run",
        })
    }
}

/// `(h(0), …, h(n))`: for each `m`, the fewest states of an automaton in the
/// class that accepts the word and at most `b^m` strings of its length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFunction {
    pub class: SfClass,
    pub values: Vec<usize>,
}

impl StructureFunction {
    /// Word length `n`.
    pub fn word_len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self, m: usize) -> usize {
        self.values[m]
    }

    /// The converse function `g(m) = h(n - m)`.
    pub fn g(&self, m: usize) -> usize {
        self.values[self.word_len() - m]
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|p| p[0] >= p[1])
    }

    /// `1 <= h(m) <= n - m + 1` for every `m`.
    pub fn within_linear_bound(&self) -> bool {
        let n = self.word_len();
        self.values
            .iter()
            .enumerate()
            .all(|(m, &h)| (1..=n - m + 1).contains(&h))
    }

    /// Values as a space-separated string, e.g. `3 3 2 2 1`.
    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
