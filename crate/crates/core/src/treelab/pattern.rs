use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which functional-equation system handles a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseKind {
    /// `1 < i < j`
    DistinctBoth,
    /// `i = 1 < j`
    OneIsLeaf,
    /// `i = j > 1`
    Equal,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error(
        "pattern (1,1) is excluded: only the two-vertex tree contains it, so it has no \
         generating-function system"
    )]
    OneOne,
    #[error("pattern degrees must be at least 1, got ({0},{1})")]
    ZeroDegree(usize, usize),
    #[error("cannot parse pattern {0:?}; expected \"i,j\"")]
    Parse(String),
}

/// The double-star `(i, j)`: an edge whose endpoints have degrees `i ≤ j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternSpec {
    i: usize,
    j: usize,
}

impl PatternSpec {
    /// Accepts the degrees in either order.
    pub fn new(a: usize, b: usize) -> Result<Self, PatternError> {
        if a == 0 || b == 0 {
            return Err(PatternError::ZeroDegree(a, b));
        }
        let (i, j) = (a.min(b), a.max(b));
        if (i, j) == (1, 1) {
            return Err(PatternError::OneOne);
        }
        Ok(PatternSpec { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn case_kind(&self) -> CaseKind {
        if self.i == self.j {
            CaseKind::Equal
        } else if self.i == 1 {
            CaseKind::OneIsLeaf
        } else {
            CaseKind::DistinctBoth
        }
    }

    pub fn matches(&self, da: usize, db: usize) -> bool {
        (da.min(db), da.max(db)) == (self.i, self.j)
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl FromStr for PatternSpec {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PatternError::Parse(s.to_owned());
        let (a, b) = s.trim().split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        PatternSpec::new(a, b)
    }
}

/// Every pattern `(i, j)` with `1 ≤ i ≤ j ≤ jmax`, except `(1,1)`, in
/// lexicographic order.
pub fn all_patterns(jmax: usize) -> Vec<PatternSpec> {
    (1..=jmax)
        .flat_map(|j| (1..=j).map(move |i| (i, j)))
        .filter_map(|(i, j)| PatternSpec::new(i, j).ok())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}
