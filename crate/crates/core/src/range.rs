use serde::{Deserialize, Serialize};

use crate::{invalid, Error, Result};

/// Inclusive integer index range `[lo, hi]`, used for matrix rows/columns and
/// coefficient windows. Never empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RangeWire")]
pub struct IndexRange {
    lo: i64,
    hi: i64,
}

#[derive(Deserialize)]
struct RangeWire {
    lo: i64,
    hi: i64,
}

impl TryFrom<RangeWire> for IndexRange {
    type Error = Error;
    fn try_from(w: RangeWire) -> Result<Self> {
        IndexRange::new(w.lo, w.hi)
    }
}

impl IndexRange {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return invalid(format!("index range [{lo}, {hi}] is empty"));
        }
        Ok(Self { lo, hi })
    }

    /// `[0, n)`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn first(n: usize) -> Self {
        assert!(n > 0, "IndexRange::first(0) is empty");
        Self {
            lo: 0,
            hi: n as i64 - 1,
        }
    }

    /// `[-m, m)`, the window mapped onto itself by the flip `k ↦ -k-1`.
    ///
    /// # Panics
    /// If `m == 0`.
    pub fn symmetric(m: usize) -> Self {
        assert!(m > 0, "IndexRange::symmetric(0) is empty");
        Self {
            lo: -(m as i64),
            hi: m as i64 - 1,
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn shifted(&self, k: i64) -> Self {
        Self {
            lo: self.lo + k,
            hi: self.hi + k,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// Drops `k` indices on each side, or `None` if nothing is left.
    pub fn shrink(&self, k: i64) -> Option<Self> {
        Self::new(self.lo + k, self.hi - k).ok()
    }
}

impl std::fmt::Display for IndexRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
