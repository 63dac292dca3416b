//! Operation counters used to compare decoder cost.
//!
//! Units follow the usual arithmetic cost model: one addition or subtraction
//! of two integers counts as one addition, one comparison of two metrics as
//! one comparison. Comparing two `n`-bit blocks bit by bit is charged as `n`
//! additions regardless of how the comparison is actually executed.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub additions: u64,
    pub comparisons: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount {
        additions: 0,
        comparisons: 0,
    };

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.additions += n;
    }

    #[inline]
    pub fn cmp(&mut self, n: u64) {
        self.comparisons += n;
    }

    pub fn total(&self) -> u64 {
        self.additions + self.comparisons
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount {
            additions: self.additions + rhs.additions,
            comparisons: self.comparisons + rhs.comparisons,
        }
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.additions += rhs.additions;
        self.comparisons += rhs.comparisons;
    }
}
