use serde::{Deserialize, Serialize};

use crate::stats::{wilson, Z95};

/// Effective unlocated and located error rates at one concatenation level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRates {
    pub level: u32,
    pub unlocated: f64,
    pub located: f64,
    /// 95% Wilson bounds; degenerate when the rates are exact inputs.
    pub unlocated_ci: (f64, f64),
    pub located_ci: (f64, f64),
    /// Trials behind the estimate; zero for exact inputs.
    pub trials: u64,
}

impl LevelRates {
    pub fn exact(level: u32, unlocated: f64, located: f64) -> Self {
        LevelRates {
            level,
            unlocated,
            located,
            unlocated_ci: (unlocated, unlocated),
            located_ci: (located, located),
            trials: 0,
        }
    }

    pub fn from_counts(level: u32, unlocated: u64, located: u64, trials: u64) -> Self {
        let n = trials.max(1) as f64;
        LevelRates {
            level,
            unlocated: unlocated as f64 / n,
            located: located as f64 / n,
            unlocated_ci: wilson(unlocated, trials, Z95),
            located_ci: wilson(located, trials, Z95),
            trials,
        }
    }

    pub fn total(&self) -> f64 {
        self.unlocated + self.located
    }
}
