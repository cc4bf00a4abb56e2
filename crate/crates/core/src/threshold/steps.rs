use serde::{Deserialize, Serialize};

use super::rates::LevelRates;
use crate::error::{Error, Result};

/// Number of logical steps a computation can run before its success
/// probability drops to one half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxSteps {
    Finite(u64),
    Unbounded,
}

/// `floor(ln 2 / (u + l))`, or `Unbounded` when both rates vanish.
pub fn max_steps(unlocated: f64, located: f64) -> Result<MaxSteps> {
    for (name, v) in [("unlocated", unlocated), ("located", located)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} rate must be in [0,1], got {v}")));
        }
    }
    let total = unlocated + located;
    if total == 0.0 {
        return Ok(MaxSteps::Unbounded);
    }
    Ok(MaxSteps::Finite((std::f64::consts::LN_2 / total).floor() as u64))
}

/// Published effective rates for the Steane code at levels 1 to 5, with
/// memory noise, `alpha = 1.56` and `eta = 4e-4`.
pub const REFERENCE_LEVELS: [(f64, f64); 5] =
    [(4e-4, 8e-3), (1.7e-4, 2e-3), (2.8e-5, 2.1e-4), (7.4e-7, 3.6e-6), (5.3e-10, 1.7e-9)];

/// Published maximum computation lengths for the same rows.
pub const REFERENCE_MAX_STEPS: [f64; 5] = [82.0, 3.3e2, 3.0e3, 1.6e5, 3.1e8];

/// Published resource usage per error-correction round, levels 1 to 5.
pub const REFERENCE_RESOURCES: [f64; 5] = [1.0e3, 8.7e5, 4.5e8, 2.1e11, 9.6e13];

pub fn reference_levels() -> Vec<LevelRates> {
    REFERENCE_LEVELS
        .iter()
        .enumerate()
        .map(|(i, &(u, l))| LevelRates::exact(i as u32 + 1, u, l))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_row() {
        assert_eq!(max_steps(4e-4, 8e-3).unwrap(), MaxSteps::Finite(82));
    }

    #[test]
    fn zero_rates_are_unbounded() {
        assert_eq!(max_steps(0.0, 0.0).unwrap(), MaxSteps::Unbounded);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(max_steps(-1e-3, 0.0).is_err());
        assert!(max_steps(0.0, 2.0).is_err());
    }

    #[test]
    fn reference_rows_are_consistent() {
        for (&(u, l), &n) in REFERENCE_LEVELS.iter().zip(&REFERENCE_MAX_STEPS) {
            let MaxSteps::Finite(k) = max_steps(u, l).unwrap() else { panic!() };
            assert!(((k as f64) / n - 1.0).abs() < 0.05, "{u} {l}: {k} vs {n}");
        }
    }
}
