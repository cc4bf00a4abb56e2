use serde::{Deserialize, Serialize};

use super::rates::LevelRates;
use super::search::SATURATION;
use crate::error::{Error, Result};
use crate::noise::{OpNoiseTable, OpRates};
use crate::pauli::{run_exrec_with_table, EXACT_TIE};
use crate::stats::{wilson, Z95};

/// One monomial `coeff * u^u_power * l^l_power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub u_power: u32,
    pub l_power: u32,
    pub coeff: f64,
}

/// Polynomial map from level-L rates `(u, l)` to level-(L+1) rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelMapCoeffs {
    pub unlocated: Vec<Term>,
    pub located: Vec<Term>,
}

impl LevelMapCoeffs {
    /// Rejects constant terms and negative or non-finite coefficients, so
    /// that `(0, 0)` is fixed and outputs are nonnegative.
    pub fn new(unlocated: Vec<Term>, located: Vec<Term>) -> Result<Self> {
        for t in unlocated.iter().chain(&located) {
            if t.u_power == 0 && t.l_power == 0 {
                return Err(Error::Domain("level map polynomials may not have a constant term".into()));
            }
            if !(t.coeff >= 0.0 && t.coeff.is_finite()) {
                return Err(Error::Domain(format!("level map coefficient must be finite and >= 0, got {}", t.coeff)));
            }
        }
        Ok(LevelMapCoeffs { unlocated, located })
    }

    pub fn apply(&self, u: f64, l: f64) -> (f64, f64) {
        let eval = |terms: &[Term]| {
            terms
                .iter()
                .map(|t| t.coeff * u.powi(t.u_power as i32) * l.powi(t.l_power as i32))
                .sum::<f64>()
                .min(1.0)
        };
        (eval(&self.unlocated), eval(&self.located))
    }
}

/// How rates at one level determine the next.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum LevelMap {
    /// Rerun the level-1 simulation with every operation failing at the
    /// level's effective rates.
    SelfSimilar,
    External(LevelMapCoeffs),
}

/// Every operation located at `l`, with independent X and Z at `u / 2`.
pub fn self_similar_table(u: f64, l: f64) -> Result<OpNoiseTable> {
    for (name, v) in [("unlocated", u), ("located", l)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} rate must be in [0,1], got {v}")));
        }
    }
    let r = OpRates { located: l, x: u / 2.0, z: u / 2.0 };
    Ok(OpNoiseTable { memory: r, hadamard: r, cz: r, plus_prep: r, x_meas: r, memory_noise_enabled: true })
}

/// Seed of the simulation producing level `level`.
pub fn level_seed(seed: u64, level: u32) -> u64 {
    seed.wrapping_add((level as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Trials run first so that a saturated level is recognized cheaply.
pub const PILOT_TRIALS: u64 = 256;

/// Rates of the exRec under `table`, labelled `level`. When the first
/// `PILOT_TRIALS` trials already show saturation at 95% confidence they
/// stand in for the full run; they are the same trials the full run starts
/// with.
pub fn run_level(table: &OpNoiseTable, level: u32, trials: u64, seed: u64, tie_ratio: f64) -> Result<LevelRates> {
    if trials > PILOT_TRIALS {
        let pilot = run_exrec_with_table(table, PILOT_TRIALS, seed, tie_ratio)?;
        let failed = pilot.histogram.unlocated() + pilot.histogram.located_failure;
        if wilson(failed, PILOT_TRIALS, Z95).0 >= SATURATION {
            return Ok(LevelRates { level, ..pilot.rates });
        }
    }
    let report = run_exrec_with_table(table, trials, seed, tie_ratio)?;
    Ok(LevelRates { level, ..report.rates })
}

/// Rates one level up. The self-similar map runs `trials` exRec trials.
pub fn level_map(rates: &LevelRates, map: &LevelMap, trials: u64, seed: u64) -> Result<LevelRates> {
    let next = rates.level + 1;
    if rates.unlocated == 0.0 && rates.located == 0.0 {
        return Ok(LevelRates::exact(next, 0.0, 0.0));
    }
    match map {
        LevelMap::SelfSimilar => {
            let table = self_similar_table(rates.unlocated, rates.located)?;
            run_level(&table, next, trials, level_seed(seed, next), EXACT_TIE)
        }
        LevelMap::External(c) => {
            let (u, l) = c.apply(rates.unlocated, rates.located);
            Ok(LevelRates::exact(next, u, l))
        }
    }
}

/// Applies `map` until `levels` levels are known, stopping early once the
/// rates saturate at `saturation` or more.
pub fn concatenate(
    level1: LevelRates,
    map: &LevelMap,
    levels: u32,
    trials: u64,
    seed: u64,
    saturation: f64,
) -> Result<Vec<LevelRates>> {
    let mut out = vec![level1];
    while out.len() < levels as usize {
        let last = out[out.len() - 1];
        if last.total() >= saturation {
            break;
        }
        out.push(level_map(&last, map, trials, seed)?);
    }
    Ok(out)
}
