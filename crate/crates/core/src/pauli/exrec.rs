//! Monte Carlo estimate of the effective rates of the CZ extended rectangle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::RandomNoise;
use super::decoder::EXACT_TIE;
use super::ec::{Classification, Protocol};
use crate::error::{Error, Result};
use crate::noise::OpNoiseTable;
use crate::threshold::LevelRates;

/// Below this many trials a report carries a statistics warning.
pub const MIN_TRIALS: u64 = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub no_error: u64,
    pub logical_x: u64,
    pub logical_z: u64,
    pub logical_y: u64,
    pub located_failure: u64,
}

impl Histogram {
    fn record(mut self, c: Classification) -> Self {
        match c {
            Classification::NoError => self.no_error += 1,
            Classification::LogicalX => self.logical_x += 1,
            Classification::LogicalZ => self.logical_z += 1,
            Classification::LogicalY => self.logical_y += 1,
            Classification::LocatedFailure => self.located_failure += 1,
        }
        self
    }

    fn merge(self, o: Histogram) -> Self {
        Histogram {
            no_error: self.no_error + o.no_error,
            logical_x: self.logical_x + o.logical_x,
            logical_z: self.logical_z + o.logical_z,
            logical_y: self.logical_y + o.logical_y,
            located_failure: self.located_failure + o.located_failure,
        }
    }

    pub fn trials(&self) -> u64 {
        self.no_error + self.unlocated() + self.located_failure
    }

    pub fn unlocated(&self) -> u64 {
        self.logical_x + self.logical_z + self.logical_y
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    hist: Histogram,
    rejections: u64,
    erasures: u64,
    starved: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            hist: self.hist.merge(o.hist),
            rejections: self.rejections + o.rejections,
            erasures: self.erasures + o.erasures,
            starved: self.starved + o.starved,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExRecReport {
    pub table: OpNoiseTable,
    pub trials: u64,
    pub seed: u64,
    pub tie_ratio: f64,
    pub decoder_ratio: f64,
    pub rates: LevelRates,
    pub histogram: Histogram,
    /// Verifier rejections per trial.
    pub mean_rejections: f64,
    /// Erased readouts per trial.
    pub mean_erasures: f64,
    pub starved_trials: u64,
    pub warnings: Vec<String>,
}

/// Extended rectangle under the operation table built from `(p, q)`.
pub fn run_exrec(p: f64, q: f64, memory_noise: bool, trials: u64, seed: u64) -> Result<ExRecReport> {
    run_exrec_with_table(&OpNoiseTable::from_rates(p, q, memory_noise)?, trials, seed, EXACT_TIE)
}

/// Trial `t` draws from its own ChaCha8 stream `t` of `seed`, and counts are
/// summed, so the report does not depend on how trials are scheduled.
pub fn run_exrec_with_table(table: &OpNoiseTable, trials: u64, seed: u64, tie_ratio: f64) -> Result<ExRecReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let protocol = Protocol::for_table(table, tie_ratio)?;
    let tally = (0..trials)
        .into_par_iter()
        .fold(Tally::default, |acc, t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let out = protocol.exrec_trial(table, &mut RandomNoise { rng });
            Tally {
                hist: acc.hist.record(out.classification),
                rejections: acc.rejections + out.rejections,
                erasures: acc.erasures + out.erasures as u64,
                starved: acc.starved + out.starved as u64,
            }
        })
        .reduce(Tally::default, Tally::merge);
    let h = tally.hist;
    let rates = LevelRates::from_counts(1, h.unlocated(), h.located_failure, trials);
    let mut warnings = Vec::new();
    if trials < MIN_TRIALS {
        warnings.push(format!("only {trials} trials; rates are statistically weak below {MIN_TRIALS}"));
    }
    if tally.starved > 0 {
        warnings.push(format!("{} trials exhausted ancilla verification attempts", tally.starved));
    }
    Ok(ExRecReport {
        table: *table,
        trials,
        seed,
        tie_ratio,
        decoder_ratio: protocol.decoder().ratio(),
        rates,
        histogram: h,
        mean_rejections: tally.rejections as f64 / trials as f64,
        mean_erasures: tally.erasures as f64 / trials as f64,
        starved_trials: tally.starved,
        warnings,
    })
}
