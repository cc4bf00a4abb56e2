//! Concatenation-level rate maps, threshold search and resource accounting.

mod map;
mod rates;
mod resources;
mod search;
mod steps;

pub use map::{concatenate, level_map, level_seed, run_level, self_similar_table, LevelMap, LevelMapCoeffs, Term, PILOT_TRIALS};
pub use rates::LevelRates;
pub use resources::{count_resources, verifier_acceptance, Attempts, FactoryCosts, ResourceReport, ResourceTally};
pub use search::{
    bisect_threshold, is_below_threshold, judge, probe, sweep, Probe, SweepPoint, ThresholdConfig, ThresholdPoint,
    ThresholdSearch, Verdict, MAX_PROBES, SATURATION,
};
pub use steps::{
    max_steps, reference_levels, MaxSteps, REFERENCE_LEVELS, REFERENCE_MAX_STEPS, REFERENCE_RESOURCES,
};
