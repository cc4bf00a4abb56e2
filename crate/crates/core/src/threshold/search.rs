use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::map::{level_map, level_seed, run_level, LevelMap};
use super::rates::LevelRates;
use crate::error::{Error, Result};
use crate::noise::{build_table, LossConvention, NoiseParams};
use crate::pauli::EXACT_TIE;

/// Total failure rate at which a level counts as saturated.
pub const SATURATION: f64 = 0.5;

/// Bisection probes allowed before giving up on the tolerance.
pub const MAX_PROBES: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    /// Levels compared, level 1 included.
    pub levels: u32,
    pub trials: u64,
    pub seed: u64,
    pub memory_noise: bool,
    pub convention: LossConvention,
    pub map: LevelMap,
    pub tie_ratio: f64,
    /// Times an inconclusive probe is rerun with four times the trials.
    pub escalations: u32,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            levels: 3,
            trials: 100_000,
            seed: 1,
            memory_noise: true,
            convention: LossConvention::PaperLiteral,
            map: LevelMap::SelfSimilar,
            tie_ratio: EXACT_TIE,
            escalations: 2,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 3 {
            return Err(Error::Domain(format!("at least 3 levels are needed, got {}", self.levels)));
        }
        if self.trials == 0 {
            return Err(Error::Domain("at least one trial is required".into()));
        }
        if !(self.tie_ratio >= 1.0) {
            return Err(Error::Domain(format!("tie ratio must be >= 1, got {}", self.tie_ratio)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Below,
    Above,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub alpha: f64,
    pub eta: f64,
    /// Physical rates, absent when the table could not be built.
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub verdict: Verdict,
    pub levels: Vec<LevelRates>,
    pub trials: u64,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Trend {
    Down,
    Up,
    Unclear,
}

fn trend(rate: f64, ci: (f64, f64), next: f64, next_ci: (f64, f64)) -> Trend {
    if (rate == 0.0 && next == 0.0) || next_ci.1 < ci.0 {
        Trend::Down
    } else if next_ci.0 > ci.1 {
        Trend::Up
    } else {
        Trend::Unclear
    }
}

/// Judges a run of levels: below when both rates fall with separated
/// confidence intervals at every step, above when any rate rises or
/// saturates.
pub fn judge(levels: &[LevelRates], wanted: u32) -> (Verdict, String) {
    if let Some(s) = levels.iter().find(|r| r.total() >= SATURATION) {
        return (Verdict::Above, format!("level {} saturated at {:.3}", s.level, s.total()));
    }
    if levels.len() < wanted as usize {
        return (Verdict::Inconclusive, format!("only {} of {wanted} levels", levels.len()));
    }
    let mut unclear = None;
    for w in levels.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let tu = trend(a.unlocated, a.unlocated_ci, b.unlocated, b.unlocated_ci);
        let tl = trend(a.located, a.located_ci, b.located, b.located_ci);
        if tu == Trend::Up || tl == Trend::Up {
            return (Verdict::Above, format!("rates grow from level {} to {}", a.level, b.level));
        }
        if (tu, tl) != (Trend::Down, Trend::Down) && unclear.is_none() {
            unclear = Some(format!("intervals overlap between levels {} and {}", a.level, b.level));
        }
    }
    match unclear {
        Some(why) => (Verdict::Inconclusive, why),
        None => (Verdict::Below, "both rates fall at every level".into()),
    }
}

/// Single probe at `cfg.trials` trials per level.
pub fn is_below_threshold(alpha: f64, eta: f64, cfg: &ThresholdConfig) -> Result<Probe> {
    cfg.validate()?;
    let params = NoiseParams::new(alpha, eta, cfg.convention)?;
    let mut probe = Probe {
        alpha,
        eta,
        p: Some(params.p),
        q: Some(params.q),
        verdict: Verdict::Above,
        levels: Vec::new(),
        trials: cfg.trials,
        reason: String::new(),
    };
    let table = match build_table(&params, cfg.memory_noise) {
        Ok(t) => t,
        Err(Error::Domain(why)) => {
            probe.reason = format!("physical rates out of range: {why}");
            return Ok(probe);
        }
        Err(e) => return Err(e),
    };
    // a rising or saturated level already settles the verdict
    let mut levels = vec![run_level(&table, 1, cfg.trials, level_seed(cfg.seed, 1), cfg.tie_ratio)?];
    while levels.len() < cfg.levels as usize && judge(&levels, cfg.levels).0 != Verdict::Above {
        let next = level_map(&levels[levels.len() - 1], &cfg.map, cfg.trials, cfg.seed)?;
        levels.push(next);
    }
    probe.levels = levels;
    let (verdict, reason) = judge(&probe.levels, cfg.levels);
    probe.verdict = verdict;
    probe.reason = reason;
    Ok(probe)
}

/// Probe that reruns inconclusive verdicts with four times the trials, up
/// to `cfg.escalations` times. The seed is kept, so reruns extend the same
/// trial streams.
pub fn probe(alpha: f64, eta: f64, cfg: &ThresholdConfig) -> Result<Probe> {
    let mut c = cfg.clone();
    let mut p = is_below_threshold(alpha, eta, &c)?;
    for _ in 0..cfg.escalations {
        if p.verdict != Verdict::Inconclusive {
            break;
        }
        c.trials = c.trials.saturating_mul(4);
        p = is_below_threshold(alpha, eta, &c)?;
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub alpha: f64,
    pub eta_threshold: f64,
    /// Verified below threshold at the low end and above at the high end.
    pub bracket: (f64, f64),
    pub levels_tested: u32,
    pub probes: u32,
    /// Bisection stopped early on a probe that stayed inconclusive.
    pub unresolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ThresholdSearch {
    Found(ThresholdPoint),
    /// Not below threshold even at the lowest loss tried.
    NoThreshold { alpha: f64, eta: f64, verdict: Verdict, reason: String },
}

/// Bisects on `eta` between `bounds` until the bracket is narrower than
/// `rel_tol` times its upper end. The midpoint is geometric while the ends
/// are more than a factor 4 apart; from a zero lower end it steps down a
/// decade at a time.
pub fn bisect_threshold(alpha: f64, bounds: (f64, f64), rel_tol: f64, cfg: &ThresholdConfig) -> Result<ThresholdSearch> {
    let (mut lo, mut hi) = bounds;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidBracket(format!("need 0 <= eta_low < eta_high <= 1, got ({lo}, {hi})")));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::Domain(format!("relative tolerance must be in (0,1), got {rel_tol}")));
    }
    let low = probe(alpha, lo, cfg)?;
    if low.verdict != Verdict::Below {
        if lo == 0.0 {
            return Ok(ThresholdSearch::NoThreshold { alpha, eta: lo, verdict: low.verdict, reason: low.reason });
        }
        return Err(Error::InvalidBracket(format!("eta_low = {lo} is not below threshold: {}", low.reason)));
    }
    let high = probe(alpha, hi, cfg)?;
    if high.verdict != Verdict::Above {
        return Err(Error::InvalidBracket(format!("eta_high = {hi} is not above threshold: {}", high.reason)));
    }
    let mut probes = 2;
    let mut unresolved = false;
    while hi - lo > rel_tol * hi && probes < MAX_PROBES {
        let mid = if lo == 0.0 {
            0.1 * hi
        } else if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        probes += 1;
        match probe(alpha, mid, cfg)?.verdict {
            Verdict::Below => lo = mid,
            Verdict::Above => hi = mid,
            Verdict::Inconclusive => {
                unresolved = true;
                break;
            }
        }
    }
    Ok(ThresholdSearch::Found(ThresholdPoint {
        alpha,
        eta_threshold: 0.5 * (lo + hi),
        bracket: (lo, hi),
        levels_tested: cfg.levels,
        probes,
        unresolved,
    }))
}

/// One sweep point; failures are kept as messages so the sweep goes on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub outcome: std::result::Result<ThresholdSearch, String>,
}

/// Threshold search at every `alpha`, in parallel; results keep the order
/// of `alphas`.
pub fn sweep(alphas: &[f64], bounds: (f64, f64), rel_tol: f64, cfg: &ThresholdConfig) -> Vec<SweepPoint> {
    alphas
        .par_iter()
        .map(|&alpha| SweepPoint {
            alpha,
            outcome: bisect_threshold(alpha, bounds, rel_tol, cfg).map_err(|e| e.to_string()),
        })
        .collect()
}
