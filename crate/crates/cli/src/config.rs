//! Run configuration: a JSON file, overridden by flags, resolved and range
//! checked before anything runs.

use std::path::Path;

use anyhow::{bail, Context, Result};
use csqc_core::noise::{LossConvention, NoiseParams};
use csqc_core::pauli::EXACT_TIE;
use csqc_core::threshold::LevelMap;
use serde::{Deserialize, Serialize};

/// Every setting any subcommand reads. Absent fields take the subcommand's
/// default.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub eta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub convention: Option<LossConvention>,
    pub memory_noise: Option<bool>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub tie_ratio: Option<f64>,
    pub levels: Option<u32>,
    pub eta_low: Option<f64>,
    pub eta_high: Option<f64>,
    pub rel_tol: Option<f64>,
    pub escalations: Option<u32>,
    pub map: Option<LevelMap>,
    pub factory: Option<FactorySource>,
    pub factory_alpha: Option<f64>,
    pub verifier_samples: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FactorySource {
    Nominal,
    Measured,
}

pub const DEFAULT_P: f64 = 2e-4;
pub const DEFAULT_Q: f64 = 0.015;
pub const DEFAULT_ALPHAS: [f64; 4] = [0.5, 1.0, 1.56, 2.0];
pub const DEFAULT_SWEEP_ALPHAS: [f64; 7] = [1.2, 1.4, 1.56, 1.8, 2.0, 2.5, 3.0];
pub const MIN_EC_TRIALS: u64 = 1000;
pub const MAX_LEVELS: u32 = 10;

/// Noise settings after defaults: `p` and `q` are always present, derived
/// from `alpha` and `eta` when those are given.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedNoise {
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub convention: LossConvention,
    pub p: f64,
    pub q: f64,
    pub memory_noise: bool,
}

pub fn prob(name: &str, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        bail!("{name} must be in [0, 1], got {v}");
    }
    Ok(v)
}

pub fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be finite and > 0, got {v}");
    }
    Ok(v)
}

pub fn at_least<T: PartialOrd + std::fmt::Display>(name: &str, v: T, min: T) -> Result<T> {
    if v < min {
        bail!("{name} must be at least {min}, got {v}");
    }
    Ok(v)
}

pub fn tie_ratio(v: Option<f64>) -> Result<f64> {
    let r = v.unwrap_or(EXACT_TIE);
    if !(r >= 1.0 && r.is_finite()) {
        bail!("tie_ratio must be finite and >= 1, got {r}");
    }
    Ok(r)
}

pub fn resolve_noise(c: &FileConfig) -> Result<ResolvedNoise> {
    let convention = c.convention.unwrap_or(LossConvention::PaperLiteral);
    let memory_noise = c.memory_noise.unwrap_or(true);
    let loss = c.alpha.is_some() || c.eta.is_some();
    let rates = c.p.is_some() || c.q.is_some();
    if loss && rates {
        bail!("give either alpha and eta or p and q, not both");
    }
    if loss {
        let (Some(alpha), Some(eta)) = (c.alpha, c.eta) else {
            bail!("alpha and eta must be given together");
        };
        let params = NoiseParams::new(positive("alpha", alpha)?, prob("eta", eta)?, convention)?;
        return Ok(ResolvedNoise { alpha: Some(alpha), eta: Some(eta), convention, p: params.p, q: params.q, memory_noise });
    }
    Ok(ResolvedNoise {
        alpha: None,
        eta: None,
        convention,
        p: prob("p", c.p.unwrap_or(DEFAULT_P))?,
        q: prob("q", c.q.unwrap_or(DEFAULT_Q))?,
        memory_noise,
    })
}
