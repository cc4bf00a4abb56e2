//! Closed-form loss parameters and the per-operation error-rate table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CZ unlocated Z rate per qubit, in units of `p`.
pub const CZ_Z_FACTOR: f64 = 2.5;

/// Hadamard unlocated X and Z rates, in units of `p`.
pub const HADAMARD_FACTOR: f64 = 1.6;

/// How a loss fraction shrinks the coherent amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossConvention {
    /// `alpha' = (1 - eta) alpha`.
    PaperLiteral,
    /// `alpha' = sqrt(1 - eta) alpha`, the amplitude left by a splitter of
    /// intensity transmission `1 - eta`.
    IntensityLoss,
}

impl LossConvention {
    pub fn effective_amplitude(self, alpha: f64, eta: f64) -> f64 {
        match self {
            LossConvention::PaperLiteral => (1.0 - eta) * alpha,
            LossConvention::IntensityLoss => (1.0 - eta).sqrt() * alpha,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LossConvention::PaperLiteral => "paper_literal",
            LossConvention::IntensityLoss => "intensity_loss",
        }
    }
}

/// Failure probability `2 / (1 + e^{2 a^2})` of one teleporter at amplitude `a`.
pub fn q_of(alpha_eff: f64) -> Result<f64> {
    if !(alpha_eff >= 0.0) || !alpha_eff.is_finite() {
        return Err(Error::Domain(format!("effective amplitude must be finite and >= 0, got {alpha_eff}")));
    }
    // 2 / (1 + e^x) written to stay finite for large x
    let x = 2.0 * alpha_eff * alpha_eff;
    Ok(2.0 * (-x).exp() / (1.0 + (-x).exp()))
}

/// Z-flip probability of a diagonal state after losing a fraction `eta` of its
/// intensity: `(1 + sinh((2 eta - 1) a^2) / sinh a^2) / 2`.
pub fn p_of(alpha: f64, eta: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("amplitude must be finite and > 0, got {alpha}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("loss fraction must be in [0,1], got {eta}")));
    }
    let a2 = alpha * alpha;
    // sinh(b)/sinh(a) = e^{b-a} (1 - e^{-2b}) / (1 - e^{-2a}) for a > 0, rearranged
    // to avoid overflow at large a^2
    let b = (2.0 * eta - 1.0) * a2;
    let ratio = if a2 > 30.0 {
        let num = (b - a2).exp() - (-b - a2).exp();
        num / (1.0 - (-2.0 * a2).exp())
    } else {
        b.sinh() / a2.sinh()
    };
    Ok((0.5 * (1.0 + ratio)).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub alpha: f64,
    pub eta: f64,
    pub alpha_eff: f64,
    pub p: f64,
    pub q: f64,
    pub convention: LossConvention,
}

impl NoiseParams {
    /// `q` uses the effective amplitude of `convention`; `p` is the closed form
    /// in `eta`.
    pub fn new(alpha: f64, eta: f64, convention: LossConvention) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("loss fraction must be in [0,1], got {eta}")));
        }
        let alpha_eff = convention.effective_amplitude(alpha, eta);
        Ok(NoiseParams { alpha, eta, alpha_eff, p: p_of(alpha, eta)?, q: q_of(alpha_eff)?, convention })
    }
}

/// Error rates attached to one operation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OpRates {
    /// Heralded failure probability, per qubit acted on.
    pub located: f64,
    /// Silent X probability, per qubit.
    pub x: f64,
    /// Silent Z probability, per qubit.
    pub z: f64,
}

impl OpRates {
    fn checked(self, name: &str) -> Result<Self> {
        for (field, v) in [("located", self.located), ("x", self.x), ("z", self.z)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} {field} rate {v} outside [0,1]")));
            }
        }
        Ok(self)
    }
}

/// Per-operation error rates. Every event acts independently on each qubit
/// of the operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNoiseTable {
    pub memory: OpRates,
    pub hadamard: OpRates,
    pub cz: OpRates,
    pub plus_prep: OpRates,
    pub x_meas: OpRates,
    pub memory_noise_enabled: bool,
}

impl OpNoiseTable {
    pub fn noiseless() -> Self {
        OpNoiseTable {
            memory: OpRates::default(),
            hadamard: OpRates::default(),
            cz: OpRates::default(),
            plus_prep: OpRates::default(),
            x_meas: OpRates::default(),
            memory_noise_enabled: false,
        }
    }

    pub fn from_rates(p: f64, q: f64, memory_noise: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("p and q must lie in [0,1], got p={p}, q={q}")));
        }
        Ok(OpNoiseTable {
            memory: OpRates { located: 0.0, x: 0.0, z: if memory_noise { p } else { 0.0 } }.checked("memory")?,
            hadamard: OpRates { located: q, x: HADAMARD_FACTOR * p, z: HADAMARD_FACTOR * p }.checked("hadamard")?,
            cz: OpRates { located: q, x: 0.0, z: CZ_Z_FACTOR * p }.checked("cz")?,
            plus_prep: OpRates { located: 0.0, x: 0.0, z: p }.checked("plus_prep")?,
            x_meas: OpRates::default(),
            memory_noise_enabled: memory_noise,
        })
    }

    pub fn rows(&self) -> [(&'static str, OpRates); 5] {
        [
            ("memory", self.memory),
            ("hadamard", self.hadamard),
            ("cz", self.cz),
            ("plus_prep", self.plus_prep),
            ("x_meas", self.x_meas),
        ]
    }
}

pub fn build_table(params: &NoiseParams, memory_noise: bool) -> Result<OpNoiseTable> {
    OpNoiseTable::from_rates(params.p, params.q, memory_noise)
}
