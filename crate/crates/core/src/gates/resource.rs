use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::coeff::{fit_coherent_products, phase_aligned_distance};
use crate::error::{Error, Result};
use crate::fock::{default_cutoff, minimal_cutoff, BeamSplitterSpec, FockVector};

/// Truncation tail used for every gate-level circuit. Far below the generic
/// Fock default so that coefficient checks at 1e-8 are not polluted by the
/// discarded mass.
pub const GATE_TAIL: f64 = 1e-22;

/// Largest allowed deviation of a resource's coefficients from its ideal form.
pub const RESOURCE_TOLERANCE: f64 = 1e-8;

pub fn gate_cutoff(max_amplitude: f64) -> usize {
    default_cutoff(max_amplitude).max(minimal_cutoff(max_amplitude, GATE_TAIL))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResourceKind {
    Bell,
    /// `e^{i phase}|a,b> + e^{-i phase}|-a,-b>`.
    ZRot { phase: f64 },
    Hadamard,
    Cz,
}

impl ResourceKind {
    pub fn modes(&self) -> usize {
        match self {
            ResourceKind::Cz => 4,
            _ => 2,
        }
    }

    /// Ideal coefficients over the coherent-product basis of the resource modes.
    pub fn ideal_coefficients(&self) -> Vec<C64> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match *self {
            ResourceKind::Bell => vec![one, zero, zero, one],
            ResourceKind::ZRot { phase } => {
                vec![C64::from_polar(1.0, phase), zero, zero, C64::from_polar(1.0, -phase)]
            }
            ResourceKind::Hadamard => vec![one, one, one, -one],
            ResourceKind::Cz => (0..16)
                .map(|i| {
                    let bit = |m: usize| (i >> (3 - m)) & 1;
                    if bit(0) != bit(1) || bit(2) != bit(3) {
                        zero
                    } else if bit(0) == 1 && bit(2) == 1 {
                        -one
                    } else {
                        one
                    }
                })
                .collect(),
        }
    }
}

/// A heralded entangled state of coherent-state modes, ready for teleportation.
///
/// The state equals the ideal form of `kind` with a logical Z applied on every
/// mode flagged in `z_frame`.
#[derive(Clone, Debug)]
pub struct EntanglementResource {
    pub kind: ResourceKind,
    pub state: FockVector,
    pub amplitudes: Vec<f64>,
    pub z_frame: Vec<bool>,
    pub attempts_used: u64,
    /// Diagonal (cat) states consumed across all attempts.
    pub diagonal_states_used: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceCheck {
    pub distance: f64,
    pub residual: f64,
}

impl ResourceCheck {
    pub fn passed(&self) -> bool {
        self.distance < RESOURCE_TOLERANCE && self.residual < RESOURCE_TOLERANCE
    }
}

/// Applies logical Z on flagged modes of a coefficient vector.
pub(crate) fn with_z_frame(coeffs: &[C64], z_frame: &[bool]) -> Vec<C64> {
    let k = z_frame.len();
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let flips = (0..k).filter(|&m| z_frame[m] && (i >> (k - 1 - m)) & 1 == 1).count();
            if flips % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect()
}

/// Compares `state` with `kind`'s ideal pattern under `z_frame`.
pub fn check_pattern(kind: ResourceKind, state: &FockVector, amplitudes: &[f64], z_frame: &[bool]) -> Result<ResourceCheck> {
    if state.modes() != kind.modes() || amplitudes.len() != kind.modes() || z_frame.len() != kind.modes() {
        return Err(Error::ShapeMismatch(format!("{kind:?} resource needs {} modes", kind.modes())));
    }
    let fit = fit_coherent_products(state, amplitudes)?;
    let want = with_z_frame(&kind.ideal_coefficients(), z_frame);
    let scale = state.norm();
    Ok(ResourceCheck {
        distance: phase_aligned_distance(&fit.coefficients, &want),
        residual: fit.residual / scale,
    })
}

impl EntanglementResource {
    /// Builds a resource, refusing states that fail the pattern check.
    pub fn verified(
        kind: ResourceKind,
        state: FockVector,
        amplitudes: Vec<f64>,
        z_frame: Vec<bool>,
        attempts_used: u64,
        diagonal_states_used: u64,
    ) -> Result<Self> {
        let check = check_pattern(kind, &state, &amplitudes, &z_frame)?;
        if !check.passed() {
            return Err(Error::Consistency(format!(
                "{kind:?} resource off its ideal form: distance {:e}, residual {:e}",
                check.distance, check.residual
            )));
        }
        Ok(Self { kind, state, amplitudes, z_frame, attempts_used: attempts_used.max(1), diagonal_states_used })
    }

    pub fn check(&self) -> Result<ResourceCheck> {
        check_pattern(self.kind, &self.state, &self.amplitudes, &self.z_frame)
    }

    pub fn cutoff(&self) -> usize {
        self.state.cutoff()
    }
}

/// Splits a diagonal state of amplitude `sqrt2 alpha` on a balanced splitter,
/// giving `|a,a> + |-a,-a>`.
pub fn make_bell_pair(alpha: f64, cutoff: usize) -> Result<EntanglementResource> {
    if alpha <= 0.0 {
        return Err(Error::DegenerateState(format!("Bell pair at amplitude {alpha} is the vacuum")));
    }
    let cat = FockVector::cat_state(std::f64::consts::SQRT_2 * alpha, 1, cutoff)?;
    let joint = FockVector::vacuum(1, cutoff)?.tensor(&cat)?;
    let pair = joint.apply_beam_splitter(BeamSplitterSpec::balanced(0, 1))?;
    EntanglementResource::verified(ResourceKind::Bell, pair, vec![alpha, alpha], vec![false, false], 1, 1)
}
