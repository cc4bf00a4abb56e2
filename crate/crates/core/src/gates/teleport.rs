//! Teleportation and gate teleportation through heralded resources.
//!
//! A qubit is Bell-measured together with the input leg of a resource; the
//! output leg then carries the gate applied to the input, up to a Pauli frame.
//! Output frames are reported in the form `Z^z X^x`, applied after the gate.

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coeff::{apply_cz, apply_h, apply_x, apply_z, apply_zrot, fidelity, fit_coherent_products};
use super::factory::{ResourceFactory, DEFAULT_MAX_ATTEMPTS};
use super::measure::{bell_measure, bell_measure_branches, FrameUpdate, MeasurementRecord};
use super::qubit::CsqcQubit;
use super::resource::{EntanglementResource, ResourceKind};
use crate::error::{Error, Result};
use crate::fock::{minimal_cutoff, FockVector};

/// Truncation tail for the five-mode controlled-Z stage.
pub const CZ_STAGE_TAIL: f64 = 1e-15;

const PHASE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateKind {
    Identity,
    /// `Z(theta) = diag(e^{i theta/2}, e^{-i theta/2})`.
    ZRot { theta: f64 },
    Hadamard,
    Cz,
}

impl GateKind {
    pub fn qubits(&self) -> usize {
        if *self == GateKind::Cz {
            2
        } else {
            1
        }
    }

    /// The resource a teleported version of this gate consumes.
    pub fn resource_kind(&self) -> ResourceKind {
        match *self {
            GateKind::Identity => ResourceKind::Bell,
            GateKind::ZRot { theta } => ResourceKind::ZRot { phase: theta / 2.0 },
            GateKind::Hadamard => ResourceKind::Hadamard,
            GateKind::Cz => ResourceKind::Cz,
        }
    }

    /// The ideal unitary on a coefficient vector.
    pub fn apply(&self, c: &[C64]) -> Vec<C64> {
        match *self {
            GateKind::Identity => c.to_vec(),
            GateKind::ZRot { theta } => apply_zrot(c, theta, 0, 1),
            GateKind::Hadamard => apply_h(c, 0, 1),
            GateKind::Cz => apply_cz(c, 0, 1, 2),
        }
    }

    /// Builds a factory for this gate's resource at qubit amplitude `alpha`.
    pub fn factory(&self, alpha: f64) -> Result<Option<ResourceFactory>> {
        Ok(match *self {
            GateKind::Identity => None,
            GateKind::ZRot { theta } => Some(ResourceFactory::zrot(theta / 2.0, alpha, alpha)?),
            GateKind::Hadamard => Some(ResourceFactory::hadamard(alpha)?),
            GateKind::Cz => Some(ResourceFactory::cz(alpha)?),
        })
    }
}

fn resource_matches(gate: GateKind, kind: ResourceKind) -> bool {
    match (gate.resource_kind(), kind) {
        (ResourceKind::ZRot { phase: a }, ResourceKind::ZRot { phase: b }) => (a - b).abs() < PHASE_TOLERANCE,
        (a, b) => a == b,
    }
}

/// Applies `Z^z X^x` per qubit.
pub fn apply_frame(c: &[C64], frame: &[FrameUpdate]) -> Vec<C64> {
    let n = frame.len();
    let mut out = c.to_vec();
    for (q, f) in frame.iter().enumerate() {
        if f.x {
            out = apply_x(&out, q, n);
        }
        if f.z {
            out = apply_z(&out, q, n);
        }
    }
    out
}

/// Output frame of a successful teleported gate and the rotation that is
/// still owed, given the Bell frames and the resource's own Z frame.
pub fn conjugate_frame(gate: GateKind, bell: &[FrameUpdate], resource_z: &[bool]) -> (Vec<FrameUpdate>, Option<f64>) {
    match gate {
        GateKind::Identity => (vec![FrameUpdate::new(bell[0].x, bell[0].z ^ resource_z[0] ^ resource_z[1])], None),
        GateKind::ZRot { theta } => {
            let f = FrameUpdate::new(bell[0].x, bell[0].z ^ resource_z[0] ^ resource_z[1]);
            (vec![f], bell[0].x.then_some(2.0 * theta))
        }
        GateKind::Hadamard => (vec![FrameUpdate::new(bell[0].z ^ resource_z[0], bell[0].x ^ resource_z[1])], None),
        GateKind::Cz => {
            let (b1, b2) = (bell[0], bell[1]);
            (
                vec![
                    FrameUpdate::new(b1.x, b1.z ^ b2.x ^ resource_z[0] ^ resource_z[1]),
                    FrameUpdate::new(b2.x, b2.z ^ b1.x ^ resource_z[2] ^ resource_z[3]),
                ],
                None,
            )
        }
    }
}

/// The gate actually realized on a branch, before the output frame.
fn effective_gate(gate: GateKind, pending: Option<f64>) -> GateKind {
    match (gate, pending) {
        (GateKind::ZRot { theta }, Some(_)) => GateKind::ZRot { theta: -theta },
        _ => gate,
    }
}

fn check_inputs(gate: GateKind, inputs: &[CsqcQubit], resource: &EntanglementResource) -> Result<()> {
    if inputs.len() != gate.qubits() {
        return Err(Error::ShapeMismatch(format!("{gate:?} takes {} qubits, got {}", gate.qubits(), inputs.len())));
    }
    if !resource_matches(gate, resource.kind) {
        return Err(Error::ShapeMismatch(format!("{gate:?} cannot consume a {:?} resource", resource.kind)));
    }
    for (q, &a) in inputs.iter().zip(resource.amplitudes.iter().step_by(2)) {
        if (q.alpha - a).abs() > 1e-12 * a.max(1.0) {
            return Err(Error::AmplitudeMismatch { qubit: q.alpha, resource: a });
        }
    }
    Ok(())
}

fn stage_resource(gate: GateKind, resource: &EntanglementResource) -> Result<FockVector> {
    if gate != GateKind::Cz {
        return Ok(resource.state.clone());
    }
    let a = resource.amplitudes[0];
    let cutoff = minimal_cutoff(std::f64::consts::SQRT_2 * a, CZ_STAGE_TAIL).min(resource.cutoff());
    Ok(resource.state.with_cutoff(cutoff)?.0)
}

/// Result of one sampled teleported gate.
#[derive(Clone, Debug)]
pub struct GateOutcome {
    pub records: Vec<MeasurementRecord>,
    pub erased: Vec<bool>,
    /// Decoded output coefficients, present when no qubit was erased.
    pub output: Option<Vec<C64>>,
    pub residual: f64,
    pub frame: Vec<FrameUpdate>,
    /// Extra `Z(angle)` still needed (after removing the frame) when a
    /// rotation was teleported through an X frame.
    pub pending_rotation: Option<f64>,
}

/// One enumerated branch of a teleported gate.
#[derive(Clone, Debug)]
pub struct GateBranch {
    pub probability: f64,
    pub records: Vec<MeasurementRecord>,
    pub erased: Vec<bool>,
    pub output: Option<Vec<C64>>,
    /// What the output should be: frame and realized gate applied to the input.
    pub expected: Option<Vec<C64>>,
    pub fidelity: Option<f64>,
    pub residual: f64,
    pub frame: Vec<FrameUpdate>,
    pub pending_rotation: Option<f64>,
}

fn decode_outputs(state: &FockVector, amplitudes: &[f64]) -> Result<(Vec<C64>, f64)> {
    let fit = fit_coherent_products(state, amplitudes)?;
    Ok((fit.coefficients, fit.residual))
}

fn input_coefficients(inputs: &[CsqcQubit]) -> Vec<C64> {
    inputs
        .iter()
        .fold(vec![C64::new(1.0, 0.0)], |acc, q| super::coeff::kron(&acc, &q.coefficients()))
}

fn finish_branch(
    gate: GateKind,
    inputs: &[CsqcQubit],
    resource: &EntanglementResource,
    probability: f64,
    records: Vec<MeasurementRecord>,
    state: Option<&FockVector>,
) -> Result<GateBranch> {
    let erased: Vec<bool> = records.iter().map(|r| r.outcome.is_failure()).collect();
    let bell: Vec<FrameUpdate> = records.iter().map(|r| r.pauli_frame_update).collect();
    let (frame, pending) = conjugate_frame(gate, &bell, &resource.z_frame);
    if erased.iter().any(|&e| e) {
        return Ok(GateBranch {
            probability,
            records,
            erased,
            output: None,
            expected: None,
            fidelity: None,
            residual: 0.0,
            frame,
            pending_rotation: pending,
        });
    }
    let state = state.ok_or_else(|| Error::Consistency("successful branch without output modes".into()))?;
    let out_amps: Vec<f64> = resource.amplitudes.iter().skip(1).step_by(2).copied().collect();
    let (output, residual) = decode_outputs(state, &out_amps)?;
    let realized = effective_gate(gate, pending).apply(&input_coefficients(inputs));
    let expected = apply_frame(&realized, &frame);
    let fid = fidelity(&output, &expected);
    Ok(GateBranch {
        probability,
        records,
        erased,
        output: Some(output),
        expected: Some(expected),
        fidelity: Some(fid),
        residual: residual / state.norm(),
        frame,
        pending_rotation: pending,
    })
}

/// Enumerates every measurement branch of a teleported gate.
pub fn gate_branches(gate: GateKind, inputs: &[CsqcQubit], resource: &EntanglementResource) -> Result<Vec<GateBranch>> {
    check_inputs(gate, inputs, resource)?;
    let res_state = stage_resource(gate, resource)?;
    let cutoff = res_state.cutoff();
    let first = inputs[0].encode(cutoff)?.tensor(&res_state)?;
    let stage1 = bell_measure_branches(&first, 0, 1)?;
    let mut out = Vec::new();
    if gate != GateKind::Cz {
        for b in stage1.branches {
            out.push(finish_branch(gate, inputs, resource, b.probability, vec![b.record], b.state.as_ref())?);
        }
        return Ok(out);
    }
    // remaining modes after stage one: (b1, a2, b2); the second qubit joins last
    let second_input = inputs[1].encode(cutoff)?;
    let per_branch: Vec<Vec<GateBranch>> = stage1
        .branches
        .into_par_iter()
        .map(|b| {
            let rest = b.state.ok_or_else(|| Error::Consistency("controlled-Z stage lost its modes".into()))?;
            let joint = rest.tensor(&second_input)?;
            bell_measure_branches(&joint, 3, 1)?
                .branches
                .into_iter()
                .map(|b2| {
                    finish_branch(
                        gate,
                        inputs,
                        resource,
                        b.probability * b2.probability,
                        vec![b.record.clone(), b2.record],
                        b2.state.as_ref(),
                    )
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    out.extend(per_branch.into_iter().flatten());
    Ok(out)
}

/// Runs one teleported gate with sampled measurement outcomes.
pub fn teleported_gate<R: Rng + ?Sized>(
    gate: GateKind,
    inputs: &[CsqcQubit],
    resource: &EntanglementResource,
    rng: &mut R,
) -> Result<GateOutcome> {
    check_inputs(gate, inputs, resource)?;
    let res_state = stage_resource(gate, resource)?;
    let cutoff = res_state.cutoff();
    let first = inputs[0].encode(cutoff)?.tensor(&res_state)?;
    let (rec1, rest) = bell_measure(&first, 0, 1, rng)?;
    let (records, state) = if gate == GateKind::Cz {
        let rest = rest.ok_or_else(|| Error::Consistency("controlled-Z stage lost its modes".into()))?;
        let joint = rest.tensor(&inputs[1].encode(cutoff)?)?;
        let (rec2, out) = bell_measure(&joint, 3, 1, rng)?;
        (vec![rec1, rec2], out)
    } else {
        (vec![rec1], rest)
    };
    let b = finish_branch(gate, inputs, resource, 1.0, records, state.as_ref())?;
    Ok(GateOutcome {
        records: b.records,
        erased: b.erased,
        output: b.output,
        residual: b.residual,
        frame: b.frame,
        pending_rotation: b.pending_rotation,
    })
}

/// Result of plain teleportation.
#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub record: MeasurementRecord,
    /// Decoded output before frame correction, `None` when erased.
    pub output: Option<CsqcQubit>,
    pub residual: f64,
}

/// Teleports `q` through a Bell-pair resource.
pub fn teleport<R: Rng + ?Sized>(q: &CsqcQubit, resource: &EntanglementResource, rng: &mut R) -> Result<TeleportOutcome> {
    if resource.kind != ResourceKind::Bell {
        return Err(Error::ShapeMismatch(format!("teleportation needs a Bell resource, got {:?}", resource.kind)));
    }
    let out = teleported_gate(GateKind::Identity, std::slice::from_ref(q), resource, rng)?;
    Ok(TeleportOutcome {
        record: out.records[0].clone(),
        output: out.output.map(|c| CsqcQubit::new(c[0], c[1], resource.amplitudes[1])),
        residual: out.residual,
    })
}

/// Outcome of a repeat-until-done teleported rotation.
#[derive(Clone, Debug)]
pub struct AdaptiveOutcome {
    pub rounds: usize,
    pub records: Vec<MeasurementRecord>,
    /// Frame-corrected output, `None` when a round failed.
    pub output: Option<CsqcQubit>,
}

fn angle_is_multiple_of(angle: f64, unit: f64) -> Option<i64> {
    let k = (angle / unit).round();
    ((angle - k * unit).abs() < PHASE_TOLERANCE).then_some(k as i64)
}

/// Teleports `Z(theta)` and keeps correcting: whenever a round leaves an X
/// frame the realized rotation is `Z(-theta)`, so `Z(2 theta)` follows.
/// Rotations by multiples of pi are absorbed into the Pauli frame.
pub fn teleported_zrot_adaptive<R: Rng + ?Sized>(
    q: &CsqcQubit,
    theta: f64,
    max_rounds: usize,
    rng: &mut R,
) -> Result<AdaptiveOutcome> {
    let mut current = *q;
    let mut angle = theta;
    let mut records = Vec::new();
    for round in 1..=max_rounds {
        if let Some(k) = angle_is_multiple_of(angle, std::f64::consts::PI) {
            if k.rem_euclid(2) == 1 {
                current = current.pauli_z();
            }
            return Ok(AdaptiveOutcome { rounds: round - 1, records, output: Some(current) });
        }
        let gate = GateKind::ZRot { theta: angle };
        let factory = gate.factory(q.alpha)?.expect("rotation factory");
        let resource = factory.sample(rng, DEFAULT_MAX_ATTEMPTS)?;
        let out = teleported_gate(gate, &[current], &resource, rng)?;
        records.extend(out.records);
        let Some(coeffs) = out.output else {
            return Ok(AdaptiveOutcome { rounds: round, records, output: None });
        };
        // undo the frame on the coefficients (X then Z were applied, so Z first)
        let mut c = coeffs;
        if out.frame[0].z {
            c = apply_z(&c, 0, 1);
        }
        if out.frame[0].x {
            c = apply_x(&c, 0, 1);
        }
        current = CsqcQubit::new(c[0], c[1], q.alpha);
        match out.pending_rotation {
            Some(extra) => angle = extra,
            None => return Ok(AdaptiveOutcome { rounds: round, records, output: Some(current) }),
        }
    }
    Err(Error::Starvation { attempts: max_rounds as u64 })
}
