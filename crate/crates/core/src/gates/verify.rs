//! Deterministic verification of the measurement and gate circuits by full
//! branch enumeration. Reports are plain data for the CLI.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::factory::ResourceFactory;
use super::measure::{z_measure_branches, Outcome};
use super::qubit::CsqcQubit;
use super::resource::{gate_cutoff, make_bell_pair, EntanglementResource};
use super::teleport::{gate_branches, GateBranch, GateKind};
use crate::error::Result;
use crate::fock::FockVector;

/// Largest amplitude at which the two-qubit teleported gate is enumerated in
/// full; above it only failure probabilities are computed.
pub const CZ_ENUMERATION_LIMIT: f64 = 1.2;

/// Branches below this probability are counted but not fidelity-checked.
pub const BRANCH_FLOOR: f64 = 1e-12;

/// Largest accepted `1 - fidelity` on a checked branch.
pub const INFIDELITY_TOLERANCE: f64 = 1e-6;

/// Largest accepted deviation of a failure probability from the closed form.
pub const FAILURE_LAW_TOLERANCE: f64 = 1e-6;

/// Largest accepted probability of a wrong or impossible outcome.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-12;

/// Closed-form failure probability `2 / (1 + e^{2 a^2})` of a `|+>` input.
pub fn failure_law(alpha: f64) -> f64 {
    2.0 / (1.0 + (2.0 * alpha * alpha).exp())
}

/// A generic input with unequal, complex coefficients.
pub fn probe_qubit(alpha: f64) -> CsqcQubit {
    CsqcQubit::new(C64::new(0.6, -0.2), C64::new(0.3, 0.7), alpha)
}

fn probe_pair(alpha: f64) -> [CsqcQubit; 2] {
    [probe_qubit(alpha), CsqcQubit::new(C64::new(-0.4, 0.5), C64::new(0.7, 0.1), alpha)]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZMeasureReport {
    pub alpha: f64,
    pub predicted_failure: f64,
    pub measured_failure: f64,
    /// Probability of reading the wrong value for `|0>` and `|1>` inputs.
    pub wrong_outcome_probability: f64,
    pub inconsistent_probability: f64,
    pub total_probability: f64,
    pub failure_law_passed: bool,
    pub unambiguous: bool,
}

pub fn verify_z_measure(alpha: f64) -> Result<ZMeasureReport> {
    let cutoff = gate_cutoff(std::f64::consts::SQRT_2 * alpha);
    let plus = z_measure_branches(&CsqcQubit::plus(alpha).encode(cutoff)?, 0, alpha)?;
    let mut wrong = 0.0;
    let mut inconsistent = plus.inconsistent_probability;
    for (q, bad) in [(CsqcQubit::zero(alpha), Outcome::ZOne), (CsqcQubit::one(alpha), Outcome::ZZero)] {
        let set = z_measure_branches(&q.encode(cutoff)?, 0, alpha)?;
        wrong += set.branches.iter().filter(|b| b.record.outcome == bad).map(|b| b.probability).sum::<f64>();
        inconsistent += set.inconsistent_probability;
    }
    let predicted = failure_law(alpha);
    let measured = plus.failure_probability();
    Ok(ZMeasureReport {
        alpha,
        predicted_failure: predicted,
        measured_failure: measured,
        wrong_outcome_probability: wrong,
        inconsistent_probability: inconsistent,
        total_probability: plus.total_probability(),
        failure_law_passed: (measured - predicted).abs() < FAILURE_LAW_TOLERANCE,
        unambiguous: wrong < AMBIGUITY_TOLERANCE && inconsistent < AMBIGUITY_TOLERANCE,
    })
}

/// Exactness statistics over the branches of one enumeration.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BranchStats {
    pub total_probability: f64,
    pub checked_branches: usize,
    pub unchecked_mass: f64,
    pub worst_infidelity: f64,
    pub worst_residual: f64,
    /// Failure probability of each qubit's teleporter.
    pub failure_per_qubit: Vec<f64>,
}

pub fn branch_stats(branches: &[GateBranch], qubits: usize) -> BranchStats {
    let mut s = BranchStats { failure_per_qubit: vec![0.0; qubits], ..Default::default() };
    for b in branches {
        s.total_probability += b.probability;
        for (q, &e) in b.erased.iter().enumerate() {
            if e {
                s.failure_per_qubit[q] += b.probability;
            }
        }
        let Some(fid) = b.fidelity else { continue };
        if b.probability < BRANCH_FLOOR {
            s.unchecked_mass += b.probability;
            continue;
        }
        s.checked_branches += 1;
        s.worst_infidelity = s.worst_infidelity.max(1.0 - fid);
        s.worst_residual = s.worst_residual.max(b.residual);
    }
    s
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResourcePatternReport {
    pub patterns: Vec<[usize; 2]>,
    pub z_frame: Vec<bool>,
    pub herald_probability: f64,
    pub resource_distance: f64,
    /// Branch statistics for generic inputs; `None` when not enumerated.
    pub exactness: Option<BranchStats>,
    /// Per-qubit failure probabilities with every input in `|+>`.
    pub plus_failure: Vec<f64>,
    /// `enumeration`, or `vacuum_marginal` when computed from the vacuum
    /// probabilities of each teleporter's two inputs.
    pub failure_method: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateReport {
    pub gate: GateKind,
    pub alpha: f64,
    pub predicted_failure: f64,
    pub factory_acceptance: Option<f64>,
    pub resources: Vec<ResourcePatternReport>,
    pub exact_passed: bool,
    pub failure_law_passed: bool,
}

impl GateReport {
    pub fn worst_infidelity(&self) -> f64 {
        self.resources
            .iter()
            .filter_map(|r| r.exactness.as_ref())
            .map(|e| e.worst_infidelity)
            .fold(0.0, f64::max)
    }

    /// Largest deviation of any per-qubit failure probability from the closed form.
    pub fn failure_law_error(&self) -> f64 {
        self.resources
            .iter()
            .flat_map(|r| r.plus_failure.iter())
            .map(|f| (f - self.predicted_failure).abs())
            .fold(0.0, f64::max)
    }
}

/// Failure probability of each teleporter from vacuum probabilities alone:
/// a splitter maps vacuum to vacuum, so both detectors stay dark exactly when
/// both of its inputs are empty.
pub fn vacuum_marginal_failure(inputs: &[CsqcQubit], resource: &EntanglementResource) -> Result<Vec<f64>> {
    let cutoff = resource.cutoff();
    inputs
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let leg = resource_vacuum_probability(&resource.state, 2 * k)?;
            let input = q.encode(cutoff)?.amplitudes()[0].norm_sqr();
            Ok(input * leg)
        })
        .collect()
}

fn resource_vacuum_probability(state: &FockVector, mode: usize) -> Result<f64> {
    match state.project_outcome(&[mode], &[0]) {
        Ok((p, _)) => Ok(p),
        Err(crate::error::Error::ZeroProbability) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn pattern_report(
    gate: GateKind,
    resource: &EntanglementResource,
    patterns: Vec<[usize; 2]>,
    herald_probability: f64,
) -> Result<ResourcePatternReport> {
    let alpha = resource.amplitudes[0];
    let qubits = gate.qubits();
    let plus = vec![CsqcQubit::plus(alpha); qubits];
    let enumerate = gate != GateKind::Cz || alpha <= CZ_ENUMERATION_LIMIT;
    let (exactness, plus_failure, method) = if enumerate {
        let probe: Vec<CsqcQubit> = if qubits == 2 { probe_pair(alpha).to_vec() } else { vec![probe_qubit(alpha)] };
        let exact = branch_stats(&gate_branches(gate, &probe, resource)?, qubits);
        let plus_stats = branch_stats(&gate_branches(gate, &plus, resource)?, qubits);
        (Some(exact), plus_stats.failure_per_qubit, "enumeration")
    } else {
        (None, vacuum_marginal_failure(&plus, resource)?, "vacuum_marginal")
    };
    Ok(ResourcePatternReport {
        patterns,
        z_frame: resource.z_frame.clone(),
        herald_probability,
        resource_distance: resource.check()?.distance,
        exactness,
        plus_failure,
        failure_method: method.to_string(),
    })
}

/// Enumerates a teleported gate for every distinct resource frame its factory
/// can herald (a Bell pair for the identity).
pub fn verify_gate(gate: GateKind, alpha: f64) -> Result<GateReport> {
    let mut resources = Vec::new();
    let mut acceptance = None;
    match gate.factory(alpha)? {
        None => {
            let pair = make_bell_pair(alpha, gate_cutoff(std::f64::consts::SQRT_2 * alpha))?;
            resources.push(pattern_report(gate, &pair, Vec::new(), 1.0)?);
        }
        Some(factory) => {
            acceptance = Some(factory.acceptance());
            resources = frame_representatives(&factory)
                .into_par_iter()
                .map(|i| {
                    let h = &factory.outcomes()[i];
                    pattern_report(gate, &factory.resource(i), h.patterns.clone(), h.probability)
                })
                .collect::<Result<_>>()?;
        }
    }
    let predicted = failure_law(alpha);
    let mut report = GateReport {
        gate,
        alpha,
        predicted_failure: predicted,
        factory_acceptance: acceptance,
        resources,
        exact_passed: false,
        failure_law_passed: false,
    };
    report.exact_passed = report.resources.iter().all(|r| {
        r.exactness.as_ref().is_none_or(|e| {
            e.worst_infidelity < INFIDELITY_TOLERANCE && (e.total_probability - 1.0).abs() < 1e-8
        })
    });
    report.failure_law_passed = report.failure_law_error() < FAILURE_LAW_TOLERANCE;
    Ok(report)
}

/// One heralded outcome per distinct Z frame.
fn frame_representatives(factory: &ResourceFactory) -> Vec<usize> {
    let mut seen: Vec<&Vec<bool>> = Vec::new();
    let mut out = Vec::new();
    for (i, h) in factory.outcomes().iter().enumerate() {
        if !seen.contains(&&h.z_frame) {
            seen.push(&h.z_frame);
            out.push(i);
        }
    }
    out
}
