//! Coherent-state qubits and the linear-optics circuits acting on them:
//! measurements, teleportation, entanglement factories and teleported gates.

pub mod coeff;
mod factory;
mod measure;
mod qubit;
mod resource;
mod teleport;
pub mod verify;

pub use factory::{
    cz_entanglement, hadamard_entanglement, zrot_entanglement, FactoryStats, Heralded, ResourceFactory,
    CONSUMED_AMPLITUDE, DEFAULT_MAX_ATTEMPTS, HADAMARD_PATTERN_XX, HADAMARD_PHASES, ZROT_PATTERN_Z,
};
pub use measure::{
    bell_measure, bell_measure_branches, classify_bell, classify_z, z_measure, z_measure_branches, Branch,
    BranchSet, FrameUpdate, MeasurementRecord, Outcome, BELL_FRAME,
};
pub use qubit::{pauli_x, CsqcQubit, Decoded, LEAKAGE_THRESHOLD};
pub use resource::{
    check_pattern, gate_cutoff, make_bell_pair, EntanglementResource, ResourceCheck, ResourceKind, GATE_TAIL,
    RESOURCE_TOLERANCE,
};
pub use teleport::{
    apply_frame, conjugate_frame, gate_branches, teleport, teleported_gate, teleported_zrot_adaptive,
    AdaptiveOutcome, GateBranch, GateKind, GateOutcome, TeleportOutcome, CZ_STAGE_TAIL,
};
