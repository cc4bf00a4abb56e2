//! Pauli-frame Monte Carlo of Steane-code telecorrection under the
//! located/unlocated noise model.

mod circuit;
mod code;
mod decoder;
mod ec;
mod exrec;
mod frame;

pub use circuit::{
    CircuitBuilder, CliffordCircuit, Fault, Measurements, NoiseSource, Op, OpCounts, RandomNoise, ScriptedNoise,
};
pub use code::{CodeSpec, LogicalState, BLOCK, BLOCK_MASK};
pub use decoder::{Decision, Decoder, EXACT_TIE};
pub use ec::{decoder_ratio, Classification, Protocol, RoundOutcome, TrialOutcome, DEFAULT_MAX_ATTEMPTS};
pub use exrec::{run_exrec, run_exrec_with_table, ExRecReport, Histogram, MIN_TRIALS};
pub use frame::{BlockFrame, PauliFrame, MAX_QUBITS};
