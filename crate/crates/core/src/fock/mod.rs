//! Truncated multimode Fock-space linear optics.

mod beam_splitter;
mod density;
mod state;

pub use beam_splitter::BeamSplitterSpec;
pub use density::DensityOperator;
pub use state::{default_cutoff, minimal_cutoff, tail_mass, FockVector, AMPLITUDE_BUDGET, TAIL_TOLERANCE};
pub(crate) use state::{coherent_amplitudes, sample_index};
