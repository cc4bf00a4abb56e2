//! Simulation toolkit for coherent-state quantum computing.
//!
//! Two engines live here: a truncated Fock-space simulator that checks the
//! linear-optics measurement, teleportation and gate circuits for any coherent
//! amplitude, and a Pauli-frame Monte Carlo of a Steane-code telecorrection
//! round under the located/unlocated noise model, with threshold and resource
//! analysis on top.

pub mod error;
pub mod fock;
pub mod gates;
pub mod noise;
pub mod pauli;
pub mod stats;
pub mod threshold;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
