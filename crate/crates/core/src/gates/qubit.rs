use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::coeff::{coherent_superposition, fit_coherent_products};
use crate::error::{Error, Result};
use crate::fock::FockVector;

/// Residual norm above which a decode is reported as leaking out of the
/// coherent-state span.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

/// Logical qubit `N (mu |alpha> + nu |-alpha>)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsqcQubit {
    pub mu: C64,
    pub nu: C64,
    pub alpha: f64,
}

/// A decoded qubit together with the norm of the unexplained remainder.
#[derive(Clone, Copy, Debug)]
pub struct Decoded {
    pub qubit: CsqcQubit,
    pub residual: f64,
}

impl Decoded {
    pub fn leaked(&self) -> bool {
        self.residual > LEAKAGE_THRESHOLD
    }
}

impl CsqcQubit {
    pub fn new(mu: C64, nu: C64, alpha: f64) -> Self {
        Self { mu, nu, alpha }
    }

    pub fn zero(alpha: f64) -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), alpha)
    }

    pub fn one(alpha: f64) -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), alpha)
    }

    pub fn plus(alpha: f64) -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0), alpha)
    }

    pub fn coefficients(&self) -> [C64; 2] {
        [self.mu, self.nu]
    }

    /// `N_{mu,nu}(alpha)`; errors when the superposition is the zero vector.
    pub fn normalization(&self) -> Result<f64> {
        let overlap = (-2.0 * self.alpha * self.alpha).exp();
        let sq = self.mu.norm_sqr() + self.nu.norm_sqr() + 2.0 * (self.mu * self.nu.conj()).re * overlap;
        let scale = self.mu.norm_sqr() + self.nu.norm_sqr();
        if !(sq > 1e-14 * scale) || scale == 0.0 {
            return Err(Error::DegenerateState(format!(
                "({}, {}) at alpha {} is the zero vector",
                self.mu, self.nu, self.alpha
            )));
        }
        Ok(sq.powf(-0.5))
    }

    /// The normalized Fock-space state of this qubit.
    pub fn encode(&self, cutoff: usize) -> Result<FockVector> {
        self.normalization()?;
        let mut state = coherent_superposition(&[self.mu, self.nu], &[self.alpha], cutoff)?;
        state.normalize()?;
        Ok(state)
    }

    /// Least-squares fit of a single-mode state onto `span{|alpha>, |-alpha>}`.
    pub fn decode(state: &FockVector, alpha: f64) -> Result<Decoded> {
        if state.modes() != 1 {
            return Err(Error::ShapeMismatch(format!("decode expects one mode, got {}", state.modes())));
        }
        let fit = fit_coherent_products(state, &[alpha])?;
        Ok(Decoded {
            qubit: CsqcQubit::new(fit.coefficients[0], fit.coefficients[1], alpha),
            residual: fit.residual,
        })
    }

    /// Logical X: swaps the coefficients. Physically a pi phase shift, so it
    /// never fails.
    pub fn pauli_x(&self) -> Self {
        Self::new(self.nu, self.mu, self.alpha)
    }

    pub fn pauli_z(&self) -> Self {
        Self::new(self.mu, -self.nu, self.alpha)
    }
}

/// Logical X on a Fock-space qubit mode: a pi phase shift.
pub fn pauli_x(state: &FockVector, mode: usize) -> Result<FockVector> {
    state.phase_shift(mode, std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::default_cutoff;
    use crate::gates::coeff::phase_aligned_distance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_encodes_to_coherent_state() {
        let c = default_cutoff(1.3);
        let s = CsqcQubit::zero(1.3).encode(c).unwrap();
        let want = FockVector::coherent(C64::new(1.3, 0.0), c).unwrap();
        assert_abs_diff_eq!(s.overlap(&want).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn plus_encodes_to_even_cat() {
        let c = default_cutoff(0.7);
        let s = CsqcQubit::plus(0.7).encode(c).unwrap();
        let cat = FockVector::cat_state(0.7, 1, c).unwrap();
        assert_abs_diff_eq!(s.overlap(&cat).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalization_matches_encoded_norm() {
        let q = CsqcQubit::new(C64::new(0.4, -0.3), C64::new(-0.2, 0.9), 0.6);
        let n = q.normalization().unwrap();
        let raw = coherent_superposition(&[q.mu, q.nu], &[q.alpha], 30).unwrap();
        assert_abs_diff_eq!(raw.norm() * n, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cancelling_superposition_at_zero_amplitude_is_degenerate() {
        let q = CsqcQubit::new(C64::new(1.0, 0.0), C64::new(-1.0, 0.0), 0.0);
        assert!(matches!(q.encode(5), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn decode_round_trip() {
        let q = CsqcQubit::new(C64::new(0.1, 0.8), C64::new(-0.5, 0.2), 0.9);
        let d = CsqcQubit::decode(&q.encode(default_cutoff(0.9)).unwrap(), 0.9).unwrap();
        assert!(d.residual < 1e-10);
        assert!(!d.leaked());
        assert!(phase_aligned_distance(&d.qubit.coefficients(), &q.coefficients()) < 1e-9);
    }

    #[test]
    fn phase_shift_acts_as_x() {
        let a = 1.1;
        let c = default_cutoff(a);
        let q = CsqcQubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8), a);
        let flipped = pauli_x(&q.encode(c).unwrap(), 0).unwrap();
        let d = CsqcQubit::decode(&flipped, a).unwrap();
        assert!(phase_aligned_distance(&d.qubit.coefficients(), &q.pauli_x().coefficients()) < 1e-9);
        // even cat is an X eigenstate
        let cat = FockVector::cat_state(a, 1, c).unwrap();
        let d = CsqcQubit::decode(&pauli_x(&cat, 0).unwrap(), a).unwrap();
        assert!(phase_aligned_distance(&d.qubit.coefficients(), &[C64::new(1.0, 0.0); 2]) < 1e-9);
        assert_eq!(q.pauli_x().pauli_x(), q);
    }
}
