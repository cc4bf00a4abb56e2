//! Two-mode beam splitters in the truncated Fock basis.
//!
//! Convention (fixed crate-wide): a splitter at `angle` on modes `(a, b)` maps
//! coherent amplitudes as
//!
//! ```text
//! (x, y) -> (cos(angle) x + sin(angle) y, -sin(angle) x + cos(angle) y)
//! ```
//!
//! so transmission is real and positive and the reflection into `b` carries the
//! sign. A 50:50 splitter is `angle = pi/4`, and `|x>|x>` leaves as `|sqrt2 x>|0>`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::state::FockVector;
use crate::error::{Error, Result};

/// A beam splitter acting on `mode_a` and `mode_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    pub mode_a: usize,
    pub mode_b: usize,
    pub angle: f64,
}

impl BeamSplitterSpec {
    pub fn new(mode_a: usize, mode_b: usize, angle: f64) -> Self {
        Self { mode_a, mode_b, angle }
    }

    pub fn balanced(mode_a: usize, mode_b: usize) -> Self {
        Self::new(mode_a, mode_b, std::f64::consts::FRAC_PI_4)
    }

    /// Single-photon (mode-amplitude) transfer matrix.
    pub fn mode_matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        [[c, s], [-s, c]]
    }
}

/// `table[n][k]`: amplitude of `|k, N-k>` produced from `|n, N-n>`.
fn sector_table(total: usize, c: f64, s: f64) -> Vec<Vec<f64>> {
    // creation operators map a^+ -> c a^+ - s b^+ and b^+ -> s a^+ + c b^+
    let mut table = Vec::with_capacity(total + 1);
    for n in 0..=total {
        let m = total - n;
        let mut v = vec![0.0; total + 1];
        v[0] = 1.0;
        let mut photons = 0;
        let apply = |v: &mut Vec<f64>, photons: &mut usize, u: f64, w: f64, count: usize| {
            for j in 1..=count {
                let mut next = vec![0.0; total + 1];
                for k in 0..=*photons {
                    let x = v[k];
                    if x == 0.0 {
                        continue;
                    }
                    next[k + 1] += u * ((k + 1) as f64).sqrt() * x;
                    next[k] += w * ((*photons - k + 1) as f64).sqrt() * x;
                }
                let inv = 1.0 / (j as f64).sqrt();
                next.iter_mut().for_each(|y| *y *= inv);
                *v = next;
                *photons += 1;
            }
        };
        apply(&mut v, &mut photons, c, -s, n);
        apply(&mut v, &mut photons, s, c, m);
        table.push(v);
    }
    table
}

impl FockVector {
    /// Applies a beam splitter; amplitude pushed above the cutoff is discarded.
    pub fn apply_beam_splitter(&self, spec: BeamSplitterSpec) -> Result<FockVector> {
        let (a, b) = (spec.mode_a, spec.mode_b);
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            return Err(Error::ShapeMismatch("beam splitter needs two distinct modes".into()));
        }
        let cutoff = self.cutoff();
        let dim = self.dim();
        let (s, c) = spec.angle.sin_cos();
        let tables: Vec<Vec<Vec<f64>>> = (0..=2 * cutoff).map(|t| sector_table(t, c, s)).collect();

        let (sa, sb) = (self.stride(a), self.stride(b));
        let src = self.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); src.len()];
        let mut slice = vec![C64::new(0.0, 0.0); dim * dim];
        for base in 0..src.len() {
            if (base / sa) % dim != 0 || (base / sb) % dim != 0 {
                continue;
            }
            let mut any = false;
            for n in 0..dim {
                for m in 0..dim {
                    let v = src[base + n * sa + m * sb];
                    slice[n * dim + m] = v;
                    any |= v.norm_sqr() != 0.0;
                }
            }
            if !any {
                continue;
            }
            for (total, table) in tables.iter().enumerate() {
                let lo = total.saturating_sub(cutoff);
                let hi = total.min(cutoff);
                for n in lo..=hi {
                    let amp = slice[n * dim + (total - n)];
                    if amp.norm_sqr() == 0.0 {
                        continue;
                    }
                    let row = &table[n];
                    for k in lo..=hi {
                        out[base + k * sa + (total - k) * sb] += amp * row[k];
                    }
                }
            }
        }
        let mut result = FockVector::from_amplitudes(self.modes(), cutoff, out)?;
        result.set_norm_weight(self.norm_weight());
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::default_cutoff;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn coherent2(x: C64, y: C64, cutoff: usize) -> FockVector {
        FockVector::coherent(x, cutoff)
            .unwrap()
            .tensor(&FockVector::coherent(y, cutoff).unwrap())
            .unwrap()
    }

    #[test]
    fn mode_matrix_is_orthogonal() {
        for &angle in &[0.0, 0.3, FRAC_PI_4, 2.0] {
            let m = BeamSplitterSpec::new(0, 1, angle).mode_matrix();
            let dot = m[0][0] * m[0][1] + m[1][0] * m[1][1];
            assert_abs_diff_eq!(dot, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m[0][0].powi(2) + m[1][0].powi(2), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_angle_is_identity() {
        let s = coherent2(C64::new(0.8, 0.1), C64::new(-0.3, 0.0), 14);
        let out = s.apply_beam_splitter(BeamSplitterSpec::new(0, 1, 0.0)).unwrap();
        for (x, y) in s.amplitudes().iter().zip(out.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn balanced_splitter_combines_equal_coherent_states() {
        let alpha = 1.1;
        let c = default_cutoff(SQRT_2 * alpha);
        let s = coherent2(C64::new(alpha, 0.0), C64::new(alpha, 0.0), c);
        let out = s.apply_beam_splitter(BeamSplitterSpec::balanced(0, 1)).unwrap();
        let want = coherent2(C64::new(SQRT_2 * alpha, 0.0), C64::new(0.0, 0.0), c);
        assert_abs_diff_eq!(out.overlap(&want).unwrap().re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn single_photon_splits_with_reflection_sign() {
        let mut amps = vec![C64::new(0.0, 0.0); 9];
        amps[3] = C64::new(1.0, 0.0); // |1,0>
        let s = FockVector::from_amplitudes(2, 2, amps).unwrap();
        let out = s.apply_beam_splitter(BeamSplitterSpec::balanced(0, 1)).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, -FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn coherent_covariance_general_angle() {
        let (x, y) = (C64::new(0.5, 0.4), C64::new(-0.7, 0.2));
        let angle = 0.37;
        let c = 20;
        let out = coherent2(x, y, c).apply_beam_splitter(BeamSplitterSpec::new(0, 1, angle)).unwrap();
        let m = BeamSplitterSpec::new(0, 1, angle).mode_matrix();
        let want = coherent2(m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y, c);
        assert_abs_diff_eq!(out.overlap(&want).unwrap().norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn splitter_on_non_adjacent_modes() {
        let c = 14;
        let s = coherent2(C64::new(0.6, 0.0), C64::new(0.0, 0.0), c)
            .tensor(&FockVector::coherent(C64::new(0.6, 0.0), c).unwrap())
            .unwrap();
        let out = s.apply_beam_splitter(BeamSplitterSpec::balanced(0, 2)).unwrap();
        let r = 0.6 * SQRT_2;
        let want = coherent2(C64::new(r, 0.0), C64::new(0.0, 0.0), c)
            .tensor(&FockVector::coherent(C64::new(0.0, 0.0), c).unwrap())
            .unwrap();
        assert_abs_diff_eq!(out.overlap(&want).unwrap().re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_same_mode() {
        let s = FockVector::vacuum(2, 2).unwrap();
        assert!(s.apply_beam_splitter(BeamSplitterSpec::new(1, 1, 0.2)).is_err());
        assert!(s.apply_beam_splitter(BeamSplitterSpec::new(0, 2, 0.2)).is_err());
    }
}
