//! Logical-coefficient algebra and least-squares decoding onto products of
//! coherent states `|±a_0> ⊗ |±a_1> ⊗ ...`.
//!
//! Coefficient vectors over `k` modes are indexed by a `k`-bit sign pattern,
//! mode 0 in the most significant bit; a set bit means the `-a` branch.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, FockVector};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Result of fitting a state onto the coherent-product span.
#[derive(Clone, Debug)]
pub struct CoherentFit {
    pub coefficients: Vec<C64>,
    /// Norm of the part of the state outside the span.
    pub residual: f64,
}

fn basis_vectors(amplitudes: &[f64], cutoff: usize) -> Vec<[Vec<C64>; 2]> {
    amplitudes
        .iter()
        .map(|&a| {
            [
                coherent_amplitudes(C64::new(a, 0.0), cutoff),
                coherent_amplitudes(C64::new(-a, 0.0), cutoff),
            ]
        })
        .collect()
}

/// `<e_i|psi>` for every sign pattern `i`, contracting one mode at a time.
fn contract(amps: &[C64], dim: usize, vecs: &[[Vec<C64>; 2]]) -> Vec<C64> {
    let Some((last, rest)) = vecs.split_last() else {
        return vec![amps[0]];
    };
    let outer = amps.len() / dim;
    let mut parts = Vec::with_capacity(2);
    for v in last {
        let reduced: Vec<C64> = (0..outer)
            .map(|r| {
                amps[r * dim..(r + 1) * dim]
                    .iter()
                    .zip(v)
                    .map(|(x, e)| e.conj() * x)
                    .sum()
            })
            .collect();
        parts.push(contract(&reduced, dim, rest));
    }
    let half = parts[0].len();
    let mut out = vec![ZERO; 2 * half];
    for prefix in 0..half {
        out[prefix << 1] = parts[0][prefix];
        out[(prefix << 1) | 1] = parts[1][prefix];
    }
    out
}

/// `sum_i c_i e_i` expanded into the Fock basis.
fn expand(coeffs: &[C64], dim: usize, vecs: &[[Vec<C64>; 2]]) -> Vec<C64> {
    let k = vecs.len();
    // table of shape (dim^j, 2^(k-j)) with the processed modes spelled out
    let mut table = coeffs.to_vec();
    let mut prefixes = 1;
    for (j, pair) in vecs.iter().enumerate() {
        let remaining = 1usize << (k - j - 1);
        let mut next = vec![ZERO; prefixes * dim * remaining];
        for p in 0..prefixes {
            for sign in 0..2 {
                for r in 0..remaining {
                    let c = table[p * 2 * remaining + sign * remaining + r];
                    if c == ZERO {
                        continue;
                    }
                    for (n, e) in pair[sign].iter().enumerate() {
                        next[(p * dim + n) * remaining + r] += c * e;
                    }
                }
            }
        }
        table = next;
        prefixes *= dim;
    }
    table
}

/// Solves `m x = b` for a small dense complex system (Gaussian elimination with
/// partial pivoting). Returns `None` when the matrix is numerically singular.
pub(crate) fn solve(mut m: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    let scale = m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[pivot][col].norm() <= 1e-13 * scale.max(1e-300) {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == ZERO {
                continue;
            }
            for k in col..n {
                let sub = f * m[col][k];
                m[row][k] -= sub;
            }
            let sub = f * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![ZERO; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Least-squares fit of `state` onto `span{ ⊗_j |±a_j> }`.
pub fn fit_coherent_products(state: &FockVector, amplitudes: &[f64]) -> Result<CoherentFit> {
    if amplitudes.len() != state.modes() {
        return Err(Error::ShapeMismatch(format!(
            "{} amplitudes for a {}-mode state",
            amplitudes.len(),
            state.modes()
        )));
    }
    if amplitudes.iter().any(|&a| a == 0.0) {
        return Err(Error::DegenerateState("coherent basis collapses at amplitude 0".into()));
    }
    let dim = state.dim();
    let vecs = basis_vectors(amplitudes, state.cutoff());
    let k = amplitudes.len();
    let count = 1usize << k;

    // single-mode overlaps <v_s|v_t>, combined into the product Gram matrix
    let mode_gram: Vec<[[C64; 2]; 2]> = vecs
        .iter()
        .map(|pair| {
            let mut g = [[ZERO; 2]; 2];
            for s in 0..2 {
                for t in 0..2 {
                    g[s][t] = pair[s].iter().zip(&pair[t]).map(|(x, y)| x.conj() * y).sum();
                }
            }
            g
        })
        .collect();
    let gram: Vec<Vec<C64>> = (0..count)
        .map(|i| {
            (0..count)
                .map(|j| {
                    (0..k).fold(C64::new(1.0, 0.0), |acc, m| {
                        let bit = k - 1 - m;
                        acc * mode_gram[m][(i >> bit) & 1][(j >> bit) & 1]
                    })
                })
                .collect()
        })
        .collect();
    let projections = contract(state.amplitudes(), dim, &vecs);
    let coefficients = solve(gram, projections)
        .ok_or_else(|| Error::DegenerateState("coherent basis is numerically singular".into()))?;
    let recon = expand(&coefficients, dim, &vecs);
    let residual = state
        .amplitudes()
        .iter()
        .zip(&recon)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(CoherentFit { coefficients, residual })
}

/// Builds `sum_i c_i ⊗_j |±a_j>` in the Fock basis (not normalized).
pub fn coherent_superposition(coefficients: &[C64], amplitudes: &[f64], cutoff: usize) -> Result<FockVector> {
    if coefficients.len() != 1 << amplitudes.len() {
        return Err(Error::ShapeMismatch("coefficient count must be 2^modes".into()));
    }
    let vecs = basis_vectors(amplitudes, cutoff);
    let amps = expand(coefficients, cutoff + 1, &vecs);
    FockVector::from_amplitudes(amplitudes.len(), cutoff, amps)
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `|<a|b>|^2 / (|a|^2 |b|^2)`, treating the coefficient vectors as orthonormal-basis
/// vectors (the coefficient-level notion of fidelity).
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner(a, b).norm_sqr() / (na * na * nb * nb)
}

/// Largest elementwise difference after normalizing both vectors and aligning
/// the global phase of `b` to `a`.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let ip = inner(b, a);
    let phase = if ip.norm() == 0.0 { C64::new(1.0, 0.0) } else { ip / ip.norm() };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / na - y * phase / nb).norm())
        .fold(0.0, f64::max)
}

/// Applies X on qubit `q` of an `n`-qubit coefficient vector.
pub fn apply_x(c: &[C64], q: usize, n: usize) -> Vec<C64> {
    let bit = 1 << (n - 1 - q);
    (0..c.len()).map(|i| c[i ^ bit]).collect()
}

/// Applies Z on qubit `q` of an `n`-qubit coefficient vector.
pub fn apply_z(c: &[C64], q: usize, n: usize) -> Vec<C64> {
    let bit = 1 << (n - 1 - q);
    c.iter()
        .enumerate()
        .map(|(i, &x)| if i & bit != 0 { -x } else { x })
        .collect()
}

/// `Z(theta) = exp(i theta Z / 2) = diag(e^{i theta/2}, e^{-i theta/2})` on qubit `q`.
pub fn apply_zrot(c: &[C64], theta: f64, q: usize, n: usize) -> Vec<C64> {
    let bit = 1 << (n - 1 - q);
    let plus = C64::from_polar(1.0, theta / 2.0);
    let minus = C64::from_polar(1.0, -theta / 2.0);
    c.iter()
        .enumerate()
        .map(|(i, &x)| if i & bit != 0 { x * minus } else { x * plus })
        .collect()
}

pub fn apply_h(c: &[C64], q: usize, n: usize) -> Vec<C64> {
    let bit = 1 << (n - 1 - q);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..c.len())
        .map(|i| {
            let (lo, hi) = (c[i & !bit], c[i | bit]);
            if i & bit == 0 {
                (lo + hi) * s
            } else {
                (lo - hi) * s
            }
        })
        .collect()
}

pub fn apply_cz(c: &[C64], a: usize, b: usize, n: usize) -> Vec<C64> {
    let (ba, bb) = (1 << (n - 1 - a), 1 << (n - 1 - b));
    c.iter()
        .enumerate()
        .map(|(i, &x)| if i & ba != 0 && i & bb != 0 { -x } else { x })
        .collect()
}

/// Kronecker product of coefficient vectors (first factor most significant).
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::default_cutoff;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fit_recovers_two_mode_superposition() {
        let amps = [0.9, 0.6];
        let cutoff = default_cutoff(0.9);
        let coeffs = vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.7, 0.0), C64::new(0.0, -0.4)];
        let state = coherent_superposition(&coeffs, &amps, cutoff).unwrap();
        let fit = fit_coherent_products(&state, &amps).unwrap();
        assert!(fit.residual < 1e-10);
        assert!(phase_aligned_distance(&fit.coefficients, &coeffs) < 1e-9);
    }

    #[test]
    fn fit_reports_leakage() {
        let cutoff = 12;
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[1] = C64::new(1.0, 0.0);
        let one_photon = FockVector::from_amplitudes(1, cutoff, amps).unwrap();
        let fit = fit_coherent_products(&one_photon, &[1.0]).unwrap();
        assert!(fit.residual > 1e-3);
    }

    #[test]
    fn zero_amplitude_basis_is_degenerate() {
        let vac = FockVector::vacuum(1, 4).unwrap();
        assert!(matches!(fit_coherent_products(&vac, &[0.0]), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn coefficient_gates() {
        let c = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(apply_x(&c, 0, 1), vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let h = apply_h(&c, 0, 1);
        assert_abs_diff_eq!(h[0].re, h[1].re, epsilon = 1e-15);
        let hh = apply_h(&h, 0, 1);
        assert!(phase_aligned_distance(&hh, &c) < 1e-15);
        let plus = vec![C64::new(1.0, 0.0); 4];
        let cz = apply_cz(&plus, 0, 1, 2);
        assert_eq!(cz[3], C64::new(-1.0, 0.0));
        assert_abs_diff_eq!(fidelity(&plus, &apply_zrot(&plus, 0.0, 1, 2)), 1.0, epsilon = 1e-15);
    }
}
