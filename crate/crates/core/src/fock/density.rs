use num_complex::Complex64 as C64;

use super::state::FockVector;
use crate::error::{Error, Result};

/// Mixed state over the same truncated multimode basis as [`FockVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    modes: usize,
    cutoff: usize,
    dim: usize,
    matrix: Vec<C64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl DensityOperator {
    pub fn from_pure(state: &FockVector) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut matrix = Vec::with_capacity(dim * dim);
        for a in amps {
            matrix.extend(amps.iter().map(|b| a * b.conj()));
        }
        Self { modes: state.modes(), cutoff: state.cutoff(), dim, matrix }
    }

    /// Reduced state of a pure state after tracing out `traced` modes.
    pub fn reduced(state: &FockVector, traced: &[usize]) -> Result<Self> {
        for &m in traced {
            state.check_mode(m)?;
        }
        let kept: Vec<usize> = (0..state.modes()).filter(|m| !traced.contains(m)).collect();
        if kept.is_empty() {
            return Err(Error::ShapeMismatch("cannot trace out every mode".into()));
        }
        let d = state.dim();
        let kept_dim = d.pow(kept.len() as u32);
        let traced_dim = d.pow(traced.len() as u32);
        let kept_strides: Vec<usize> = kept.iter().map(|&m| state.stride(m)).collect();
        let traced_strides: Vec<usize> = traced.iter().map(|&m| state.stride(m)).collect();
        let index = |strides: &[usize], mut key: usize| {
            let mut idx = 0;
            for s in strides.iter().rev() {
                idx += (key % d) * s;
                key /= d;
            }
            idx
        };
        let amps = state.amplitudes();
        let mut matrix = vec![C64::new(0.0, 0.0); kept_dim * kept_dim];
        for t in 0..traced_dim {
            let toff = index(&traced_strides, t);
            let column: Vec<C64> = (0..kept_dim).map(|k| amps[toff + index(&kept_strides, k)]).collect();
            for i in 0..kept_dim {
                if column[i].norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..kept_dim {
                    matrix[i * kept_dim + j] += column[i] * column[j].conj();
                }
            }
        }
        Ok(Self { modes: kept.len(), cutoff: state.cutoff(), dim: kept_dim, matrix })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.matrix[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.matrix[i * self.dim + i].re).sum()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.element(i, j) - self.element(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &FockVector) -> Result<f64> {
        if psi.modes() != self.modes || psi.cutoff() != self.cutoff {
            return Err(Error::ShapeMismatch("expectation against a differently shaped state".into()));
        }
        let v = psi.amplitudes();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            let row = &self.matrix[i * self.dim..(i + 1) * self.dim];
            let rv: C64 = row.iter().zip(v).map(|(r, x)| r * x).sum();
            acc += v[i].conj() * rv;
        }
        Ok(acc.re)
    }

    /// Photon loss on `mode`: coupling to a vacuum ancilla through a splitter of
    /// intensity transmission `1 - eta`, ancilla traced out (Kraus form).
    pub fn loss_channel(&self, mode: usize, eta: f64) -> Result<DensityOperator> {
        if mode >= self.modes {
            return Err(Error::InvalidMode { mode, modes: self.modes });
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("loss fraction must be in [0,1], got {eta}")));
        }
        let d = self.cutoff + 1;
        let stride = d.pow((self.modes - 1 - mode) as u32);
        let t2 = 1.0 - eta;
        // kraus[n][k] = sqrt(C(n,k) (1-eta)^(n-k) eta^k)
        let kraus: Vec<Vec<f64>> = (0..d)
            .map(|n| {
                (0..=n)
                    .map(|k| (binomial(n, k) * t2.powi((n - k) as i32) * eta.powi(k as i32)).sqrt())
                    .collect()
            })
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); self.matrix.len()];
        for i in 0..self.dim {
            let ni = (i / stride) % d;
            for j in 0..self.dim {
                let v = self.matrix[i * self.dim + j];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                let nj = (j / stride) % d;
                for k in 0..=ni.min(nj) {
                    let w = kraus[ni][k] * kraus[nj][k];
                    out[(i - k * stride) * self.dim + (j - k * stride)] += v * w;
                }
            }
        }
        Ok(DensityOperator { modes: self.modes, cutoff: self.cutoff, dim: self.dim, matrix: out })
    }
}
