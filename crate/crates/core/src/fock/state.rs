use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};

/// Default bound on the photon-number mass discarded by truncation.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Largest number of amplitudes a single state may hold (2^25, about 512 MiB).
pub const AMPLITUDE_BUDGET: usize = 1 << 25;

/// Probability mass of a Poisson distribution with mean `|a|^2` above `cutoff`.
pub fn tail_mass(amplitude: f64, cutoff: usize) -> f64 {
    let mean = amplitude * amplitude;
    if mean == 0.0 {
        return 0.0;
    }
    // sum the discarded terms directly in log space so tiny tails stay resolved
    let log_mean = mean.ln();
    let mut log_term = -mean;
    for n in 1..=cutoff + 1 {
        log_term += log_mean - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = cutoff + 1;
    loop {
        let term = log_term.exp();
        tail += term;
        n += 1;
        log_term += log_mean - (n as f64).ln();
        if (n as f64) > mean && (term < tail * 1e-17 || term == 0.0) {
            break;
        }
    }
    tail.min(1.0)
}

/// Cutoff rule `ceil(a^2 + 8a + 10)`, raised if needed until the tail bound holds.
pub fn default_cutoff(max_amplitude: f64) -> usize {
    let a = max_amplitude.abs();
    let mut cutoff = (a * a + 8.0 * a + 10.0).ceil() as usize;
    while tail_mass(a, cutoff) > TAIL_TOLERANCE {
        cutoff += 1;
    }
    cutoff
}

/// Smallest cutoff whose truncation tail is below `tolerance`.
pub fn minimal_cutoff(amplitude: f64, tolerance: f64) -> usize {
    let mut cutoff = 0;
    while tail_mass(amplitude, cutoff) > tolerance {
        cutoff += 1;
    }
    cutoff
}

/// A pure state of `modes` bosonic modes, each truncated at `cutoff` photons.
///
/// Amplitudes are stored row-major over occupation tuples with mode 0 the most
/// significant digit. `norm_weight` accumulates the probabilities of every
/// projection the state has been through.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    modes: usize,
    cutoff: usize,
    amplitudes: Vec<C64>,
    norm_weight: f64,
}

fn checked_len(modes: usize, cutoff: usize) -> Result<usize> {
    let dim = cutoff + 1;
    let mut len: usize = 1;
    for _ in 0..modes {
        len = len.checked_mul(dim).ok_or(Error::ResourceLimit {
            requested: usize::MAX,
            limit: AMPLITUDE_BUDGET,
        })?;
    }
    if len > AMPLITUDE_BUDGET {
        return Err(Error::ResourceLimit { requested: len, limit: AMPLITUDE_BUDGET });
    }
    Ok(len)
}

/// Normalized single-mode coherent amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)`.
pub(crate) fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(term);
    for n in 1..=cutoff {
        term = term * alpha / (n as f64).sqrt();
        amps.push(term);
    }
    amps
}

impl FockVector {
    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ShapeMismatch("a state needs at least one mode".into()));
        }
        let len = checked_len(modes, cutoff)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); len];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(Self { modes, cutoff, amplitudes, norm_weight: 1.0 })
    }

    /// Builds a state from raw amplitudes; the length must be `(cutoff+1)^modes`.
    pub fn from_amplitudes(modes: usize, cutoff: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let len = checked_len(modes, cutoff)?;
        if amplitudes.len() != len || modes == 0 {
            return Err(Error::ShapeMismatch(format!(
                "expected {len} amplitudes for {modes} modes at cutoff {cutoff}, got {}",
                amplitudes.len()
            )));
        }
        Ok(Self { modes, cutoff, amplitudes, norm_weight: 1.0 })
    }

    /// Single-mode coherent state `|alpha>`, renormalized after truncation.
    pub fn coherent(alpha: C64, cutoff: usize) -> Result<Self> {
        let tail = tail_mass(alpha.norm(), cutoff);
        if tail > TAIL_TOLERANCE {
            return Err(Error::CutoffTooSmall { amplitude: alpha.norm(), cutoff, tail });
        }
        let mut state = Self::from_amplitudes(1, cutoff, coherent_amplitudes(alpha, cutoff))?;
        state.normalize()?;
        Ok(state)
    }

    /// Diagonal state `N (|alpha> + sign |-alpha>)`: even Fock support for
    /// `sign = +1`, odd for `sign = -1`.
    pub fn cat_state(alpha: f64, sign: i8, cutoff: usize) -> Result<Self> {
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(Error::Domain(format!("cat amplitude must be >= 0, got {alpha}")));
        }
        let parity = if sign >= 0 { 0 } else { 1 };
        if alpha == 0.0 && parity == 1 {
            return Err(Error::DegenerateState("odd diagonal state at alpha = 0 is the zero vector".into()));
        }
        let tail = tail_mass(alpha, cutoff);
        if tail > TAIL_TOLERANCE {
            return Err(Error::CutoffTooSmall { amplitude: alpha, cutoff, tail });
        }
        let mut amps = coherent_amplitudes(C64::new(alpha, 0.0), cutoff);
        for (n, amp) in amps.iter_mut().enumerate() {
            if n % 2 != parity {
                *amp = C64::new(0.0, 0.0);
            }
        }
        let mut state = Self::from_amplitudes(1, cutoff, amps)?;
        state.normalize()?;
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_weight(&self) -> f64 {
        self.norm_weight
    }

    pub fn set_norm_weight(&mut self, weight: f64) {
        self.norm_weight = weight;
    }

    pub(crate) fn stride(&self, mode: usize) -> usize {
        self.dim().pow((self.modes - 1 - mode) as u32)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::InvalidMode { mode, modes: self.modes });
        }
        Ok(())
    }

    /// Flat index of an occupation tuple.
    pub fn index_of(&self, occupation: &[usize]) -> usize {
        occupation.iter().fold(0, |acc, &n| acc * self.dim() + n)
    }

    /// Occupation tuple of a flat index.
    pub fn occupation_of(&self, mut index: usize) -> Vec<usize> {
        let dim = self.dim();
        let mut occ = vec![0; self.modes];
        for slot in occ.iter_mut().rev() {
            *slot = index % dim;
            index /= dim;
        }
        occ
    }

    pub fn amplitude(&self, occupation: &[usize]) -> C64 {
        self.amplitudes[self.index_of(occupation)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateState("cannot normalize the zero vector".into()));
        }
        let inv = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn scale(&mut self, factor: C64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &FockVector) -> Result<C64> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch(format!(
                "overlap of ({} modes, cutoff {}) with ({} modes, cutoff {})",
                self.modes, self.cutoff, other.modes, other.cutoff
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product; mode counts add and amplitudes multiply.
    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        if self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch(format!(
                "tensor of cutoffs {} and {}",
                self.cutoff, other.cutoff
            )));
        }
        let modes = self.modes + other.modes;
        let len = checked_len(modes, self.cutoff)?;
        let mut amplitudes = Vec::with_capacity(len);
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(FockVector {
            modes,
            cutoff: self.cutoff,
            amplitudes,
            norm_weight: self.norm_weight * other.norm_weight,
        })
    }

    /// Reorders modes: mode `j` of the result is mode `order[j]` of `self`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<FockVector> {
        let mut seen = vec![false; self.modes];
        if order.len() != self.modes {
            return Err(Error::ShapeMismatch("permutation length differs from mode count".into()));
        }
        for &m in order {
            self.check_mode(m)?;
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::ShapeMismatch(format!("mode {m} listed twice")));
            }
        }
        let strides: Vec<usize> = order.iter().map(|&m| self.stride(m)).collect();
        let dim = self.dim();
        let amplitudes = (0..self.amplitudes.len())
            .map(|j| {
                let mut rem = j;
                let mut idx = 0;
                for s in strides.iter().rev() {
                    idx += (rem % dim) * s;
                    rem /= dim;
                }
                self.amplitudes[idx]
            })
            .collect();
        Ok(FockVector { modes: self.modes, cutoff: self.cutoff, amplitudes, norm_weight: self.norm_weight })
    }

    /// Multiplies occupation `n` of `mode` by `e^{i n phi}`.
    pub fn phase_shift(&self, mode: usize, phi: f64) -> Result<FockVector> {
        let mut out = self.clone();
        out.phase_shift_in_place(mode, phi)?;
        Ok(out)
    }

    pub fn phase_shift_in_place(&mut self, mode: usize, phi: f64) -> Result<()> {
        self.check_mode(mode)?;
        let stride = self.stride(mode);
        let dim = self.dim();
        let phases: Vec<C64> = (0..dim).map(|n| C64::from_polar(1.0, n as f64 * phi)).collect();
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp *= phases[(i / stride) % dim];
        }
        Ok(())
    }

    /// Re-expresses the state at a different cutoff. Returns the state and the
    /// probability weight discarded by truncation (zero when growing).
    pub fn with_cutoff(&self, cutoff: usize) -> Result<(FockVector, f64)> {
        let mut out = FockVector::vacuum(self.modes, cutoff)?;
        out.amplitudes[0] = C64::new(0.0, 0.0);
        out.norm_weight = self.norm_weight;
        let mut dropped = 0.0;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let occ = self.occupation_of(i);
            if occ.iter().all(|&n| n <= cutoff) {
                let j = out.index_of(&occ);
                out.amplitudes[j] = *amp;
            } else {
                dropped += amp.norm_sqr();
            }
        }
        Ok((out, dropped))
    }

    /// Total photon-number parity weights `(even, odd)`.
    pub fn parity_weights(&self) -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let total: usize = self.occupation_of(i).iter().sum();
            if total % 2 == 0 {
                even += amp.norm_sqr();
            } else {
                odd += amp.norm_sqr();
            }
        }
        (even, odd)
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        if modes.is_empty() {
            return Err(Error::ShapeMismatch("no modes selected for measurement".into()));
        }
        for (k, &m) in modes.iter().enumerate() {
            self.check_mode(m)?;
            if modes[..k].contains(&m) {
                return Err(Error::ShapeMismatch(format!("mode {m} listed twice")));
            }
        }
        Ok(())
    }

    /// Joint photon-number distribution of `modes`, as a dense table indexed
    /// row-major by the measured occupations (first listed mode most significant).
    /// Probabilities are relative to the current squared norm.
    pub fn outcome_distribution(&self, modes: &[usize]) -> Result<Vec<f64>> {
        self.check_modes(modes)?;
        let dim = self.dim();
        let strides: Vec<usize> = modes.iter().map(|&m| self.stride(m)).collect();
        let mut dist = vec![0.0; dim.pow(modes.len() as u32)];
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::DegenerateState("zero vector has no outcome distribution".into()));
        }
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let key = strides.iter().fold(0, |acc, &s| acc * dim + (i / s) % dim);
            dist[key] += amp.norm_sqr();
        }
        dist.iter_mut().for_each(|p| *p /= total);
        Ok(dist)
    }

    /// Decodes a key of [`outcome_distribution`](Self::outcome_distribution).
    pub fn outcome_of_key(&self, count: usize, mut key: usize) -> Vec<usize> {
        let dim = self.dim();
        let mut out = vec![0; count];
        for slot in out.iter_mut().rev() {
            *slot = key % dim;
            key /= dim;
        }
        out
    }

    /// Projects `modes` onto photon numbers `outcome`. Returns the outcome
    /// probability and the normalized post-measurement state of the remaining
    /// modes; its `norm_weight` is multiplied by the probability.
    pub fn project_outcome(&self, modes: &[usize], outcome: &[usize]) -> Result<(f64, FockVector)> {
        self.check_modes(modes)?;
        if outcome.len() != modes.len() {
            return Err(Error::ShapeMismatch("outcome length differs from mode count".into()));
        }
        let dim = self.dim();
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::DegenerateState("projecting the zero vector".into()));
        }
        if outcome.iter().any(|&n| n > self.cutoff) {
            return Err(Error::ZeroProbability);
        }
        let remaining = self.modes - modes.len();
        let kept_modes: Vec<usize> = (0..self.modes).filter(|m| !modes.contains(m)).collect();
        let out_len = dim.pow(remaining as u32);
        let mut amps = vec![C64::new(0.0, 0.0); out_len.max(1)];

        // walk every kept-mode occupation and read the matching amplitude
        let fixed: usize = modes.iter().zip(outcome).map(|(&m, &n)| n * self.stride(m)).sum();
        let kept_strides: Vec<usize> = kept_modes.iter().map(|&m| self.stride(m)).collect();
        let mut weight = 0.0;
        for (j, slot) in amps.iter_mut().enumerate().take(out_len) {
            let mut rem = j;
            let mut idx = fixed;
            for s in kept_strides.iter().rev() {
                idx += (rem % dim) * s;
                rem /= dim;
            }
            *slot = self.amplitudes[idx];
            weight += slot.norm_sqr();
        }
        let probability = weight / total;
        if probability == 0.0 {
            return Err(Error::ZeroProbability);
        }
        if remaining == 0 {
            let mut state = FockVector::vacuum(1, 0)?;
            state.norm_weight = self.norm_weight * probability;
            return Ok((probability, state));
        }
        let mut state = FockVector {
            modes: remaining,
            cutoff: self.cutoff,
            amplitudes: amps,
            norm_weight: self.norm_weight * probability,
        };
        state.normalize()?;
        Ok((probability, state))
    }

    /// Photon counting on `modes`: samples an outcome with Born probabilities
    /// and collapses onto it.
    pub fn count_photons<R: Rng + ?Sized>(&self, modes: &[usize], rng: &mut R) -> Result<(Vec<usize>, FockVector)> {
        let dist = self.outcome_distribution(modes)?;
        let key = sample_index(&dist, rng);
        let outcome = self.outcome_of_key(modes.len(), key);
        let (_, collapsed) = self.project_outcome(modes, &outcome)?;
        Ok((outcome, collapsed))
    }
}

/// Draws an index from a discrete distribution (weights need not sum to 1).
pub(crate) fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coherent_zero_is_vacuum() {
        let s = FockVector::coherent(C64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn coherent_vacuum_amplitude() {
        let s = FockVector::coherent(C64::new(1.0, 0.0), 20).unwrap();
        // closed form e^{-1/2}
        assert_abs_diff_eq!(s.amplitudes()[0].re, 0.606_530_659_712_633_4, epsilon = 1e-12);
    }

    #[test]
    fn cutoff_too_small_is_reported() {
        let err = FockVector::coherent(C64::new(3.0, 0.0), 5).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { .. }));
    }

    #[test]
    fn overlap_of_opposite_coherent_states() {
        for &alpha in &[1.0f64, 1.5] {
            let c = default_cutoff(alpha);
            let plus = FockVector::coherent(C64::new(alpha, 0.0), c).unwrap();
            let minus = FockVector::coherent(C64::new(-alpha, 0.0), c).unwrap();
            let ov = minus.overlap(&plus).unwrap();
            assert_abs_diff_eq!(ov.re, (-2.0 * alpha * alpha).exp(), epsilon = 1e-12);
            assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cat_parity_support() {
        let even = FockVector::cat_state(1.3, 1, 30).unwrap();
        let odd = FockVector::cat_state(1.0, -1, 30).unwrap();
        for n in (1..=30).step_by(2) {
            assert_eq!(even.amplitudes()[n], C64::new(0.0, 0.0));
        }
        assert_eq!(odd.amplitudes()[0], C64::new(0.0, 0.0));
        let even1 = FockVector::cat_state(1.0, 1, 30).unwrap();
        assert_abs_diff_eq!(even1.overlap(&odd).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unnormalized_cat_norm_matches_overlap_formula() {
        // Fock-sum oracle for ||(|a> + |-a>)|| at a = 1
        let c = 30;
        let plus = coherent_amplitudes(C64::new(1.0, 0.0), c);
        let minus = coherent_amplitudes(C64::new(-1.0, 0.0), c);
        let norm: f64 = plus.iter().zip(&minus).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>().sqrt();
        let closed = (2.0 * (1.0 + (-2.0f64).exp())).sqrt();
        assert_abs_diff_eq!(norm, closed, epsilon = 1e-12);
        assert_abs_diff_eq!(closed, 1.506_87, epsilon = 1e-5);
    }

    #[test]
    fn odd_cat_at_zero_is_degenerate() {
        assert!(matches!(FockVector::cat_state(0.0, -1, 4), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn tensor_matches_elementwise_product() {
        let c = 18;
        let a = FockVector::coherent(C64::new(0.7, 0.2), c).unwrap();
        let b = FockVector::coherent(C64::new(-0.4, 0.9), c).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.modes(), 2);
        for n in 0..=c {
            for m in 0..=c {
                let want = a.amplitudes()[n] * b.amplitudes()[m];
                assert!((ab.amplitude(&[n, m]) - want).norm() < 1e-12);
            }
        }
        assert_abs_diff_eq!(ab.norm(), a.norm() * b.norm(), epsilon = 1e-12);
        let vac = FockVector::vacuum(1, 3).unwrap().tensor(&FockVector::vacuum(1, 3).unwrap()).unwrap();
        assert_eq!(vac, FockVector::vacuum(2, 3).unwrap());
    }

    #[test]
    fn permute_swaps_tensor_factors() {
        let c = 16;
        let a = FockVector::coherent(C64::new(0.7, 0.2), c).unwrap();
        let b = FockVector::cat_state(0.5, -1, c).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.permute_modes(&[1, 0]).unwrap(), b.tensor(&a).unwrap());
        assert!(ab.permute_modes(&[0, 0]).is_err());
    }

    #[test]
    fn tail_mass_matches_closed_form() {
        assert_abs_diff_eq!(tail_mass(1.0, 0), 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        // P(n > 1) at mean 4 is 1 - 5 e^-4
        assert_abs_diff_eq!(tail_mass(2.0, 1), 1.0 - 5.0 * (-4.0f64).exp(), epsilon = 1e-14);
        // single dominant term far out in the tail
        let t = tail_mass(0.1, 20);
        let first = (-0.01f64).exp() * 0.01f64.powi(21) / (1..=21).map(|k| k as f64).product::<f64>();
        assert!((t / first - 1.0).abs() < 1e-3);
    }

    #[test]
    fn tensor_respects_budget() {
        let big = FockVector::vacuum(4, 63).unwrap();
        let err = big.tensor(&FockVector::vacuum(1, 63).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn pi_phase_maps_alpha_to_minus_alpha() {
        let c = default_cutoff(1.2);
        let s = FockVector::coherent(C64::new(1.2, 0.0), c).unwrap();
        let flipped = s.phase_shift(0, std::f64::consts::PI).unwrap();
        let target = FockVector::coherent(C64::new(-1.2, 0.0), c).unwrap();
        assert_abs_diff_eq!(flipped.overlap(&target).unwrap().norm(), 1.0, epsilon = 1e-12);
        let cat = FockVector::cat_state(1.2, 1, c).unwrap();
        let cat_flipped = cat.phase_shift(0, std::f64::consts::PI).unwrap();
        for (a, b) in cat.amplitudes().iter().zip(cat_flipped.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_vacuum_probability_is_poisson() {
        let s = FockVector::coherent(C64::new(1.0, 0.0), 20).unwrap();
        let dist = s.outcome_distribution(&[0]).unwrap();
        assert_abs_diff_eq!(dist[0], (-1.0f64).exp(), epsilon = 1e-12);
        let total: f64 = dist.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projecting_vacuum_onto_one_photon() {
        let vac = FockVector::vacuum(2, 3).unwrap();
        assert_eq!(vac.project_outcome(&[0], &[1]).unwrap_err(), Error::ZeroProbability);
        let (p, rest) = vac.project_outcome(&[1], &[0]).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(rest.modes(), 1);
    }

    #[test]
    fn counting_even_cat_gives_even_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cat = FockVector::cat_state(1.4, 1, default_cutoff(1.4)).unwrap();
        let vac = FockVector::vacuum(2, 4).unwrap();
        let (out, _) = vac.count_photons(&[0, 1], &mut rng).unwrap();
        assert_eq!(out, vec![0, 0]);
        for _ in 0..200 {
            let (out, collapsed) = cat.count_photons(&[0], &mut rng).unwrap();
            assert_eq!(out[0] % 2, 0);
            assert!(collapsed.norm_weight() <= 1.0);
        }
    }

    #[test]
    fn cutoff_change_reports_dropped_weight() {
        let s = FockVector::coherent(C64::new(1.0, 0.0), 20).unwrap();
        let (small, dropped) = s.with_cutoff(3).unwrap();
        assert_abs_diff_eq!(small.norm_sqr() + dropped, 1.0, epsilon = 1e-12);
        let (big, dropped) = s.with_cutoff(25).unwrap();
        assert_eq!(dropped, 0.0);
        assert_abs_diff_eq!(big.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn default_cutoff_meets_tail_bound() {
        for &a in &[0.0, 0.5, 1.56, 2.2, 3.0] {
            assert!(tail_mass(a, default_cutoff(a)) <= TAIL_TOLERANCE);
        }
    }
}
