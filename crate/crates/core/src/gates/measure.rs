//! Photon-counting measurements of coherent-state qubits: the Z-basis
//! measurement against a reference coherent state and the two-mode Bell
//! measurement. Both mix two modes on a balanced splitter and count both
//! outputs; seeing no photons at all is the failure outcome.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{BeamSplitterSpec, FockVector};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Bell1,
    Bell2,
    Bell3,
    Bell4,
    ZZero,
    ZOne,
    Failure,
}

impl Outcome {
    pub fn is_failure(self) -> bool {
        self == Outcome::Failure
    }

    pub fn bell_index(self) -> Option<usize> {
        match self {
            Outcome::Bell1 => Some(0),
            Outcome::Bell2 => Some(1),
            Outcome::Bell3 => Some(2),
            Outcome::Bell4 => Some(3),
            _ => None,
        }
    }
}

/// Pending Pauli correction: the physical output equals `Z^z X^x` applied to
/// the intended logical state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameUpdate {
    pub x: bool,
    pub z: bool,
}

impl FrameUpdate {
    pub const IDENTITY: FrameUpdate = FrameUpdate { x: false, z: false };

    pub fn new(x: bool, z: bool) -> Self {
        Self { x, z }
    }

    pub fn compose(self, other: FrameUpdate) -> FrameUpdate {
        FrameUpdate { x: self.x ^ other.x, z: self.z ^ other.z }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    pub photon_counts: Vec<usize>,
    pub pauli_frame_update: FrameUpdate,
}

/// Frame left on the teleported qubit by each Bell outcome, indexed as
/// [`Outcome::bell_index`]. Bell1/Bell2: photons in the first splitter output
/// with even/odd count; Bell3/Bell4: second output, even/odd.
pub const BELL_FRAME: [FrameUpdate; 4] = [
    FrameUpdate { x: false, z: false },
    FrameUpdate { x: false, z: true },
    FrameUpdate { x: true, z: false },
    FrameUpdate { x: true, z: true },
];

/// Classifies Bell-measurement counts `(first output, second output)`.
pub fn classify_bell(n0: usize, n1: usize) -> Result<Outcome> {
    match (n0, n1) {
        (0, 0) => Ok(Outcome::Failure),
        (n, 0) => Ok(if n % 2 == 0 { Outcome::Bell1 } else { Outcome::Bell2 }),
        (0, n) => Ok(if n % 2 == 0 { Outcome::Bell3 } else { Outcome::Bell4 }),
        _ => Err(Error::Consistency(format!("photons in both Bell outputs ({n0}, {n1})"))),
    }
}

/// Classifies Z-measurement counts `(qubit output, reference output)`.
pub fn classify_z(n0: usize, n1: usize) -> Result<Outcome> {
    match (n0, n1) {
        (0, 0) => Ok(Outcome::Failure),
        (_, 0) => Ok(Outcome::ZZero),
        (0, _) => Ok(Outcome::ZOne),
        _ => Err(Error::Consistency(format!("photons in both Z outputs ({n0}, {n1})"))),
    }
}

fn frame_of(outcome: Outcome) -> FrameUpdate {
    outcome.bell_index().map_or(FrameUpdate::IDENTITY, |i| BELL_FRAME[i])
}

/// One deterministic measurement branch.
#[derive(Clone, Debug)]
pub struct Branch {
    pub record: MeasurementRecord,
    pub probability: f64,
    /// Normalized state of the unmeasured modes, `None` when nothing remains.
    pub state: Option<FockVector>,
}

/// Every branch of a two-mode count, plus the (ideally zero) probability of
/// clicks in both outputs.
#[derive(Clone, Debug)]
pub struct BranchSet {
    pub branches: Vec<Branch>,
    pub inconsistent_probability: f64,
}

impl BranchSet {
    pub fn failure_probability(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.record.outcome.is_failure())
            .map(|b| b.probability)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum::<f64>() + self.inconsistent_probability
    }

    pub fn successes(&self) -> impl Iterator<Item = &Branch> {
        self.branches.iter().filter(|b| !b.record.outcome.is_failure())
    }
}

type Classifier = fn(usize, usize) -> Result<Outcome>;

fn enumerate(mixed: &FockVector, a: usize, b: usize, classify: Classifier) -> Result<BranchSet> {
    let dist = mixed.outcome_distribution(&[a, b])?;
    let mut branches = Vec::new();
    let mut inconsistent = 0.0;
    for (key, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let counts = mixed.outcome_of_key(2, key);
        let outcome = match classify(counts[0], counts[1]) {
            Ok(o) => o,
            Err(_) => {
                inconsistent += p;
                continue;
            }
        };
        let (probability, state) = match mixed.project_outcome(&[a, b], &counts) {
            Ok(r) => r,
            Err(Error::ZeroProbability) => continue,
            Err(e) => return Err(e),
        };
        branches.push(Branch {
            record: MeasurementRecord { outcome, photon_counts: counts, pauli_frame_update: frame_of(outcome) },
            probability,
            state: (mixed.modes() > 2).then_some(state),
        });
    }
    Ok(BranchSet { branches, inconsistent_probability: inconsistent })
}

fn sample<R: Rng + ?Sized>(
    mixed: &FockVector,
    a: usize,
    b: usize,
    classify: Classifier,
    rng: &mut R,
) -> Result<(MeasurementRecord, Option<FockVector>)> {
    let (counts, state) = mixed.count_photons(&[a, b], rng)?;
    let outcome = classify(counts[0], counts[1])?;
    let record = MeasurementRecord { outcome, photon_counts: counts, pauli_frame_update: frame_of(outcome) };
    Ok((record, (mixed.modes() > 2).then_some(state)))
}

fn with_reference(state: &FockVector, mode: usize, alpha: f64) -> Result<(FockVector, usize)> {
    state.check_mode(mode)?;
    let reference = FockVector::coherent(C64::new(alpha, 0.0), state.cutoff())?;
    let joint = state.tensor(&reference)?;
    let anc = joint.modes() - 1;
    Ok((joint.apply_beam_splitter(BeamSplitterSpec::balanced(mode, anc))?, anc))
}

fn bell_mix(state: &FockVector, a: usize, b: usize) -> Result<FockVector> {
    state.apply_beam_splitter(BeamSplitterSpec::balanced(a, b))
}

/// Z-basis measurement of qubit `mode` (amplitude `alpha`), sampled.
pub fn z_measure<R: Rng + ?Sized>(
    state: &FockVector,
    mode: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<(MeasurementRecord, Option<FockVector>)> {
    let (mixed, anc) = with_reference(state, mode, alpha)?;
    sample(&mixed, mode, anc, classify_z, rng)
}

/// All branches of the Z-basis measurement.
pub fn z_measure_branches(state: &FockVector, mode: usize, alpha: f64) -> Result<BranchSet> {
    let (mixed, anc) = with_reference(state, mode, alpha)?;
    enumerate(&mixed, mode, anc, classify_z)
}

/// Bell measurement of modes `a` and `b`, sampled.
pub fn bell_measure<R: Rng + ?Sized>(
    state: &FockVector,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<(MeasurementRecord, Option<FockVector>)> {
    sample(&bell_mix(state, a, b)?, a, b, classify_bell, rng)
}

/// All branches of the Bell measurement.
pub fn bell_measure_branches(state: &FockVector, a: usize, b: usize) -> Result<BranchSet> {
    enumerate(&bell_mix(state, a, b)?, a, b, classify_bell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::default_cutoff;
    use crate::gates::qubit::CsqcQubit;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q_law(alpha: f64) -> f64 {
        2.0 / (1.0 + (2.0 * alpha * alpha).exp())
    }

    #[test]
    fn z_measure_of_coherent_zero_is_never_one() {
        let a = 0.8;
        let s = CsqcQubit::zero(a).encode(default_cutoff(2f64.sqrt() * a)).unwrap();
        let set = z_measure_branches(&s, 0, a).unwrap();
        // only rounding-level weight may land on the wrong or impossible outcomes
        let wrong: f64 = set.branches.iter().filter(|b| b.record.outcome == Outcome::ZOne).map(|b| b.probability).sum();
        assert!(wrong < 1e-25, "{wrong}");
        assert!(set.inconsistent_probability < 1e-25);
        assert_abs_diff_eq!(set.total_probability(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn z_measure_failure_law_for_plus() {
        for &a in &[0.5, 1.0, 1.5] {
            let s = CsqcQubit::plus(a).encode(default_cutoff(2f64.sqrt() * a)).unwrap();
            let set = z_measure_branches(&s, 0, a).unwrap();
            assert_abs_diff_eq!(set.failure_probability(), q_law(a), epsilon = 1e-10);
        }
    }

    #[test]
    fn z_measure_at_zero_amplitude_always_fails() {
        let s = FockVector::vacuum(1, 4).unwrap();
        let set = z_measure_branches(&s, 0, 0.0).unwrap();
        assert_abs_diff_eq!(set.failure_probability(), 1.0, epsilon = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (rec, rest) = z_measure(&s, 0, 0.0, &mut rng).unwrap();
        assert_eq!(rec.outcome, Outcome::Failure);
        assert!(rest.is_none());
    }

    #[test]
    fn sampled_z_measure_matches_coefficients() {
        let a = 1.5;
        let s = CsqcQubit::one(a).encode(default_cutoff(2f64.sqrt() * a)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (rec, _) = z_measure(&s, 0, a, &mut rng).unwrap();
            assert!(matches!(rec.outcome, Outcome::ZOne | Outcome::Failure));
            assert_eq!(rec.outcome == Outcome::Failure, rec.photon_counts.iter().sum::<usize>() == 0);
        }
    }

    #[test]
    fn bell_classification() {
        assert_eq!(classify_bell(0, 0).unwrap(), Outcome::Failure);
        assert_eq!(classify_bell(2, 0).unwrap(), Outcome::Bell1);
        assert_eq!(classify_bell(3, 0).unwrap(), Outcome::Bell2);
        assert_eq!(classify_bell(0, 4).unwrap(), Outcome::Bell3);
        assert_eq!(classify_bell(0, 1).unwrap(), Outcome::Bell4);
        assert!(matches!(classify_bell(1, 1), Err(Error::Consistency(_))));
    }

    #[test]
    fn correlated_pair_lights_only_the_first_output() {
        let a = 0.9;
        let c = default_cutoff(2f64.sqrt() * a);
        let pair = crate::gates::coeff::coherent_superposition(
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            &[a, a],
            c,
        )
        .unwrap();
        let set = bell_measure_branches(&pair, 0, 1).unwrap();
        let second: f64 = set.successes().filter(|b| b.record.photon_counts[1] > 0).map(|b| b.probability).sum();
        assert!(second < 1e-25, "{second}");
    }
}
