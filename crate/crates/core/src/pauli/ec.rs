//! Teleportation-based error correction of a Steane block and the CZ
//! extended rectangle built from it.
//!
//! One round: two verified `|+_L>` blocks A and B are joined by a
//! transversal CZ, the data block D is coupled to A by a transversal CZ, and
//! D and A are read out in the X basis. B carries the data on, with logical
//! byproduct `X^{m_A} Z^{m_D}`. Only {|+> prep, H, CZ, memory, X
//! measurement} are used.
//!
//! A verified block is built from four encoded blocks: `|+_L>` blocks A and
//! W are each checked for X errors against a `|0_L>` block, then A, turned
//! to `|0_L>` by transversal Hadamards, is checked for Z errors against W and
//! turned back. Ancilla blocks are discarded whenever a heralded fault occurs
//! during their preparation, and whenever any check reports a nonzero
//! syndrome. Heralds are handled by sampling the preparation conditioned on
//! none occurring; the discard rate follows from the herald rates alone.

use serde::{Deserialize, Serialize};

use super::circuit::{CircuitBuilder, CliffordCircuit, NoiseSource};
use super::code::{CodeSpec, LogicalState, BLOCK};
use super::decoder::Decoder;
use super::frame::{BlockFrame, PauliFrame};
use crate::error::{Error, Result};
use crate::noise::OpNoiseTable;

/// Verifier rejections tolerated per block before giving up.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1000;

const D: usize = 0;
const A: usize = BLOCK;
const B: usize = 2 * BLOCK;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NoError,
    LogicalX,
    LogicalZ,
    LogicalY,
    LocatedFailure,
}

impl Classification {
    fn from_flips(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Classification::NoError,
            (true, false) => Classification::LogicalX,
            (false, true) => Classification::LogicalZ,
            (true, true) => Classification::LogicalY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub classification: Classification,
    /// Erased qubits seen at readout, over all rounds.
    pub erasures: u32,
    /// Nonzero syndromes seen at readout, over all rounds.
    pub nonzero_syndromes: u32,
    /// Ancilla blocks discarded by the verifier.
    pub rejections: u64,
    /// A block preparation exhausted its attempts.
    pub starved: bool,
}

/// Result of one telecorrection round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub block: BlockFrame,
    pub located_failure: bool,
    pub erasures: u32,
    pub nonzero_syndromes: u32,
    pub rejections: u64,
}

/// Fixed circuits of the protocol.
#[derive(Clone, Debug)]
pub struct Protocol {
    code: CodeSpec,
    decoder: Decoder,
    verified_block: CliffordCircuit,
    pair: CliffordCircuit,
    coupling: CliffordCircuit,
    logical_cz: CliffordCircuit,
    max_attempts: u64,
}

impl Protocol {
    pub fn new(decoder: Decoder) -> Result<Self> {
        let code = decoder.code().clone();
        code.verify()?;
        let all = |k: usize| (1u64 << (k * BLOCK)) - 1;

        // A, V, W, U on consecutive blocks
        let (a, v, w, u) = (0, BLOCK, 2 * BLOCK, 3 * BLOCK);
        let mut b = CircuitBuilder::new(4 * BLOCK)?;
        code.encode(
            &mut b,
            &[(a, LogicalState::Plus), (v, LogicalState::Zero), (w, LogicalState::Plus), (u, LogicalState::Zero)],
        )?;
        for i in 0..BLOCK {
            b.cz(a + i, v + i)?;
            b.cz(w + i, u + i)?;
        }
        b.tick();
        for i in 0..BLOCK {
            b.x_meas(v + i)?;
            b.x_meas(u + i)?;
            b.hadamard(a + i)?;
        }
        b.tick();
        for i in 0..BLOCK {
            b.cz(a + i, w + i)?;
        }
        b.tick();
        for i in 0..BLOCK {
            b.x_meas(w + i)?;
            b.hadamard(a + i)?;
        }
        let verified_block = b.build();

        let mut b = CircuitBuilder::new(3 * BLOCK)?.with_live(all(3) & !all(1));
        for i in 0..BLOCK {
            b.cz(A + i, B + i)?;
        }
        let pair = b.build();

        let mut b = CircuitBuilder::new(3 * BLOCK)?.with_live(all(3));
        for i in 0..BLOCK {
            b.cz(D + i, A + i)?;
        }
        b.tick();
        for i in 0..BLOCK {
            b.x_meas(D + i)?;
            b.x_meas(A + i)?;
        }
        let coupling = b.build();

        let mut b = CircuitBuilder::new(2 * BLOCK)?.with_live(all(2));
        for i in 0..BLOCK {
            b.cz(i, BLOCK + i)?;
        }
        let logical_cz = b.build();

        Ok(Protocol { code, decoder, verified_block, pair, coupling, logical_cz, max_attempts: DEFAULT_MAX_ATTEMPTS })
    }

    /// Protocol whose decoder weighs non-erased errors by the largest
    /// unlocated rate in `table`.
    pub fn for_table(table: &OpNoiseTable, tie_ratio: f64) -> Result<Self> {
        Protocol::new(Decoder::new(&CodeSpec::steane(), decoder_ratio(table), tie_ratio)?)
    }

    pub fn with_max_attempts(mut self, n: u64) -> Self {
        self.max_attempts = n.max(1);
        self
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    /// Encoders plus verification, 28 qubits; the block is on the first 7.
    pub fn verified_block(&self) -> &CliffordCircuit {
        &self.verified_block
    }

    /// Transversal CZ joining the two ancilla blocks, 21 qubits.
    pub fn pair(&self) -> &CliffordCircuit {
        &self.pair
    }

    /// Data coupling and readout, 21 qubits.
    pub fn coupling(&self) -> &CliffordCircuit {
        &self.coupling
    }

    pub fn logical_cz(&self) -> &CliffordCircuit {
        &self.logical_cz
    }

    /// A verified `|+_L>` block and the number of verifier rejections.
    pub fn prepare_block(&self, table: &OpNoiseTable, noise: &mut impl NoiseSource) -> Result<(BlockFrame, u64)> {
        for rejections in 0..self.max_attempts {
            let mut f = PauliFrame::new(4 * BLOCK)?;
            let m = self.verified_block.propagate(&mut f, table, noise, true);
            let clean = (1..4).all(|k| self.code.syndrome((m.flips >> (k * BLOCK)) as u8 & 0x7f) == 0);
            if clean {
                return Ok((f.block(0), rejections));
            }
        }
        Err(Error::Starvation { attempts: self.max_attempts })
    }

    pub fn telecorrect(
        &self,
        data: BlockFrame,
        table: &OpNoiseTable,
        noise: &mut impl NoiseSource,
    ) -> Result<RoundOutcome> {
        let (a, ra) = self.prepare_block(table, noise)?;
        let (b, rb) = self.prepare_block(table, noise)?;
        let mut f = PauliFrame::new(3 * BLOCK)?;
        f.load_block(A, a);
        f.load_block(B, b);
        self.pair.propagate(&mut f, table, noise, true);
        f.load_block(D, data);
        let m = self.coupling.propagate(&mut f, table, noise, false);
        let word = |off: usize| ((m.flips >> off) as u8 & 0x7f, (m.erased >> off) as u8 & 0x7f);
        let (fd, ed) = word(D);
        let (fa, ea) = word(A);
        let (z_flip, tie_d) = self.decoder.logical_flip(fd, ed);
        let (x_flip, tie_a) = self.decoder.logical_flip(fa, ea);
        let mut block = f.block(B);
        if x_flip {
            block.x ^= self.code.logical_x;
        }
        if z_flip {
            block.z ^= self.code.logical_z;
        }
        Ok(RoundOutcome {
            block,
            located_failure: tie_d || tie_a,
            erasures: (ed.count_ones() + ea.count_ones()),
            nonzero_syndromes: (self.code.syndrome(fd) != 0) as u32 + (self.code.syndrome(fa) != 0) as u32,
            rejections: ra + rb,
        })
    }

    /// Ideal decoding of a block: its logical error, or a located failure
    /// when the decoder ties.
    pub fn classify_block(&self, b: BlockFrame) -> Classification {
        let (x, tx) = self.decoder.logical_flip(b.x, b.located);
        let (z, tz) = self.decoder.logical_flip(b.z, b.located);
        if tx || tz {
            Classification::LocatedFailure
        } else {
            Classification::from_flips(x, z)
        }
    }

    /// One round on `data`, classified against an ideal decoder.
    pub fn round_trial(&self, data: BlockFrame, table: &OpNoiseTable, noise: &mut impl NoiseSource) -> Result<TrialOutcome> {
        let r = self.telecorrect(data, table, noise)?;
        let classification =
            if r.located_failure { Classification::LocatedFailure } else { self.classify_block(r.block) };
        Ok(TrialOutcome {
            classification,
            erasures: r.erasures,
            nonzero_syndromes: r.nonzero_syndromes,
            rejections: r.rejections,
            starved: false,
        })
    }

    fn correct_both(
        &self,
        blocks: &mut [BlockFrame; 2],
        table: &OpNoiseTable,
        noise: &mut impl NoiseSource,
        out: &mut TrialOutcome,
    ) -> Result<bool> {
        let mut located = false;
        for b in blocks.iter_mut() {
            let r = self.telecorrect(*b, table, noise)?;
            *b = r.block;
            located |= r.located_failure;
            out.erasures += r.erasures;
            out.nonzero_syndromes += r.nonzero_syndromes;
            out.rejections += r.rejections;
        }
        Ok(located)
    }

    fn exrec_blocks(
        &self,
        table: &OpNoiseTable,
        noise: &mut impl NoiseSource,
        out: &mut TrialOutcome,
    ) -> Result<([BlockFrame; 2], bool)> {
        let mut blocks = [BlockFrame::default(); 2];
        let leading = self.correct_both(&mut blocks, table, noise, out)?;
        let mut f = PauliFrame::new(2 * BLOCK)?;
        f.load_block(0, blocks[0]);
        f.load_block(BLOCK, blocks[1]);
        self.logical_cz.propagate(&mut f, table, noise, false);
        blocks = [f.block(0), f.block(BLOCK)];
        let trailing = self.correct_both(&mut blocks, table, noise, out)?;
        Ok((blocks, leading || trailing))
    }

    /// Leading rounds on two clean blocks, transversal CZ, trailing rounds,
    /// then ideal decoding of both blocks.
    pub fn exrec_trial(&self, table: &OpNoiseTable, noise: &mut impl NoiseSource) -> TrialOutcome {
        let mut out = TrialOutcome {
            classification: Classification::NoError,
            erasures: 0,
            nonzero_syndromes: 0,
            rejections: 0,
            starved: false,
        };
        let blocks = match self.exrec_blocks(table, noise, &mut out) {
            Ok((_, true)) => {
                out.classification = Classification::LocatedFailure;
                return out;
            }
            Ok((b, false)) => b,
            Err(_) => {
                out.starved = true;
                out.classification = Classification::LocatedFailure;
                return out;
            }
        };
        let (mut x, mut z) = (false, false);
        for b in blocks {
            match self.classify_block(b) {
                Classification::LocatedFailure => {
                    out.classification = Classification::LocatedFailure;
                    return out;
                }
                c => {
                    x |= matches!(c, Classification::LogicalX | Classification::LogicalY);
                    z |= matches!(c, Classification::LogicalZ | Classification::LogicalY);
                }
            }
        }
        out.classification = Classification::from_flips(x, z);
        out
    }
}

/// Error ratio the decoder assigns to a non-erased position.
pub fn decoder_ratio(table: &OpNoiseTable) -> f64 {
    table
        .rows()
        .iter()
        .map(|(_, r)| r.x.max(r.z))
        .fold(0.0, f64::max)
        .clamp(1e-9, 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::circuit::{Fault, RandomNoise, ScriptedNoise};
    use crate::pauli::decoder::EXACT_TIE;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn protocol() -> Protocol {
        Protocol::for_table(&OpNoiseTable::from_rates(2e-4, 0.015, true).unwrap(), EXACT_TIE).unwrap()
    }

    fn noiseless() -> OpNoiseTable {
        OpNoiseTable::noiseless()
    }

    #[test]
    fn zero_noise_round_is_clean() {
        let p = protocol();
        let r = p.telecorrect(BlockFrame::default(), &noiseless(), &mut ScriptedNoise::noiseless()).unwrap();
        assert_eq!(r.block, BlockFrame::default());
        assert!(!r.located_failure);
        assert_eq!(r.rejections, 0);
    }

    #[test]
    fn single_data_errors_are_corrected() {
        let p = protocol();
        for i in 0..BLOCK {
            for (x, z) in [(1u8 << i, 0u8), (0, 1 << i), (1 << i, 1 << i)] {
                let data = BlockFrame { x, z, located: 0 };
                let t = p.round_trial(data, &noiseless(), &mut ScriptedNoise::noiseless()).unwrap();
                assert_eq!(t.classification, Classification::NoError, "qubit {i} x={x} z={z}");
            }
        }
    }

    #[test]
    fn logical_errors_are_teleported() {
        let p = protocol();
        let data = BlockFrame { x: 0x7f, z: 0, located: 0 };
        let t = p.round_trial(data, &noiseless(), &mut ScriptedNoise::noiseless()).unwrap();
        assert_eq!(t.classification, Classification::LogicalX);
        let data = BlockFrame { x: 0, z: 0b0000111, located: 0 };
        let t = p.round_trial(data, &noiseless(), &mut ScriptedNoise::noiseless()).unwrap();
        assert_eq!(t.classification, Classification::LogicalZ);
    }

    #[test]
    fn verifier_rejects_x_errors_on_the_ancilla() {
        let p = protocol();
        // site 29 is A's qubit 2 after its first CZ; the remaining CZ turns
        // it into a weight-2 X error
        let mut s = ScriptedNoise::new(vec![(29, Fault::X)]);
        let (b, rejections) = p.prepare_block(&noiseless(), &mut s).unwrap();
        assert_eq!(rejections, 1);
        assert_eq!(b, BlockFrame::default());
    }

    #[test]
    fn verifier_rejects_z_errors_on_the_ancilla() {
        let p = protocol();
        // site 56 is A's qubit 0 after its second CZ; with the last CZ and
        // the final Hadamard it becomes a weight-2 Z error
        let mut s = ScriptedNoise::new(vec![(56, Fault::X)]);
        let (b, rejections) = p.prepare_block(&noiseless(), &mut s).unwrap();
        assert_eq!(rejections, 1);
        assert_eq!(b, BlockFrame::default());
    }

    #[test]
    fn sites_per_round() {
        let p = protocol();
        let mut s = ScriptedNoise::noiseless();
        p.telecorrect(BlockFrame::default(), &noiseless(), &mut s).unwrap();
        let per_block = p.verified_block().ops().len() + p.verified_block().counts().cz as usize;
        let expected = 2 * per_block
            + 2 * p.pair().counts().cz as usize
            + p.coupling().ops().len()
            + p.coupling().counts().cz as usize;
        assert_eq!(s.sites(), expected);
    }

    #[test]
    fn exrec_is_clean_without_noise() {
        let p = protocol();
        let t = p.exrec_trial(&noiseless(), &mut ScriptedNoise::noiseless());
        assert_eq!(t.classification, Classification::NoError);
    }

    #[test]
    fn starvation_is_a_located_failure() {
        let table = OpNoiseTable::from_rates(0.3, 0.0, true).unwrap();
        let p = protocol().with_max_attempts(1);
        let mut rng = RandomNoise { rng: ChaCha8Rng::seed_from_u64(5) };
        let starved = (0..50).map(|_| p.exrec_trial(&table, &mut rng)).filter(|t| t.starved).count();
        assert!(starved > 0);
    }
}
