//! The seven-qubit Steane code and its graph-state encoders.

use serde::{Deserialize, Serialize};

use super::circuit::{CircuitBuilder, CliffordCircuit, Op};
use crate::error::{Error, Result};

pub const BLOCK: usize = 7;
pub const BLOCK_MASK: u8 = 0x7f;

/// Which encoded state an encoder prepares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalState {
    Plus,
    Zero,
}

/// CSS code with identical X and Z check rows. Position `i` has check
/// column `i + 1` in binary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub checks: [u8; 3],
    pub logical_x: u8,
    pub logical_z: u8,
    /// Positions whose column has a single bit set.
    pub parity: [usize; 3],
    pub info: [usize; 4],
    /// Encoder CZs `(parity, info)`, grouped into three disjoint layers.
    pub layers: [[(usize, usize); 3]; 3],
}

impl CodeSpec {
    pub fn steane() -> Self {
        let mut checks = [0u8; 3];
        for (k, row) in checks.iter_mut().enumerate() {
            for i in 0..BLOCK {
                if (i + 1) >> k & 1 == 1 {
                    *row |= 1 << i;
                }
            }
        }
        CodeSpec {
            n: BLOCK,
            k: 1,
            d: 3,
            checks,
            logical_x: BLOCK_MASK,
            logical_z: BLOCK_MASK,
            parity: [0, 1, 3],
            info: [2, 4, 5, 6],
            layers: [[(0, 2), (1, 5), (3, 6)], [(0, 4), (1, 6), (3, 5)], [(0, 6), (1, 2), (3, 4)]],
        }
    }

    pub fn syndrome(&self, bits: u8) -> u8 {
        let mut s = 0;
        for (k, row) in self.checks.iter().enumerate() {
            s |= ((row & bits).count_ones() as u8 & 1) << k;
        }
        s
    }

    /// Appends encoders for the given blocks, run in parallel: `|+>` on all
    /// seven qubits, the nine CZs in three layers, then Hadamards on the
    /// parity positions (`|+_L>`) or the info positions (`|0_L>`).
    pub fn encode(&self, b: &mut CircuitBuilder, blocks: &[(usize, LogicalState)]) -> Result<()> {
        for &(off, _) in blocks {
            for i in 0..BLOCK {
                b.plus_prep(off + i)?;
            }
        }
        b.tick();
        for layer in &self.layers {
            for &(off, _) in blocks {
                for &(p, i) in layer {
                    b.cz(off + p, off + i)?;
                }
            }
            b.tick();
        }
        for &(off, state) in blocks {
            let targets: &[usize] = match state {
                LogicalState::Plus => &self.parity,
                LogicalState::Zero => &self.info,
            };
            for &t in targets {
                b.hadamard(off + t)?;
            }
        }
        b.tick();
        Ok(())
    }

    pub fn encoder(&self, state: LogicalState) -> Result<CliffordCircuit> {
        let mut b = CircuitBuilder::new(BLOCK)?;
        self.encode(&mut b, &[(0, state)])?;
        Ok(b.build())
    }

    /// Checks the code and both encoders symbolically: checks commute, the
    /// logicals anticommute, and each encoder's stabilizer group is exactly
    /// the code group plus the right logical, all with sign +1.
    pub fn verify(&self) -> Result<()> {
        let all: Vec<(u8, u8)> =
            self.checks.iter().flat_map(|&r| [(r, 0), (0, r)]).collect();
        for &(x1, z1) in &all {
            for &(x2, z2) in &all {
                if !commute((x1, z1), (x2, z2)) {
                    return Err(Error::Consistency("checks do not commute".into()));
                }
            }
            if !commute((x1, z1), (self.logical_x, 0)) || !commute((x1, z1), (0, self.logical_z)) {
                return Err(Error::Consistency("logical does not commute with a check".into()));
            }
        }
        if commute((self.logical_x, 0), (0, self.logical_z)) {
            return Err(Error::Consistency("logical X and Z commute".into()));
        }
        for state in [LogicalState::Plus, LogicalState::Zero] {
            let group = stabilizer_group(&self.encoder(state)?);
            let logical = match state {
                LogicalState::Plus => (self.logical_x, 0),
                LogicalState::Zero => (0, self.logical_z),
            };
            for (x, z) in all.iter().copied().chain([logical]) {
                if !group.contains(&(x, z, false)) {
                    return Err(Error::Consistency(format!(
                        "{state:?} encoder misses stabilizer x={x:07b} z={z:07b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn commute(a: (u8, u8), b: (u8, u8)) -> bool {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 0
}

/// All 128 elements of the stabilizer group of an encoder's output, as
/// `(x, z, sign)` for `(-1)^sign X^x Z^z`.
fn stabilizer_group(c: &CliffordCircuit) -> Vec<(u8, u8, bool)> {
    let mut gens: Vec<(u8, u8, bool)> = Vec::new();
    for op in c.ops() {
        match *op {
            Op::PlusPrep(q) => gens.push((1 << q, 0, false)),
            Op::Hadamard(q) => {
                for g in gens.iter_mut() {
                    let (bx, bz) = (g.0 >> q & 1, g.1 >> q & 1);
                    g.2 ^= bx & bz == 1;
                    g.0 = g.0 & !(1 << q) | bz << q;
                    g.1 = g.1 & !(1 << q) | bx << q;
                }
            }
            Op::Cz(a, b) => {
                for g in gens.iter_mut() {
                    let (xa, xb) = (g.0 >> a & 1, g.0 >> b & 1);
                    g.2 ^= xa & xb == 1;
                    g.1 ^= xb << a | xa << b;
                }
            }
            Op::Memory(_) | Op::XMeas(_) => {}
        }
    }
    let mut group = vec![(0u8, 0u8, false)];
    for g in gens {
        let extended: Vec<_> = group
            .iter()
            .map(|&(x, z, s)| (x ^ g.0, z ^ g.1, s ^ g.2 ^ ((z & g.0).count_ones() % 2 == 1)))
            .collect();
        group.extend(extended);
    }
    group
}
