//! Pauli error frame over up to 64 qubits, stored as bitmasks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// Current X/Z error bits and erasure flags of each qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x: u64,
    pub z: u64,
    pub located: u64,
    qubits: usize,
}

impl PauliFrame {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::ShapeMismatch(format!("frame holds at most {MAX_QUBITS} qubits, got {qubits}")));
        }
        Ok(PauliFrame { x: 0, z: 0, located: 0, qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x >> q & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z >> q & 1 == 1
    }

    pub fn is_located(&self, q: usize) -> bool {
        self.located >> q & 1 == 1
    }

    pub fn apply_x(&mut self, q: usize) {
        self.x ^= 1 << q;
    }

    pub fn apply_z(&mut self, q: usize) {
        self.z ^= 1 << q;
    }

    pub fn flag(&mut self, q: usize) {
        self.located |= 1 << q;
    }

    /// Fresh qubit: no error, no flag.
    pub fn reset(&mut self, q: usize) {
        let m = !(1u64 << q);
        self.x &= m;
        self.z &= m;
        self.located &= m;
    }

    pub fn hadamard(&mut self, q: usize) {
        let bx = self.x >> q & 1;
        let bz = self.z >> q & 1;
        if bx != bz {
            self.x ^= 1 << q;
            self.z ^= 1 << q;
        }
    }

    /// `X_a -> X_a Z_b`, `X_b -> Z_a X_b`. An erasure on either qubit may have
    /// leaked across, so flags are shared.
    pub fn cz(&mut self, a: usize, b: usize) {
        let xa = self.x >> a & 1;
        let xb = self.x >> b & 1;
        self.z ^= xb << a | xa << b;
        if (self.located >> a | self.located >> b) & 1 == 1 {
            self.located |= 1 << a | 1 << b;
        }
    }

    /// Componentwise product of two frames; flags are merged.
    pub fn combine(&self, other: &PauliFrame) -> PauliFrame {
        PauliFrame {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            located: self.located | other.located,
            qubits: self.qubits.max(other.qubits),
        }
    }

    /// Bits `offset..offset+7` as a block.
    pub fn block(&self, offset: usize) -> BlockFrame {
        BlockFrame {
            x: (self.x >> offset & 0x7f) as u8,
            z: (self.z >> offset & 0x7f) as u8,
            located: (self.located >> offset & 0x7f) as u8,
        }
    }

    pub fn load_block(&mut self, offset: usize, b: BlockFrame) {
        let clear = !(0x7fu64 << offset);
        self.x = self.x & clear | (b.x as u64) << offset;
        self.z = self.z & clear | (b.z as u64) << offset;
        self.located = self.located & clear | (b.located as u64) << offset;
    }
}

/// Frame of one seven-qubit code block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockFrame {
    pub x: u8,
    pub z: u8,
    pub located: u8,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_swaps_x_and_z() {
        let mut f = PauliFrame::new(2).unwrap();
        f.apply_x(0);
        f.hadamard(0);
        assert!(f.z_bit(0) && !f.x_bit(0));
        f.apply_x(0);
        f.hadamard(0);
        assert!(f.z_bit(0) && f.x_bit(0));
    }

    #[test]
    fn cz_spreads_x_as_z() {
        let mut f = PauliFrame::new(3).unwrap();
        f.apply_x(0);
        f.cz(0, 2);
        assert!(f.x_bit(0) && f.z_bit(2) && !f.z_bit(0) && !f.x_bit(2));
        let mut g = PauliFrame::new(3).unwrap();
        g.apply_z(1);
        g.cz(1, 2);
        assert_eq!(g.z, 0b010);
        assert_eq!(g.x, 0);
    }

    #[test]
    fn cz_shares_flags() {
        let mut f = PauliFrame::new(2).unwrap();
        f.flag(1);
        f.cz(0, 1);
        assert_eq!(f.located, 0b11);
    }

    #[test]
    fn blocks_round_trip() {
        let mut f = PauliFrame::new(21).unwrap();
        let b = BlockFrame { x: 0b1010101, z: 0b0000011, located: 0b1000000 };
        f.load_block(7, b);
        assert_eq!(f.block(7), b);
        assert_eq!(f.block(0), BlockFrame::default());
        assert_eq!(f.block(14), BlockFrame::default());
    }

    #[test]
    fn too_many_qubits() {
        assert!(PauliFrame::new(65).is_err());
    }
}
