//! Clifford circuits over {|+> prep, H, CZ, memory, X measurement} and
//! propagation of error frames through them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::frame::{PauliFrame, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::noise::{OpNoiseTable, OpRates};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    PlusPrep(usize),
    Hadamard(usize),
    Cz(usize, usize),
    Memory(usize),
    XMeas(usize),
}

/// Operation counts by category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OpCounts {
    pub memory: f64,
    pub hadamard: f64,
    pub cz: f64,
    pub plus_prep: f64,
    pub x_meas: f64,
}

impl OpCounts {
    pub fn total(&self) -> f64 {
        self.memory + self.hadamard + self.cz + self.plus_prep + self.x_meas
    }

    pub fn scaled(&self, k: f64) -> OpCounts {
        OpCounts {
            memory: self.memory * k,
            hadamard: self.hadamard * k,
            cz: self.cz * k,
            plus_prep: self.plus_prep * k,
            x_meas: self.x_meas * k,
        }
    }

    pub fn add(&self, o: &OpCounts) -> OpCounts {
        OpCounts {
            memory: self.memory + o.memory,
            hadamard: self.hadamard + o.hadamard,
            cz: self.cz + o.cz,
            plus_prep: self.plus_prep + o.plus_prep,
            x_meas: self.x_meas + o.x_meas,
        }
    }
}

/// Fault drawn at one site.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub located: bool,
    pub x: bool,
    pub z: bool,
}

impl Fault {
    pub const X: Fault = Fault { located: false, x: true, z: false };
    pub const Z: Fault = Fault { located: false, x: false, z: true };
    pub const Y: Fault = Fault { located: false, x: true, z: true };

    fn apply(self, frame: &mut PauliFrame, q: usize) {
        if self.located {
            frame.flag(q);
        }
        if self.x {
            frame.apply_x(q);
        }
        if self.z {
            frame.apply_z(q);
        }
    }
}

/// Source of faults, called once per qubit per operation.
pub trait NoiseSource {
    /// Fault at the next site. Heralded events are suppressed when
    /// `postselected`, which samples the outcome conditioned on no herald.
    fn fault(&mut self, rates: &OpRates, postselected: bool) -> Fault;
}

/// Independent faults at the table's rates. Every site consumes the same
/// number of random draws, so runs at different rates share randomness.
pub struct RandomNoise<R> {
    pub rng: R,
}

impl<R: Rng> NoiseSource for RandomNoise<R> {
    fn fault(&mut self, rates: &OpRates, postselected: bool) -> Fault {
        let u: [f64; 3] = self.rng.gen();
        let pauli: u8 = self.rng.gen();
        if !postselected && u[0] < rates.located {
            // depolarize: uniform over I, X, Z, XZ
            return Fault { located: true, x: pauli & 1 == 1, z: pauli & 2 == 2 };
        }
        Fault { located: false, x: u[1] < rates.x, z: u[2] < rates.z }
    }
}

/// Faults injected at chosen site indices; every other site is clean.
/// Heralded faults at postselected sites are dropped, as in sampling.
#[derive(Clone, Debug, Default)]
pub struct ScriptedNoise {
    faults: Vec<(usize, Fault)>,
    site: usize,
}

impl ScriptedNoise {
    pub fn new(faults: Vec<(usize, Fault)>) -> Self {
        ScriptedNoise { faults, site: 0 }
    }

    pub fn noiseless() -> Self {
        ScriptedNoise::default()
    }

    /// Number of sites visited so far.
    pub fn sites(&self) -> usize {
        self.site
    }
}

impl NoiseSource for ScriptedNoise {
    fn fault(&mut self, _rates: &OpRates, postselected: bool) -> Fault {
        let s = self.site;
        self.site += 1;
        match self.faults.iter().find(|(i, _)| *i == s) {
            Some(&(_, f)) if !(postselected && f.located) => f,
            _ => Fault::default(),
        }
    }
}

/// Result of the X measurements in one propagation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Measurements {
    /// Bit `q` set when the outcome on qubit `q` is flipped.
    pub flips: u64,
    /// Bit `q` set when qubit `q` carried an erasure flag.
    pub erased: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    qubits: usize,
    ops: Vec<Op>,
}

impl CliffordCircuit {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn counts(&self) -> OpCounts {
        let mut c = OpCounts::default();
        for op in &self.ops {
            match op {
                Op::PlusPrep(_) => c.plus_prep += 1.0,
                Op::Hadamard(_) => c.hadamard += 1.0,
                Op::Cz(..) => c.cz += 1.0,
                Op::Memory(_) => c.memory += 1.0,
                Op::XMeas(_) => c.x_meas += 1.0,
            }
        }
        c
    }

    /// Probability that no heralded event occurs anywhere in the circuit.
    pub fn herald_free_probability(&self, table: &OpNoiseTable) -> f64 {
        let mut log = 0.0;
        for op in &self.ops {
            let (rates, sites) = rates_of(op, table);
            log += sites as f64 * (1.0 - rates.located).ln();
        }
        log.exp()
    }

    /// Runs the circuit on `frame`. Gate faults land after the gate,
    /// measurement faults before the readout.
    pub fn propagate(
        &self,
        frame: &mut PauliFrame,
        table: &OpNoiseTable,
        noise: &mut impl NoiseSource,
        postselected: bool,
    ) -> Measurements {
        let mut m = Measurements::default();
        for op in &self.ops {
            let (rates, _) = rates_of(op, table);
            match *op {
                Op::PlusPrep(q) => {
                    frame.reset(q);
                    noise.fault(&rates, postselected).apply(frame, q);
                }
                Op::Hadamard(q) => {
                    frame.hadamard(q);
                    noise.fault(&rates, postselected).apply(frame, q);
                }
                Op::Cz(a, b) => {
                    frame.cz(a, b);
                    noise.fault(&rates, postselected).apply(frame, a);
                    noise.fault(&rates, postselected).apply(frame, b);
                }
                Op::Memory(q) => noise.fault(&rates, postselected).apply(frame, q),
                Op::XMeas(q) => {
                    noise.fault(&rates, postselected).apply(frame, q);
                    m.flips |= (frame.z >> q & 1) << q;
                    m.erased |= (frame.located >> q & 1) << q;
                    frame.reset(q);
                }
            }
        }
        m
    }
}

fn rates_of(op: &Op, t: &OpNoiseTable) -> (OpRates, usize) {
    match op {
        Op::PlusPrep(_) => (t.plus_prep, 1),
        Op::Hadamard(_) => (t.hadamard, 1),
        Op::Cz(..) => (t.cz, 2),
        Op::Memory(_) => (t.memory, 1),
        Op::XMeas(_) => (t.x_meas, 1),
    }
}

/// Builds a circuit tick by tick. At each tick every live qubit left idle
/// receives a memory operation.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    qubits: usize,
    ops: Vec<Op>,
    live: u64,
    busy: u64,
    measured: u64,
    readouts: u64,
}

impl CircuitBuilder {
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::ShapeMismatch(format!("circuit holds at most {MAX_QUBITS} qubits, got {qubits}")));
        }
        Ok(CircuitBuilder { qubits, ops: Vec::new(), live: 0, busy: 0, measured: 0, readouts: 0 })
    }

    /// Marks qubits that hold state on entry.
    pub fn with_live(mut self, mask: u64) -> Self {
        self.live |= mask;
        self
    }

    /// Checks that `q` exists, is free this tick and, if `live`, holds state.
    fn check(&self, q: usize, live: bool) -> Result<()> {
        if q >= self.qubits {
            return Err(Error::InvalidMode { mode: q, modes: self.qubits });
        }
        if self.busy >> q & 1 == 1 {
            return Err(Error::ShapeMismatch(format!("qubit {q} used twice in one tick")));
        }
        if live && self.live >> q & 1 == 0 {
            return Err(Error::ShapeMismatch(format!("qubit {q} is not prepared")));
        }
        Ok(())
    }

    pub fn plus_prep(&mut self, q: usize) -> Result<&mut Self> {
        self.check(q, false)?;
        self.busy |= 1 << q;
        self.live |= 1 << q;
        self.ops.push(Op::PlusPrep(q));
        Ok(self)
    }

    pub fn hadamard(&mut self, q: usize) -> Result<&mut Self> {
        self.check(q, true)?;
        self.busy |= 1 << q;
        self.ops.push(Op::Hadamard(q));
        Ok(self)
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        if a == b {
            return Err(Error::ShapeMismatch(format!("cz needs two distinct qubits, got {a} twice")));
        }
        self.check(a, true)?;
        self.check(b, true)?;
        self.busy |= 1 << a | 1 << b;
        self.ops.push(Op::Cz(a, b));
        Ok(self)
    }

    /// Each qubit is read out at most once per circuit.
    pub fn x_meas(&mut self, q: usize) -> Result<&mut Self> {
        self.check(q, true)?;
        if self.readouts >> q & 1 == 1 {
            return Err(Error::ShapeMismatch(format!("qubit {q} is already read out")));
        }
        self.busy |= 1 << q;
        self.measured |= 1 << q;
        self.readouts |= 1 << q;
        self.ops.push(Op::XMeas(q));
        Ok(self)
    }

    pub fn tick(&mut self) -> &mut Self {
        let idle = self.live & !self.busy;
        for q in 0..self.qubits {
            if idle >> q & 1 == 1 {
                self.ops.push(Op::Memory(q));
            }
        }
        self.live &= !self.measured;
        self.measured = 0;
        self.busy = 0;
        self
    }

    /// Closes the current tick and returns the circuit.
    pub fn build(mut self) -> CliffordCircuit {
        if self.busy != 0 {
            self.tick();
        }
        CliffordCircuit { qubits: self.qubits, ops: self.ops }
    }
}
