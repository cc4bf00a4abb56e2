use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::gates::ResourceFactory;
use crate::noise::OpNoiseTable;
use crate::pauli::{LogicalState, OpCounts, PauliFrame, Protocol, RandomNoise, BLOCK};

/// Acceptance of each entanglement factory and the diagonal states one
/// attempt consumes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoryCosts {
    pub source: String,
    pub zrot_acceptance: f64,
    pub hadamard_acceptance: f64,
    pub cz_acceptance: f64,
    pub diagonal_per_zrot_attempt: f64,
    pub diagonal_per_hadamard_attempt: f64,
    pub diagonal_per_cz_attempt: f64,
}

impl FactoryCosts {
    /// One attempt in three for a rotation resource, one in 27 for the
    /// Hadamard resource and the controlled-Z resource built from it.
    pub fn nominal() -> Self {
        FactoryCosts {
            source: "nominal".into(),
            zrot_acceptance: 1.0 / 3.0,
            hadamard_acceptance: 1.0 / 27.0,
            cz_acceptance: 1.0 / 27.0,
            diagonal_per_zrot_attempt: 1.0,
            diagonal_per_hadamard_attempt: 2.0,
            diagonal_per_cz_attempt: 2.0,
        }
    }

    /// Acceptances of the simulated factories at qubit amplitude `alpha`.
    pub fn measured(alpha: f64) -> Result<Self> {
        let z = ResourceFactory::zrot(FRAC_PI_4, alpha, alpha)?;
        let h = ResourceFactory::hadamard(alpha)?;
        let cz = ResourceFactory::cz(alpha)?;
        Ok(FactoryCosts {
            source: format!("measured at alpha = {alpha}"),
            zrot_acceptance: z.acceptance(),
            hadamard_acceptance: h.acceptance(),
            cz_acceptance: cz.acceptance(),
            diagonal_per_zrot_attempt: z.diagonal_states_per_attempt() as f64,
            diagonal_per_hadamard_attempt: h.diagonal_states_per_attempt() as f64,
            diagonal_per_cz_attempt: cz.diagonal_states_per_attempt() as f64,
        })
    }

    /// Expected diagonal states behind the operations in `c`: one per
    /// preparation and a factory's expected consumption per gate.
    pub fn diagonal_states(&self, c: &OpCounts) -> f64 {
        c.plus_prep
            + c.hadamard * self.diagonal_per_hadamard_attempt / self.hadamard_acceptance
            + c.cz * self.diagonal_per_cz_attempt / self.cz_acceptance
    }
}

/// Counts per category for one error-correction round at one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceTally {
    pub level: u32,
    pub memory: f64,
    pub hadamard: f64,
    pub cz: f64,
    pub diagonal_state: f64,
    pub x_meas: f64,
    pub total: f64,
    /// Diagonal states consumed, factories included.
    pub diagonal_states_consumed: f64,
}

impl ResourceTally {
    fn new(level: u32, c: &OpCounts, costs: &FactoryCosts) -> Self {
        ResourceTally {
            level,
            memory: c.memory,
            hadamard: c.hadamard,
            cz: c.cz,
            diagonal_state: c.plus_prep,
            x_meas: c.x_meas,
            total: c.total(),
            diagonal_states_consumed: costs.diagonal_states(c),
        }
    }

    /// Fractions of the total in the order memory, Hadamard, controlled-Z,
    /// diagonal states, X measurements.
    pub fn fractions(&self) -> [f64; 5] {
        [self.memory, self.hadamard, self.cz, self.diagonal_state, self.x_meas].map(|v| v / self.total)
    }
}

/// Expected repetitions behind one round. Each encoder is redone until it
/// sees no herald; a herald or a rejection in the checks discards all four
/// encoded blocks; a herald while joining a pair discards both blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempts {
    pub plus_encoder_herald_free: f64,
    pub zero_encoder_herald_free: f64,
    /// Probability the checks on four encoded blocks see no herald.
    pub checks_herald_free: f64,
    /// Probability the checks accept a herald-free preparation.
    pub verifier_acceptance: f64,
    /// Probability the joining CZ layer sees no herald.
    pub pair_herald_free: f64,
    /// Expected operations behind one verified block.
    pub verified_block_ops: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub attempts: Attempts,
    /// Operations of one level-1 round, repetitions included.
    pub round: OpCounts,
    pub levels: Vec<ResourceTally>,
    /// Total at level L+1 over total at level L.
    pub growth_ratios: Vec<f64>,
    pub factory: FactoryCosts,
}

/// Verifier acceptance of herald-free block preparations, by sampling.
pub fn verifier_acceptance(protocol: &Protocol, table: &OpNoiseTable, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let mut noise = RandomNoise { rng: ChaCha8Rng::seed_from_u64(seed) };
    let circuit = protocol.verified_block();
    let mut accepted = 0u64;
    for _ in 0..samples {
        let mut f = PauliFrame::new(circuit.qubits())?;
        let m = circuit.propagate(&mut f, table, &mut noise, true);
        let clean = (1..4).all(|k| protocol.code().syndrome((m.flips >> (k * BLOCK)) as u8 & 0x7f) == 0);
        accepted += clean as u64;
    }
    Ok(accepted as f64 / samples as f64)
}

/// Blocks an operation leaves behind that need a following round.
fn rounds_after(op: usize) -> f64 {
    // order: memory, hadamard, cz, plus_prep, x_meas
    [1.0, 1.0, 2.0, 1.0, 0.0][op]
}

fn unit(op: usize) -> OpCounts {
    let mut c = OpCounts::default();
    *component(&mut c, op) = 1.0;
    c
}

fn component(c: &mut OpCounts, op: usize) -> &mut f64 {
    match op {
        0 => &mut c.memory,
        1 => &mut c.hadamard,
        2 => &mut c.cz,
        3 => &mut c.plus_prep,
        _ => &mut c.x_meas,
    }
}

/// Resources of one error-correction round at levels `1..=levels`. A
/// level-L round runs the level-1 round's operations as level-(L-1)
/// logical operations; a logical operation is its transversal version
/// followed by one round per block it leaves live.
pub fn count_resources(
    levels: u32,
    protocol: &Protocol,
    table: &OpNoiseTable,
    costs: &FactoryCosts,
    verifier_acceptance: f64,
) -> Result<ResourceReport> {
    if levels == 0 {
        return Err(Error::Domain("level must be at least 1".into()));
    }
    if !(verifier_acceptance > 0.0 && verifier_acceptance <= 1.0) {
        return Err(Error::Domain(format!("verifier acceptance must be in (0,1], got {verifier_acceptance}")));
    }
    let code = protocol.code();
    let plus = code.encoder(LogicalState::Plus)?;
    let zero = code.encoder(LogicalState::Zero)?;
    let block = protocol.verified_block();
    let plus_hf = plus.herald_free_probability(table);
    let zero_hf = zero.herald_free_probability(table);
    let pair_hf = protocol.pair().herald_free_probability(table);
    let encoders_hf = (plus_hf * zero_hf).powi(2);
    if encoders_hf <= 0.0 || pair_hf <= 0.0 || block.herald_free_probability(table) <= 0.0 {
        return Err(Error::Domain("heralds are certain; no block can be prepared".into()));
    }
    let checks_hf = block.herald_free_probability(table) / encoders_hf;
    let encoders = plus.counts().scaled(2.0).add(&zero.counts().scaled(2.0));
    let checks = block.counts().add(&encoders.scaled(-1.0));
    let verified = plus
        .counts()
        .scaled(2.0 / plus_hf)
        .add(&zero.counts().scaled(2.0 / zero_hf))
        .add(&checks)
        .scaled(1.0 / (checks_hf * verifier_acceptance));
    let round = verified
        .scaled(2.0)
        .add(&protocol.pair().counts())
        .scaled(1.0 / pair_hf)
        .add(&protocol.coupling().counts());
    let n = [round.memory, round.hadamard, round.cz, round.plus_prep, round.x_meas];

    let mut op_cost: Vec<OpCounts> = (0..5).map(unit).collect();
    let mut tallies = Vec::new();
    for level in 1..=levels {
        let ec = (0..5).fold(OpCounts::default(), |acc, t| acc.add(&op_cost[t].scaled(n[t])));
        tallies.push(ResourceTally::new(level, &ec, costs));
        op_cost = (0..5).map(|t| op_cost[t].scaled(BLOCK as f64).add(&ec.scaled(rounds_after(t)))).collect();
    }
    let growth_ratios = tallies.windows(2).map(|w| w[1].total / w[0].total).collect();
    Ok(ResourceReport {
        attempts: Attempts {
            plus_encoder_herald_free: plus_hf,
            zero_encoder_herald_free: zero_hf,
            checks_herald_free: checks_hf,
            verifier_acceptance,
            pair_herald_free: pair_hf,
            verified_block_ops: verified.total(),
        },
        round,
        levels: tallies,
        growth_ratios,
        factory: costs.clone(),
    })
}
