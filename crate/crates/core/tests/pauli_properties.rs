use csqc_core::gates::coeff::{apply_cz, apply_x, apply_z, fidelity, kron};
use csqc_core::gates::{apply_frame, gate_branches, CsqcQubit, GateKind, ResourceFactory};
use csqc_core::noise::OpNoiseTable;
use csqc_core::pauli::{run_exrec, CircuitBuilder, CliffordCircuit, Fault, PauliFrame, ScriptedNoise};
use csqc_core::C64;
use proptest::prelude::*;

const QUBITS: usize = 6;

#[derive(Clone, Debug)]
enum Step {
    Prep(usize),
    H(usize),
    Cz(usize, usize),
    Meas(usize),
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (0..QUBITS).prop_map(Step::Prep),
        (0..QUBITS).prop_map(Step::H),
        (0..QUBITS, 1..QUBITS).prop_map(|(a, d)| Step::Cz(a, (a + d) % QUBITS)),
        (0..QUBITS).prop_map(Step::Meas),
    ]
}

/// One op per tick; ops on unprepared qubits are skipped.
fn build(steps: &[Step]) -> CliffordCircuit {
    let mut b = CircuitBuilder::new(QUBITS).unwrap().with_live((1 << QUBITS) - 1);
    for s in steps {
        let _ = match *s {
            Step::Prep(q) => b.plus_prep(q).map(|_| ()),
            Step::H(q) => b.hadamard(q).map(|_| ()),
            Step::Cz(a, c) => b.cz(a, c).map(|_| ()),
            Step::Meas(q) => b.x_meas(q).map(|_| ()),
        };
        b.tick();
    }
    b.build()
}

fn frame(x: u64, z: u64) -> PauliFrame {
    let mut f = PauliFrame::new(QUBITS).unwrap();
    for q in 0..QUBITS {
        if x >> q & 1 == 1 {
            f.apply_x(q);
        }
        if z >> q & 1 == 1 {
            f.apply_z(q);
        }
    }
    f
}

proptest! {
    #[test]
    fn propagation_is_linear_in_the_error_bits(
        steps in prop::collection::vec(step(), 1..30),
        (x1, z1, x2, z2) in (0u64..64, 0u64..64, 0u64..64, 0u64..64),
        faults in prop::collection::vec((0usize..80, 1u8..4), 0..4),
    ) {
        let c = build(&steps);
        let table = OpNoiseTable::noiseless();
        let script: Vec<(usize, Fault)> =
            faults.iter().map(|&(s, k)| (s, Fault { located: false, x: k & 1 == 1, z: k & 2 == 2 })).collect();

        let mut both = frame(x1 ^ x2, z1 ^ z2);
        let m = c.propagate(&mut both, &table, &mut ScriptedNoise::new(script.clone()), false);
        let mut f1 = frame(x1, z1);
        let m1 = c.propagate(&mut f1, &table, &mut ScriptedNoise::new(script), false);
        let mut f2 = frame(x2, z2);
        let m2 = c.propagate(&mut f2, &table, &mut ScriptedNoise::noiseless(), false);

        prop_assert_eq!(m.flips, m1.flips ^ m2.flips);
        for q in 0..QUBITS {
            prop_assert_eq!(both.x_bit(q), f1.x_bit(q) ^ f2.x_bit(q));
            prop_assert_eq!(both.z_bit(q), f1.z_bit(q) ^ f2.z_bit(q));
        }
    }
}

#[test]
fn x_through_cz_matches_the_fock_level_gate() {
    let mut f = PauliFrame::new(2).unwrap();
    f.apply_x(0);
    f.cz(0, 1);
    let (xa, za, xb, zb) = (f.x_bit(0), f.z_bit(0), f.x_bit(1), f.z_bit(1));
    assert_eq!((xa, za, xb, zb), (true, false, false, true));

    let alpha = 0.8;
    let a = CsqcQubit::new(C64::new(0.6, 0.1), C64::new(0.3, -0.7), alpha);
    let b = CsqcQubit::new(C64::new(0.2, 0.5), C64::new(-0.8, 0.1), alpha);
    let resource = ResourceFactory::cz(alpha).unwrap().resource(0);
    let ideal = apply_cz(&kron(&a.coefficients(), &b.coefficients()), 0, 1, 2);
    let mut propagated = ideal.clone();
    if xa {
        propagated = apply_x(&propagated, 0, 2);
    }
    if zb {
        propagated = apply_z(&propagated, 1, 2);
    }
    let mut checked = 0;
    for br in gate_branches(GateKind::Cz, &[a.pauli_x(), b], &resource).unwrap() {
        if let Some(out) = br.output {
            let predicted = apply_frame(&propagated, &br.frame);
            assert!(fidelity(&out, &predicted) > 1.0 - 1e-9, "branch {:?}", br.records);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn rates_are_monotone_in_p_and_q() {
    let trials = 20_000;
    let grid_p = [1e-4, 2e-4, 4e-4];
    let grid_q = [0.0075, 0.015, 0.03];
    let mut total = [[0.0; 3]; 3];
    for (i, &p) in grid_p.iter().enumerate() {
        for (j, &q) in grid_q.iter().enumerate() {
            total[i][j] = run_exrec(p, q, true, trials, 21).unwrap().rates.total();
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            if i + 1 < 3 {
                assert!(total[i + 1][j] >= total[i][j], "p step at {i},{j}: {total:?}");
            }
            if j + 1 < 3 {
                assert!(total[i][j + 1] >= total[i][j], "q step at {i},{j}: {total:?}");
            }
        }
    }
}

#[test]
fn unlocated_rate_is_at_least_quadratic() {
    let lo = run_exrec(6e-5, 0.0, true, 300_000, 3).unwrap().rates.unlocated;
    let hi = run_exrec(6e-4, 0.0, true, 30_000, 3).unwrap().rates.unlocated;
    assert!(lo > 0.0);
    let slope = (hi / lo).log10();
    assert!(slope >= 1.7, "slope {slope} from {lo} to {hi}");
}
