//! Acceptance suite: one PASS/FAIL line per criterion. A failing criterion is
//! reported, not fatal; the process exits nonzero only when a criterion
//! cannot be evaluated.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use csqc_core::fock::{default_cutoff, DensityOperator, FockVector};
use csqc_core::gates::verify::{failure_law, verify_gate, verify_z_measure};
use csqc_core::gates::{GateKind, ResourceFactory};
use csqc_core::noise::{p_of, q_of, LossConvention, OpNoiseTable, OpRates};
use csqc_core::pauli::{
    run_exrec, BlockFrame, Classification, Fault, NoiseSource, Protocol, ScriptedNoise, BLOCK, EXACT_TIE,
};
use csqc_core::threshold::{
    count_resources, max_steps, probe, sweep, verifier_acceptance, FactoryCosts, MaxSteps, ThresholdConfig,
    ThresholdSearch, Verdict, REFERENCE_LEVELS, REFERENCE_MAX_STEPS,
};
use csqc_core::{Result, C64};

type Outcome = Result<(bool, String)>;

const OPERATING: (f64, f64) = (2e-4, 0.015);
const FRACTIONS: [f64; 5] = [0.284, 0.098, 0.343, 0.164, 0.111];

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x >= target / factor && x <= target * factor
}

fn operating_table() -> Result<OpNoiseTable> {
    OpNoiseTable::from_rates(OPERATING.0, OPERATING.1, true)
}

fn overlap_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        let alpha = 0.25 * k as f64;
        let c = default_cutoff(alpha);
        let plus = FockVector::coherent(C64::new(alpha, 0.0), c)?;
        let minus = FockVector::coherent(C64::new(-alpha, 0.0), c)?;
        let ov = minus.overlap(&plus)?;
        worst = worst.max((ov - C64::new((-2.0 * alpha * alpha).exp(), 0.0)).norm());
    }
    Ok((worst < 1e-10, format!("max deviation {worst:.2e}")))
}

fn failure_law_all() -> Outcome {
    let gates = [
        GateKind::Identity,
        GateKind::ZRot { theta: 0.0 },
        GateKind::ZRot { theta: PI / 4.0 },
        GateKind::ZRot { theta: PI / 2.0 },
        GateKind::ZRot { theta: PI },
        GateKind::Hadamard,
        GateKind::Cz,
    ];
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let z = verify_z_measure(alpha)?;
        let e = (z.measured_failure - failure_law(alpha)).abs();
        worst = worst.max(e);
        if e >= 1e-6 {
            failing.push(format!("z_measure@{alpha}"));
        }
        for g in gates {
            let e = verify_gate(g, alpha)?.failure_law_error();
            worst = worst.max(e);
            if e >= 1e-6 {
                failing.push(format!("{g:?}@{alpha}={e:.1e}"));
            }
        }
    }
    Ok((failing.is_empty(), format!("max deviation {worst:.2e}; failing [{}]", failing.join(", "))))
}

fn gate_exactness() -> Outcome {
    let gates = [
        GateKind::ZRot { theta: 0.0 },
        GateKind::ZRot { theta: PI / 4.0 },
        GateKind::ZRot { theta: PI / 2.0 },
        GateKind::ZRot { theta: PI },
        GateKind::Hadamard,
        GateKind::Cz,
    ];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for alpha in [0.3, 0.8, 1.2] {
        for g in gates {
            let r = verify_gate(g, alpha)?;
            let enumerated = r.resources.iter().all(|p| p.exactness.is_some());
            worst = worst.max(r.worst_infidelity());
            ok &= enumerated && r.exact_passed && r.worst_infidelity() < 1e-6;
        }
    }
    Ok((ok, format!("worst infidelity {worst:.2e}")))
}

fn factory_rates() -> Outcome {
    let alpha = 1.56;
    let z = ResourceFactory::zrot(PI / 4.0, alpha, alpha)?.acceptance();
    let h = ResourceFactory::hadamard(alpha)?.acceptance();
    let ok = (0.22..=0.45).contains(&z) && within_factor(h, 1.0 / 27.0, 1.5);
    Ok((ok, format!("zrot {z:.4}, hadamard {h:.5} (1/{:.1})", 1.0 / h)))
}

fn dephasing_oracle(alpha: f64, eta: f64) -> Result<f64> {
    let cutoff = 40;
    let odd = FockVector::cat_state(alpha, -1, cutoff)?;
    let rho = DensityOperator::from_pure(&odd).loss_channel(0, eta)?;
    let a = (1.0 - eta).sqrt() * alpha;
    rho.expectation(&FockVector::cat_state(a, 1, cutoff)?)
}

fn loss_dephasing() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        for eta in [0.0, 0.01, 0.1, 0.5] {
            worst = worst.max((dephasing_oracle(alpha, eta)? - p_of(alpha, eta)?).abs());
        }
    }
    Ok((worst < 1e-8, format!("max deviation {worst:.2e}")))
}

fn q_at_operating_point() -> Outcome {
    let a = LossConvention::PaperLiteral.effective_amplitude(1.56, 4e-4);
    let q = q_of(a)?;
    Ok(((q * 1000.0).round() == 15.0, format!("q = {q:.6}")))
}

fn level_one_rates() -> Outcome {
    let r = run_exrec(OPERATING.0, OPERATING.1, true, 1_000_000, 7)?;
    let (u, l) = (r.rates.unlocated, r.rates.located);
    let ok = within_factor(u, 4e-4, 3.0) && within_factor(l, 8e-3, 3.0);
    Ok((ok, format!("unlocated {u:.3e} (target 4e-4), located {l:.3e} (target 8e-3), 1e6 trials")))
}

fn threshold_properties() -> Outcome {
    let cfg = ThresholdConfig { trials: 10_000, escalations: 2, ..ThresholdConfig::default() };
    let op = probe(1.56, 4e-4, &cfg)?;
    let a_ok = op.verdict == Verdict::Below;
    let mut low_alpha = Vec::new();
    for eta in [0.0, 1e-4, 4e-4] {
        low_alpha.push(probe(1.0, eta, &cfg)?.verdict);
    }
    let b_ok = low_alpha.iter().all(|&v| v == Verdict::Above);

    let alphas = [1.0, 1.2, 1.56, 2.0, 2.5, 3.0, 4.0];
    let mut curve = Vec::new();
    let mut brackets = Vec::new();
    for pt in sweep(&alphas, (0.0, 1e-2), 0.5, &cfg) {
        let (eta, bracket) = match pt.outcome {
            Ok(ThresholdSearch::Found(t)) => (t.eta_threshold, t.bracket),
            Ok(ThresholdSearch::NoThreshold { .. }) => (0.0, (0.0, 0.0)),
            Err(e) => return Err(csqc_core::Error::Domain(format!("sweep at {}: {e}", pt.alpha))),
        };
        curve.push(eta);
        brackets.push(bracket);
    }
    let last = brackets.len() - 1;
    let interior = (1..last).any(|i| brackets[i].0 > brackets[0].1 && brackets[i].0 > brackets[last].1);
    // a bracket still open at zero gives no estimate, only an upper bound
    let closed = (0..curve.len()).filter(|&i| brackets[i].0 > 0.0);
    let imax = closed.max_by(|&a, &b| curve[a].total_cmp(&curve[b]));
    let peak = imax.map_or(0.0, |i| curve[i]);
    let bound = brackets.iter().map(|b| b.1).fold(0.0, f64::max);
    let peak_ok = within_factor(peak, 5e-4, 10.0);
    let shown: Vec<String> = alphas
        .iter()
        .zip(&brackets)
        .map(|(a, (lo, hi))| format!("{a}:[{lo:.1e},{hi:.1e}]"))
        .collect();
    Ok((
        a_ok && b_ok && interior && peak_ok,
        format!(
            "(a) operating point {:?} [{}], alpha 1.0 {:?}; (b) interior maximum {interior}; (c) peak {peak:.2e} at alpha {:?}, no threshold above {bound:.1e} ({peak_ok}); brackets {}",
            op.verdict,
            op.reason,
            low_alpha,
            imax.map(|i| alphas[i]),
            shown.join(" ")
        ),
    ))
}

fn max_steps_formula() -> Outcome {
    let mut worst: f64 = 0.0;
    for (&(u, l), &reference) in REFERENCE_LEVELS.iter().zip(&REFERENCE_MAX_STEPS) {
        let n = match max_steps(u, l)? {
            MaxSteps::Finite(n) => n as f64,
            MaxSteps::Unbounded => f64::INFINITY,
        };
        worst = worst.max((n / reference - 1.0).abs());
    }
    Ok((worst < 0.05, format!("max relative deviation {worst:.3}")))
}

fn resources() -> Outcome {
    let table = operating_table()?;
    let protocol = Protocol::for_table(&table, EXACT_TIE)?;
    let acc = verifier_acceptance(&protocol, &table, 100_000, 1)?;
    let report = count_resources(1, &protocol, &table, &FactoryCosts::nominal(), acc)?;
    let t = &report.levels[0];
    let f = t.fractions();
    let total_ok = within_factor(t.total, 1e3, 3.0);
    let frac_ok = f.iter().zip(&FRACTIONS).all(|(a, b)| (a - b).abs() <= 0.05);
    let diag_ok = within_factor(t.diagonal_states_consumed, 1e4, 3.0);
    Ok((
        total_ok && frac_ok && diag_ok,
        format!(
            "total {:.3e} ({total_ok}); fractions [{}] ({frac_ok}); diagonal states {:.3e} ({diag_ok})",
            t.total,
            f.map(|v| format!("{v:.3}")).join(", "),
            t.diagonal_states_consumed
        ),
    ))
}

#[derive(Default)]
struct SiteRecorder {
    sites: Vec<(OpRates, bool)>,
}

impl NoiseSource for SiteRecorder {
    fn fault(&mut self, rates: &OpRates, postselected: bool) -> Fault {
        self.sites.push((*rates, postselected));
        Fault::default()
    }
}

fn single_faults(rates: &OpRates, postselected: bool) -> Vec<Fault> {
    let mut out = vec![Fault::X, Fault::Z, Fault::Y];
    if rates.located > 0.0 && !postselected {
        for (x, z) in [(false, false), (true, false), (false, true), (true, true)] {
            out.push(Fault { located: true, x, z });
        }
    }
    out
}

fn fault_tolerance() -> Outcome {
    let table = operating_table()?;
    let p = Protocol::for_table(&table, EXACT_TIE)?;
    let mut checked = 0u64;
    let mut errors = 0u64;

    let mut rec = SiteRecorder::default();
    p.round_trial(BlockFrame::default(), &table, &mut rec)?;
    for (site, (rates, post)) in rec.sites.iter().enumerate() {
        for f in single_faults(rates, *post) {
            let t = p.round_trial(BlockFrame::default(), &table, &mut ScriptedNoise::new(vec![(site, f)]))?;
            checked += 1;
            errors += (t.classification != Classification::NoError) as u64;
        }
    }
    let mut rec = SiteRecorder::default();
    p.exrec_trial(&table, &mut rec);
    for (site, (rates, post)) in rec.sites.iter().enumerate() {
        for f in single_faults(rates, *post) {
            let t = p.exrec_trial(&table, &mut ScriptedNoise::new(vec![(site, f)]));
            checked += 1;
            errors += (t.classification != Classification::NoError) as u64;
        }
    }
    let clean = OpNoiseTable::noiseless();
    for i in 0..BLOCK {
        for j in i + 1..BLOCK {
            for paulis in 0..16u8 {
                let bit = |k: u8, pos: usize| ((paulis >> k) & 1) << pos;
                let data = BlockFrame { x: bit(0, i) | bit(1, j), z: bit(2, i) | bit(3, j), located: (1 << i) | (1 << j) };
                let t = p.round_trial(data, &clean, &mut ScriptedNoise::noiseless())?;
                checked += 1;
                errors += (t.classification != Classification::NoError) as u64;
            }
        }
    }
    Ok((errors == 0 && checked > 0, format!("{checked} fault patterns, {errors} not corrected")))
}

fn outputs_with_workers(workers: usize) -> Result<(String, String)> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    pool.install(|| {
        let report = run_exrec(1e-3, 0.03, true, 4_000, 11)?;
        let json = serde_json::to_string_pretty(&report).expect("serializable report");
        let cfg = ThresholdConfig { trials: 400, escalations: 0, ..ThresholdConfig::default() };
        let mut csv = String::from("alpha,eta_threshold,eta_low,eta_high,levels_tested,trials,memory_noise,seed\n");
        for pt in sweep(&[1.0, 2.0], (0.0, 1e-2), 0.6, &cfg) {
            let cells = match pt.outcome {
                Ok(ThresholdSearch::Found(t)) => {
                    format!("{},{},{},{}", t.eta_threshold, t.bracket.0, t.bracket.1, t.levels_tested)
                }
                Ok(ThresholdSearch::NoThreshold { .. }) => format!(",,,{}", cfg.levels),
                Err(e) => format!("error: {e}"),
            };
            csv.push_str(&format!("{},{cells},{},{},{}\n", pt.alpha, cfg.trials, cfg.memory_noise, cfg.seed));
        }
        Ok((json, csv))
    })
}

fn determinism() -> Outcome {
    let one = outputs_with_workers(1)?;
    let four = outputs_with_workers(4)?;
    let again = outputs_with_workers(4)?;
    let ok = one == four && four == again;
    Ok((ok, format!("json {} bytes, csv {} bytes, identical across 1/4 workers: {ok}", one.0.len(), one.1.len())))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 12] = [
        (1, overlap_law),
        (2, failure_law_all),
        (3, gate_exactness),
        (4, factory_rates),
        (5, loss_dephasing),
        (6, q_at_operating_point),
        (7, level_one_rates),
        (8, threshold_properties),
        (9, max_steps_formula),
        (10, resources),
        (11, fault_tolerance),
        (12, determinism),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut evaluation_errors = 0;
    for (n, f) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        match f() {
            Ok((pass, detail)) => {
                let verdict = if pass { "PASS" } else { "FAIL" };
                println!("criterion {n}: {verdict} {detail} [{:.1}s]", start.elapsed().as_secs_f64());
            }
            Err(e) => {
                evaluation_errors += 1;
                println!("criterion {n}: FAIL evaluation error: {e}");
            }
        }
    }
    if evaluation_errors > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
