//! Subcommand bodies. Each resolves its settings first, so invalid input
//! fails before any engine runs.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use csqc_core::gates::verify::{verify_gate, verify_z_measure};
use csqc_core::gates::GateKind;
use csqc_core::noise::{build_table, NoiseParams, OpNoiseTable};
use csqc_core::pauli::{run_exrec_with_table, ExRecReport, Protocol, EXACT_TIE};
use csqc_core::threshold::{
    concatenate, count_resources, level_seed, max_steps, run_level, sweep, verifier_acceptance, Attempts,
    FactoryCosts, LevelMap, LevelMapCoeffs, LevelRates, MaxSteps, SweepPoint, ThresholdConfig, ThresholdSearch,
    REFERENCE_RESOURCES, SATURATION,
};
use serde::Serialize;

use crate::config::{
    at_least, positive, prob, resolve_noise, tie_ratio, FactorySource, FileConfig, ResolvedNoise, DEFAULT_ALPHAS,
    DEFAULT_SWEEP_ALPHAS, MAX_LEVELS, MIN_EC_TRIALS,
};

/// Trials below which a simulation report carries a warning.
const WEAK_TRIALS: u64 = 10_000;
const MAX_VERIFY_ALPHA: f64 = 4.0;

/// Why a run stopped, with its exit status.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: a verification did not pass, or an engine failed.
    Verification(anyhow::Error),
    /// Exit 2: invalid flags or configuration.
    Config(anyhow::Error),
    /// Exit 3: a cutoff, memory or attempt guard tripped.
    Guard(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Config(_) => 2,
            Failure::Guard(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Verification(e) | Failure::Config(e) | Failure::Guard(e) => e,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn is_guard(e: &csqc_core::Error) -> bool {
    matches!(
        e,
        csqc_core::Error::CutoffTooSmall { .. }
            | csqc_core::Error::ResourceLimit { .. }
            | csqc_core::Error::Starvation { .. }
    )
}

fn engine(e: csqc_core::Error) -> Failure {
    if is_guard(&e) {
        Failure::Guard(e.into())
    } else {
        Failure::Verification(e.into())
    }
}

/// Every artifact carries the resolved settings, the version and the seed.
#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    config: &'a C,
    result: R,
}

fn envelope<'a, C: Serialize, R: Serialize>(
    command: &'static str,
    seed: Option<u64>,
    config: &'a C,
    result: R,
) -> Envelope<'a, C, R> {
    Envelope { tool: "csqc", version: env!("CARGO_PKG_VERSION"), command, seed, config, result }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Guard)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing stdout").map_err(Failure::Guard)
        }
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Guard(e.into()))?;
    text.push('\n');
    write_text(out, &text)
}

pub enum Job {
    Verify(VerifyConfig, Option<PathBuf>),
    Noise(ResolvedNoise, bool, Option<PathBuf>),
    Ec(EcConfig, Option<PathBuf>),
    Sweep(SweepConfig, PathBuf),
    Resources(ResourcesConfig, Option<PathBuf>),
}

impl Job {
    pub fn run(self) -> Result<(), Failure> {
        match self {
            Job::Verify(c, out) => run_verify(&c, out.as_deref()),
            Job::Noise(c, json, out) => run_noise(&c, json, out.as_deref()),
            Job::Ec(c, out) => run_ec(&c, out.as_deref()),
            Job::Sweep(c, out) => run_sweep(&c, &out),
            Job::Resources(c, out) => run_resources(&c, out.as_deref()),
        }
    }
}

// ---- verify gates

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub alphas: Vec<f64>,
}

pub fn verify_config(c: &FileConfig) -> Result<VerifyConfig, Failure> {
    let alphas = c.alphas.clone().unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    if alphas.is_empty() {
        return Err(anyhow!("at least one alpha is required").into());
    }
    for &a in &alphas {
        if !(0.0..=MAX_VERIFY_ALPHA).contains(&a) {
            return Err(anyhow!("alpha must be in [0, {MAX_VERIFY_ALPHA}], got {a}").into());
        }
    }
    Ok(VerifyConfig { alphas })
}

#[derive(Serialize)]
struct CircuitCheck {
    circuit: String,
    alpha: f64,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip)]
    guard: bool,
}

fn check<T: Serialize>(circuit: String, alpha: f64, r: csqc_core::Result<T>, passed: impl Fn(&T) -> bool) -> CircuitCheck {
    match r {
        Ok(rep) => CircuitCheck {
            circuit,
            alpha,
            status: if passed(&rep) { "passed" } else { "failed" },
            report: serde_json::to_value(&rep).ok(),
            error: None,
            guard: false,
        },
        Err(e) => CircuitCheck {
            circuit,
            alpha,
            status: "error",
            report: None,
            error: Some(e.to_string()),
            guard: is_guard(&e),
        },
    }
}

fn gate_name(g: &GateKind) -> String {
    match g {
        GateKind::Identity => "teleport".into(),
        GateKind::ZRot { theta } => format!("zrot({theta})"),
        GateKind::Hadamard => "hadamard".into(),
        GateKind::Cz => "cz".into(),
    }
}

fn run_verify(c: &VerifyConfig, out: Option<&Path>) -> Result<(), Failure> {
    let gates = [
        GateKind::Identity,
        GateKind::ZRot { theta: 0.0 },
        GateKind::ZRot { theta: PI / 4.0 },
        GateKind::ZRot { theta: PI / 2.0 },
        GateKind::ZRot { theta: PI },
        GateKind::Hadamard,
        GateKind::Cz,
    ];
    let mut checks = Vec::new();
    for &alpha in &c.alphas {
        checks.push(check("z_measure".into(), alpha, verify_z_measure(alpha), |r| r.failure_law_passed && r.unambiguous));
        for g in gates {
            checks.push(check(gate_name(&g), alpha, verify_gate(g, alpha), |r| r.exact_passed && r.failure_law_passed));
        }
    }
    let failed = checks.iter().filter(|k| k.status != "passed").count();
    let guard_only = failed > 0 && checks.iter().filter(|k| k.status != "passed").all(|k| k.guard);
    #[derive(Serialize)]
    struct Summary<'a> {
        passed: bool,
        failed: usize,
        checks: &'a [CircuitCheck],
    }
    write_json(out, &envelope("verify gates", None, c, Summary { passed: failed == 0, failed, checks: &checks }))?;
    match (failed, guard_only) {
        (0, _) => Ok(()),
        (_, true) => Err(Failure::Guard(anyhow!("{failed} circuits hit a cutoff or memory guard"))),
        _ => Err(Failure::Verification(anyhow!("{failed} circuits failed verification"))),
    }
}

// ---- noise table

pub fn noise_config(c: &FileConfig) -> Result<ResolvedNoise, Failure> {
    Ok(resolve_noise(c)?)
}

fn table_of(n: &ResolvedNoise) -> Result<OpNoiseTable, Failure> {
    let table = match (n.alpha, n.eta) {
        (Some(alpha), Some(eta)) => NoiseParams::new(alpha, eta, n.convention).and_then(|p| build_table(&p, n.memory_noise)),
        _ => OpNoiseTable::from_rates(n.p, n.q, n.memory_noise),
    };
    table.map_err(|e| Failure::Config(e.into()))
}

fn run_noise(c: &ResolvedNoise, json: bool, out: Option<&Path>) -> Result<(), Failure> {
    let table = table_of(c)?;
    if json {
        return write_json(out, &envelope("noise table", None, c, &table));
    }
    let mut text = format!("p = {:e}  q = {:e}  convention = {}\n", c.p, c.q, c.convention.name());
    text.push_str(&format!("{:<10} {:>12} {:>12} {:>12}\n", "operation", "located", "x", "z"));
    for (name, r) in table.rows() {
        text.push_str(&format!("{name:<10} {:>12.4e} {:>12.4e} {:>12.4e}\n", r.located, r.x, r.z));
    }
    write_text(out, &text)
}

// ---- ec simulate

#[derive(Clone, Debug, Serialize)]
pub struct EcConfig {
    pub noise: ResolvedNoise,
    pub trials: u64,
    pub seed: u64,
    pub tie_ratio: f64,
}

pub fn ec_config(c: &FileConfig) -> Result<EcConfig, Failure> {
    Ok(EcConfig {
        noise: resolve_noise(c)?,
        trials: at_least("trials", c.trials.unwrap_or(100_000), MIN_EC_TRIALS)?,
        seed: c.seed.unwrap_or(1),
        tie_ratio: tie_ratio(c.tie_ratio)?,
    })
}

fn run_ec(c: &EcConfig, out: Option<&Path>) -> Result<(), Failure> {
    let table = table_of(&c.noise)?;
    let mut report: ExRecReport = run_exrec_with_table(&table, c.trials, c.seed, c.tie_ratio).map_err(engine)?;
    if c.trials < WEAK_TRIALS {
        report.warnings.push(format!("{} trials; confidence intervals are wide below {WEAK_TRIALS}", c.trials));
    }
    #[derive(Serialize)]
    struct EcResult {
        #[serde(flatten)]
        report: ExRecReport,
        max_steps: MaxSteps,
    }
    let steps = max_steps(report.rates.unlocated, report.rates.located).map_err(engine)?;
    write_json(out, &envelope("ec simulate", Some(c.seed), c, EcResult { report, max_steps: steps }))
}

// ---- threshold sweep

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub eta_low: f64,
    pub eta_high: f64,
    pub rel_tol: f64,
    pub threshold: ThresholdConfig,
}

pub fn sweep_config(c: &FileConfig) -> Result<SweepConfig, Failure> {
    let alphas = c.alphas.clone().unwrap_or_else(|| DEFAULT_SWEEP_ALPHAS.to_vec());
    if alphas.is_empty() {
        return Err(anyhow!("at least one alpha is required").into());
    }
    for &a in &alphas {
        positive("alpha", a)?;
    }
    let eta_low = prob("eta_low", c.eta_low.unwrap_or(0.0))?;
    let eta_high = prob("eta_high", c.eta_high.unwrap_or(1e-2))?;
    if eta_low >= eta_high {
        return Err(anyhow!("eta_low must be below eta_high, got {eta_low} and {eta_high}").into());
    }
    let rel_tol = c.rel_tol.unwrap_or(0.25);
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(anyhow!("rel_tol must be in (0, 1), got {rel_tol}").into());
    }
    let levels = at_least("levels", c.levels.unwrap_or(3), 3)?;
    if levels > MAX_LEVELS {
        return Err(anyhow!("levels must be at most {MAX_LEVELS}, got {levels}").into());
    }
    let escalations = c.escalations.unwrap_or(2);
    if escalations > 6 {
        return Err(anyhow!("escalations must be at most 6, got {escalations}").into());
    }
    let map = c.map.clone().unwrap_or(LevelMap::SelfSimilar);
    if let LevelMap::External(m) = &map {
        LevelMapCoeffs::new(m.unlocated.clone(), m.located.clone()).map_err(|e| Failure::Config(e.into()))?;
    }
    let defaults = ThresholdConfig::default();
    let threshold = ThresholdConfig {
        levels,
        trials: at_least("trials", c.trials.unwrap_or(defaults.trials), 1)?,
        seed: c.seed.unwrap_or(defaults.seed),
        memory_noise: c.memory_noise.unwrap_or(defaults.memory_noise),
        convention: c.convention.unwrap_or(defaults.convention),
        map,
        tie_ratio: tie_ratio(c.tie_ratio)?,
        escalations,
    };
    Ok(SweepConfig { alphas, eta_low, eta_high, rel_tol, threshold })
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    eta_threshold: Option<f64>,
    eta_low: Option<f64>,
    eta_high: Option<f64>,
    levels_tested: u32,
    trials: u64,
    memory_noise: bool,
    seed: u64,
}

/// Sidecar path: the CSV path with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn run_sweep(c: &SweepConfig, out: &Path) -> Result<(), Failure> {
    let points: Vec<SweepPoint> = sweep(&c.alphas, (c.eta_low, c.eta_high), c.rel_tol, &c.threshold);
    let t = &c.threshold;
    let mut w = csv::Writer::from_writer(Vec::new());
    for pt in &points {
        let found = match &pt.outcome {
            Ok(ThresholdSearch::Found(f)) => Some(f),
            _ => None,
        };
        w.serialize(SweepRow {
            alpha: pt.alpha,
            eta_threshold: found.map(|f| f.eta_threshold),
            eta_low: found.map(|f| f.bracket.0),
            eta_high: found.map(|f| f.bracket.1),
            levels_tested: t.levels,
            trials: t.trials,
            memory_noise: t.memory_noise,
            seed: t.seed,
        })
        .map_err(|e| Failure::Guard(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Guard(anyhow!("{e}")))?;
    std::fs::write(out, bytes).with_context(|| format!("writing {}", out.display())).map_err(Failure::Guard)?;

    #[derive(Serialize)]
    struct Status<'a> {
        alpha: f64,
        status: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        search: Option<&'a ThresholdSearch>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<&'a str>,
    }
    let statuses: Vec<Status> = points
        .iter()
        .map(|pt| match &pt.outcome {
            Ok(s @ ThresholdSearch::Found(f)) => Status {
                alpha: pt.alpha,
                status: if f.unresolved { "found_unresolved" } else { "found" },
                search: Some(s),
                error: None,
            },
            Ok(s @ ThresholdSearch::NoThreshold { .. }) => {
                Status { alpha: pt.alpha, status: "no_threshold", search: Some(s), error: None }
            }
            Err(e) => Status { alpha: pt.alpha, status: "error", search: None, error: Some(e) },
        })
        .collect();
    write_json(Some(&sidecar_path(out)), &envelope("threshold sweep", Some(t.seed), c, statuses))
}

// ---- resources

#[derive(Clone, Debug, Serialize)]
pub struct ResourcesConfig {
    pub noise: ResolvedNoise,
    pub levels: u32,
    pub factory: FactorySource,
    pub factory_alpha: Option<f64>,
    pub verifier_samples: u64,
    pub trials: u64,
    pub seed: u64,
}

pub fn resources_config(c: &FileConfig) -> Result<ResourcesConfig, Failure> {
    let noise = resolve_noise(c)?;
    let levels = at_least("levels", c.levels.unwrap_or(5), 1)?;
    if levels > MAX_LEVELS {
        return Err(anyhow!("levels must be at most {MAX_LEVELS}, got {levels}").into());
    }
    let factory = c.factory.unwrap_or(FactorySource::Nominal);
    let factory_alpha = match factory {
        FactorySource::Nominal => None,
        FactorySource::Measured => Some(positive("factory_alpha", c.factory_alpha.or(noise.alpha).unwrap_or(1.56))?),
    };
    Ok(ResourcesConfig {
        noise,
        levels,
        factory,
        factory_alpha,
        verifier_samples: at_least("verifier_samples", c.verifier_samples.unwrap_or(100_000), 1)?,
        trials: at_least("trials", c.trials.unwrap_or(100_000), 1)?,
        seed: c.seed.unwrap_or(1),
    })
}

#[derive(Serialize)]
struct LevelResources {
    level: u32,
    memory: f64,
    hadamard: f64,
    cz: f64,
    diagonal_state: f64,
    x_meas: f64,
    total: f64,
    fractions: [f64; 5],
    diagonal_states_consumed: f64,
    /// Effective rates from the simulation; absent past saturation.
    rates: Option<LevelRates>,
    max_steps: Option<MaxSteps>,
}

fn run_resources(c: &ResourcesConfig, out: Option<&Path>) -> Result<(), Failure> {
    let table = table_of(&c.noise)?;
    let protocol = Protocol::for_table(&table, EXACT_TIE).map_err(engine)?;
    let costs = match c.factory_alpha {
        Some(alpha) => FactoryCosts::measured(alpha).map_err(engine)?,
        None => FactoryCosts::nominal(),
    };
    let acceptance = verifier_acceptance(&protocol, &table, c.verifier_samples, c.seed).map_err(engine)?;
    if acceptance == 0.0 {
        return Err(Failure::Guard(anyhow!("the verifier accepted none of {} samples", c.verifier_samples)));
    }
    let report = count_resources(c.levels, &protocol, &table, &costs, acceptance).map_err(engine)?;

    let level1 = run_level(&table, 1, c.trials, level_seed(c.seed, 1), EXACT_TIE).map_err(engine)?;
    let rates = concatenate(level1, &LevelMap::SelfSimilar, c.levels, c.trials, c.seed, SATURATION).map_err(engine)?;
    let levels = report
        .levels
        .iter()
        .map(|t| {
            let r = rates.get(t.level as usize - 1).copied();
            Ok(LevelResources {
                level: t.level,
                memory: t.memory,
                hadamard: t.hadamard,
                cz: t.cz,
                diagonal_state: t.diagonal_state,
                x_meas: t.x_meas,
                total: t.total,
                fractions: t.fractions(),
                diagonal_states_consumed: t.diagonal_states_consumed,
                max_steps: r.map(|r| max_steps(r.unlocated, r.located)).transpose().map_err(engine)?,
                rates: r,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let reference_growth: Vec<f64> = REFERENCE_RESOURCES.windows(2).map(|w| w[1] / w[0]).collect();
    #[derive(Serialize)]
    struct ResourcesResult {
        attempts: Attempts,
        round: csqc_core::pauli::OpCounts,
        levels: Vec<LevelResources>,
        growth_ratios: Vec<f64>,
        reference_growth_ratios: Vec<f64>,
        factory: FactoryCosts,
    }
    let result = ResourcesResult {
        attempts: report.attempts,
        round: report.round,
        levels,
        growth_ratios: report.growth_ratios,
        reference_growth_ratios: reference_growth,
        factory: report.factory,
    };
    write_json(out, &envelope("resources", Some(c.seed), c, result))
}
