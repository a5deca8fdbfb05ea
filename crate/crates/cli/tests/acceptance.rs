//! Acceptance criteria. Each test writes one `criterion N: PASS|FAIL` line to
//! stderr (bypassing the harness capture) and then asserts.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use aoa_jam::array::ArrayGeometry;
use aoa_jam::channel::{expected_gram, expected_sandwich, sample_channel_with, upsilon, RicianChannelSpec};
use aoa_jam::estimation::{AngleGrid, TrainingSequence};
use aoa_jam::jammer::{aware_objective, aware_signal, unaware_allocation, unaware_allocation_for, water_fill, PowerBudget};
use aoa_jam::linalg::{real_to_complex, CMatrix, HermitianEigen, C64};
use aoa_jam::seed::{complex_normal, complex_normal_vector, Seed};
use aoa_jam::sim::{crb_sweep, run_scenario, JammerMode, ReceiverKnowledge, Scenario};
use rand::Rng;

const SEED: u64 = 2024;

const CRB_ORDER_SLACK: f64 = 1e-12;
const CRB_SEPARATION: f64 = 0.05;
const CRB_RUNTIME: Duration = Duration::from_secs(10);
const COINCIDE_REL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-10;
const KKT_TOL: f64 = 1e-9;
const BUDGET_REL: f64 = 1e-12;
const ALIGN_INSTANCES: usize = 200;
const ALIGN_DRAWS: usize = 10_000;
const ORACLE_DRAWS: usize = 100_000;
const ORACLE_SE: f64 = 3.0;
const DUAL_PEAK_RATE: f64 = 0.8;
const CAPTURE_RATE: f64 = 0.9;
const CAPTURE_RUNTIME: Duration = Duration::from_secs(120);
const UNAWARE_HIT_RATE: f64 = 0.9;
const PERFECT_CSI_HIT_RATE: f64 = 0.7;
const EFFICIENCY_LIMIT: f64 = 1.15;
const EFFICIENCY_TRIALS: usize = 2000;
const EFFICIENCY_RUNTIME: Duration = Duration::from_secs(300);
const REFERENCE_TRIALS: usize = 500;

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n} ({name}): {verdict} | {detail}");
}

fn ula(n: usize) -> ArrayGeometry {
    ArrayGeometry::half_wavelength(n).unwrap()
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Simulation setup shared by the reference scenarios: 4-element arrays,
/// k_t = k_j = 10 dB, L = 64, SNR 15 dB, 1° search grid.
fn reference(theta_t: f64, theta_j: f64, ratio: f64, mode: JammerMode, knowledge: ReceiverKnowledge) -> Scenario {
    Scenario {
        rx: ula(4),
        jammer: ula(4),
        theta_t: theta_t.to_radians(),
        theta_j: theta_j.to_radians(),
        phi_j: 0.0,
        k_t: db(10.0),
        k_j: db(10.0),
        training_len: 64,
        snr_db: 15.0,
        power_ratio: ratio,
        jammer_mode: mode,
        receiver_knowledge: knowledge,
        trials: REFERENCE_TRIALS,
        seed: Seed(SEED),
        block_fading: true,
        grid: AngleGrid::degrees(-90.0, 90.0, 1.0).unwrap(),
        refine: false,
    }
}

#[test]
fn criterion_01_crb_ordering() {
    let start = Instant::now();
    let s = reference(12.0, 50.0, 1.0, JammerMode::Unaware, ReceiverKnowledge::Statistical);
    let grid: Vec<f64> = (-80..=80).map(|d| (d as f64).to_radians()).collect();
    let sweep = crb_sweep(&s, &grid).unwrap();
    let elapsed = start.elapsed();
    let mut ordered = true;
    let mut max_sep = 0.0f64;
    for i in 0..grid.len() {
        let (f, u, o) = (sweep.free.values[i], sweep.uniform.values[i], sweep.optimal.values[i]);
        ordered &= f <= u * (1.0 + CRB_ORDER_SLACK) && u <= o * (1.0 + CRB_ORDER_SLACK);
        max_sep = max_sep.max(o / u - 1.0);
    }
    let pass = ordered && max_sep >= CRB_SEPARATION && elapsed < CRB_RUNTIME;
    report(
        1,
        "CRB ordering",
        pass,
        &format!("pointwise order {ordered}, max optimal/uniform - 1 = {max_sep:.4}, runtime {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_rayleigh_degeneration() {
    let budget = PowerBudget::new(1.0).unwrap();
    let q = unaware_allocation(4, 4, 0.0, budget).unwrap();
    let exact = q == CMatrix::identity(4, 4).scale(0.25);
    let mut s = reference(12.0, 50.0, 1.0, JammerMode::Unaware, ReceiverKnowledge::Statistical);
    s.k_j = 0.0;
    let grid: Vec<f64> = (-80..=80).map(|d| (d as f64).to_radians()).collect();
    let sweep = crb_sweep(&s, &grid).unwrap();
    let worst = sweep
        .uniform
        .values
        .iter()
        .zip(&sweep.optimal.values)
        .map(|(u, o)| (u - o).abs() / u)
        .fold(0.0, f64::max);
    let pass = exact && worst <= COINCIDE_REL;
    report(2, "k_j -> 0 degeneration", pass, &format!("Q == (P/n)I exactly: {exact}, max relative CRB gap {worst:e}"));
    assert!(pass);
}

#[test]
fn criterion_03_upsilon_eigenvalues() {
    let mut worst = 0.0f64;
    for k in [0.0, 0.1, 1.0, 10.0, 100.0] {
        for n in [1, 2, 4, 8] {
            let u = upsilon(n, k).unwrap();
            let numeric = HermitianEigen::new(&real_to_complex(u.matrix())).values;
            for (a, b) in u.eigenvalues().iter().zip(&numeric) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let pass = worst <= EIGEN_TOL;
    report(3, "Upsilon eigenvalues", pass, &format!("max |analytic - numeric| = {worst:e}"));
    assert!(pass);
}

#[test]
fn criterion_04_water_filling() {
    let mut rng = Seed(SEED).child(4).rng();
    let (mut kkt, mut residual) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let mut lambdas: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.15) { 0.0 } else { 10f64.powf(rng.random_range(-3.0..3.0)) })
            .collect();
        if lambdas.iter().all(|&l| l == 0.0) {
            lambdas[0] = 1.0;
        }
        let budget = 10f64.powf(rng.random_range(-2.0..2.0));
        let s = water_fill(&lambdas, budget).unwrap();
        let total: f64 = s.allocations.iter().sum();
        residual = residual.max((total - budget).abs() / budget);
        for (&l, &p) in lambdas.iter().zip(&s.allocations) {
            let inv = if l > 0.0 { 1.0 / l } else { f64::INFINITY };
            let r = if p > 0.0 { (s.level - inv - p).abs() } else { (s.level - inv).max(0.0) };
            kkt = kkt.max(r);
        }
    }
    let pass = kkt <= KKT_TOL && residual <= BUDGET_REL;
    report(4, "water-filling KKT + budget", pass, &format!("max KKT residual {kkt:e}, max budget residual {residual:e}"));
    assert!(pass);
}

#[test]
fn criterion_05_alignment_optimality() {
    let mut rng = Seed(SEED).child(5).rng();
    let budget = PowerBudget::new(1.0).unwrap();
    let mut gaps = Vec::with_capacity(ALIGN_INSTANCES);
    for _ in 0..ALIGN_INSTANCES {
        let spec_t = RicianChannelSpec::single_antenna(db(10.0), rng.random_range(-1.4..1.4), ula(4)).unwrap();
        let spec_j = RicianChannelSpec::new(db(10.0), rng.random_range(-1.4..1.4), 0.0, ula(4), ula(4)).unwrap();
        let h_t = sample_channel_with(&spec_t, &mut rng);
        let h_j = sample_channel_with(&spec_j, &mut rng).total;
        let x = complex_normal(&mut rng);
        let training = TrainingSequence::new(vec![x], x.norm_sqr(), x.norm_sqr()).unwrap();
        let nlos = h_t.nlos.column(0).into_owned();
        let signal = aware_signal(std::slice::from_ref(&h_j), &training, budget).unwrap().signals.remove(0);
        let aligned = aware_objective(&nlos, x, &h_j, &signal);
        let best_random = (0..ALIGN_DRAWS)
            .map(|_| {
                let v = complex_normal_vector(&mut rng, 4);
                let v = v.unscale(v.norm()).scale(budget.total().sqrt());
                aware_objective(&nlos, x, &h_j, &v)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        gaps.push(aligned - best_random);
    }
    let failures = gaps.iter().filter(|g| **g < 0.0).count();
    let mut sorted = gaps.clone();
    sorted.sort_by(f64::total_cmp);
    let pass = failures == 0;
    report(
        5,
        "alignment optimality",
        pass,
        &format!(
            "{failures}/{ALIGN_INSTANCES} instances beaten by a random signal, median gap {:.3}",
            sorted[sorted.len() / 2]
        ),
    );
    assert!(pass);
}

fn worst_se_ratio(samples: &[CMatrix], truth: &CMatrix) -> f64 {
    let (r, c) = truth.shape();
    let n = samples.len() as f64;
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in 0..c {
            let mean = samples.iter().map(|m| m[(i, j)]).sum::<C64>() / n;
            let var = samples.iter().map(|m| (m[(i, j)] - mean).norm_sqr()).sum::<f64>() / n;
            let se = (var / n).sqrt();
            worst = worst.max((mean - truth[(i, j)]).norm() / se.max(1e-300));
        }
    }
    worst
}

#[test]
fn criterion_06_expectation_oracles() {
    let mut worst = 0.0f64;
    for (idx, k) in [0.0, 1.0, 10.0].into_iter().enumerate() {
        let spec = RicianChannelSpec::new(k, 35f64.to_radians(), 0.0, ula(4), ula(4)).unwrap();
        let mut rng = Seed(SEED).path(&[6, idx as u64]).rng();
        let q = unaware_allocation_for(&spec, PowerBudget::new(1.0).unwrap()).unwrap();
        let draws: Vec<CMatrix> = (0..ORACLE_DRAWS).map(|_| sample_channel_with(&spec, &mut rng).total).collect();
        let grams: Vec<CMatrix> = draws.iter().map(|h| h.adjoint() * h).collect();
        let sandwiches: Vec<CMatrix> = draws.iter().map(|h| h * &q * h.adjoint()).collect();
        worst = worst.max(worst_se_ratio(&grams, &expected_gram(&spec)));
        worst = worst.max(worst_se_ratio(&sandwiches, &expected_sandwich(&spec, &q).unwrap()));
    }
    let pass = worst <= ORACLE_SE;
    report(6, "expectation oracles", pass, &format!("worst deviation {worst:.3} standard errors"));
    assert!(pass);
}

#[test]
fn criterion_07_capture_effect() {
    let start = Instant::now();
    let equal = run_scenario(&reference(12.0, 50.0, 1.0, JammerMode::Aware, ReceiverKnowledge::Statistical)).unwrap();
    let quad = run_scenario(&reference(23.0, 40.0, 4.0, JammerMode::Aware, ReceiverKnowledge::Statistical)).unwrap();
    let elapsed = start.elapsed();
    let dual = equal.summary.dual_peak_rate;
    let capture = quad.summary.capture_rate;
    let pass = dual >= DUAL_PEAK_RATE && capture >= CAPTURE_RATE && elapsed < CAPTURE_RUNTIME;
    report(
        7,
        "capture effect",
        pass,
        &format!("P_j=P_t dual-peak rate {dual:.3}, P_j=4P_t capture rate {capture:.3}, runtime {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_unaware_robustness() {
    let run = run_scenario(&reference(12.0, 50.0, 1.0, JammerMode::Unaware, ReceiverKnowledge::Statistical)).unwrap();
    let hit = run.summary.hit_rate;
    let pass = hit >= UNAWARE_HIT_RATE;
    report(8, "robustness to unaware jamming", pass, &format!("argmax within one cell of theta_t in {hit:.3} of trials"));
    assert!(pass);
}

#[test]
fn criterion_09_perfect_csi_advantage() {
    let perfect = run_scenario(&reference(23.0, 40.0, 4.0, JammerMode::Aware, ReceiverKnowledge::PerfectCsi)).unwrap();
    let stat = run_scenario(&reference(23.0, 40.0, 4.0, JammerMode::Aware, ReceiverKnowledge::Statistical)).unwrap();
    let (cp, cs, hit) = (perfect.summary.capture_rate, stat.summary.capture_rate, perfect.summary.hit_rate);
    let pass = cp < cs && hit >= PERFECT_CSI_HIT_RATE;
    report(
        9,
        "perfect-CSI receiver advantage",
        pass,
        &format!("capture perfect {cp:.3} vs statistical {cs:.3}, perfect-CSI hit rate {hit:.3}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_asymptotic_efficiency() {
    let start = Instant::now();
    let ratios: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&n| {
            let mut s = reference(12.0, 50.0, 0.0, JammerMode::None, ReceiverKnowledge::Statistical);
            s.rx = ula(n);
            s.k_t = f64::INFINITY;
            s.trials = EFFICIENCY_TRIALS;
            s.grid = AngleGrid::default();
            s.refine = true;
            run_scenario(&s).unwrap().summary.efficiency()
        })
        .collect();
    let elapsed = start.elapsed();
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0]);
    let last = ratios[3];
    let pass = monotone && last <= EFFICIENCY_LIMIT && elapsed < EFFICIENCY_RUNTIME;
    report(
        10,
        "asymptotic efficiency",
        pass,
        &format!("var/CRB for n_r = 4, 8, 16, 32: {ratios:.4?}, non-increasing {monotone}, runtime {elapsed:.2?}"),
    );
    assert!(pass);
}

const CLI_CONFIG: &str = r#"
n_r = 4
n_j = 4
theta_t_deg = 23.0
theta_j_deg = 40.0
k_t_db = 10.0
k_j_db = 10.0
training_len = 64
snr_db = 15.0
power_ratio = 4.0
jammer_mode = "aware"
receiver_knowledge = "statistical"
trials = 50
seed = 2024
grid_step_deg = 1.0
"#;

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_aoa-sim")).args(args).output().unwrap()
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    std::fs::write(&config, CLI_CONFIG).unwrap();
    let cfg = config.to_str().unwrap();
    let mut identical = true;
    let mut ran = 0;
    for (cmd, extra) in [
        ("crb", vec![]),
        ("spectrum", vec![]),
        ("sweep", vec!["--param", "power_ratio", "--values", "1,2,4"]),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{cmd}-{run}.csv"));
            let mut args = vec![cmd, "--config", cfg, "--out", out.to_str().unwrap(), "--seed", "77"];
            args.extend(extra.iter().copied());
            let status = run_cli(&args);
            identical &= status.status.success();
            let mut bytes = std::fs::read(&out).unwrap_or_default();
            if cmd == "spectrum" {
                let side = dir.path().join(format!("{cmd}-{run}.summary.csv"));
                bytes.extend(std::fs::read(side).unwrap_or_default());
            }
            outputs.push(bytes);
        }
        identical &= !outputs[0].is_empty() && outputs[0] == outputs[1];
        ran += 1;
    }
    report(11, "determinism", identical, &format!("{ran} subcommands, byte-identical repeated outputs: {identical}"));
    assert!(identical);
}

