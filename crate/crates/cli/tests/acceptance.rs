//! End-to-end acceptance suite. Each test prints a single pass/fail line so
//! the full gate is readable from the test log.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crosstalk_core::analytic::{
    eta_pair, eta_weak, pair_expectations, predict_z_multi, MultiDriveSpec, PairwiseDriveSpec,
};
use crosstalk_core::chipgen::{generate_chip, ChipGenConfig};
use crosstalk_core::experiment::{
    run_multiplet_experiment, sample_counts, apply_readout_error, mitigate_readout,
    sigma_from_counts, PhaseSweepProtocol,
};
use crosstalk_core::learning::{characterize_chip, median, FitOptions, FitFlags, PairFitResult, build_report};
use crosstalk_core::model::{wrap_phase, ChipTopology, PulseEnvelope, ReadoutErrorModel, TransmonParams, DEFAULT_ANHARMONICITY};
use crosstalk_core::oracle::{evolve_target, expectation_xyz, DriveTermInstance, SimulationConfig};
use crosstalk_core::predict::{predict_multiplet, score_prediction};
use crosstalk_core::report::{build_graph, render_dot};
use crosstalk_cli::ops::random_multiplets;

fn check(criterion: u32, name: &str, ok: bool, detail: &str) {
    if ok {
        println!("acceptance {criterion} ({name}): pass");
    } else {
        println!("acceptance {criterion} ({name}): FAIL [{detail}]");
        panic!("acceptance criterion {criterion} failed: {detail}");
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
}

fn target() -> TransmonParams {
    TransmonParams { frequency: 2.0 * PI * 5.0e9, anharmonicity: DEFAULT_ANHARMONICITY }
}

fn drive(beta: f64, theta: f64, phi: f64, rotation_angle: f64) -> DriveTermInstance {
    DriveTermInstance {
        beta,
        theta,
        phi,
        carrier: 2.0 * PI * 5.0e9,
        envelope: PulseEnvelope::cosine(160e-9, rotation_angle),
        delay: 0.0,
    }
}

#[test]
fn criterion_1_analytic_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
    let sim = SimulationConfig::rwa_two_level();
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let beta = uniform(&mut rng, 0.0, 0.3);
        let theta = uniform(&mut rng, -PI, PI);
        let dphi = uniform(&mut rng, 0.0, 2.0 * PI);
        let omega = uniform(&mut rng, PI / 2.0, 3.0 * PI);
        let drives = [drive(1.0, 0.0, 0.0, omega), drive(beta, theta, -dphi, omega)];
        let z_num = expectation_xyz(&evolve_target(&target(), &drives, &sim).unwrap()).z;
        let spec = PairwiseDriveSpec { beta, theta, phi_a: 0.0, phi_b: 0.0, rotation_angle: omega };
        let (_, _, z_cf) = pair_expectations(&spec, dphi).unwrap();
        worst = worst.max((z_num - z_cf).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        1,
        "analytic-oracle equivalence",
        worst <= 1e-6 && elapsed < 60.0,
        &format!("max |dz| = {worst:.2e}, elapsed {elapsed:.1}s"),
    );
}

#[test]
fn criterion_2_multi_drive_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC02);
    let sim = SimulationConfig::rwa_two_level();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n_tones = 2 + (i % 2); // alternate 3- and 4-drive configurations
        let omega = uniform(&mut rng, PI / 2.0, 3.0 * PI);
        let dphi = uniform(&mut rng, 0.0, 2.0 * PI);
        let mut drives = vec![drive(1.0, 0.0, 0.0, omega)];
        let mut terms = Vec::new();
        for _ in 0..n_tones {
            let beta = uniform(&mut rng, 0.0, 0.3);
            let theta = uniform(&mut rng, -PI, PI);
            terms.push((beta, theta));
            drives.push(drive(beta, theta, -dphi, omega));
        }
        let z_num = expectation_xyz(&evolve_target(&target(), &drives, &sim).unwrap()).z;
        let z_cf = predict_z_multi(&MultiDriveSpec { rotation_angle: omega, terms, delta_phi: dphi }).unwrap();
        worst = worst.max((z_num - z_cf).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        2,
        "multi-drive equivalence",
        worst <= 1e-6 && elapsed < 120.0,
        &format!("max |dz| = {worst:.2e}, elapsed {elapsed:.1}s"),
    );
}

#[test]
fn criterion_3_round_trip_learning() {
    let protocol = PhaseSweepProtocol::default();
    let sim = SimulationConfig::rwa_two_level();
    let cfg = ChipGenConfig { qubit_count: 8, beta_range: (0.02, 0.15), ..Default::default() };
    let mut successes = 0usize;
    let runs = 100;
    for run in 0..runs {
        let chip = generate_chip(&cfg, 100 + run);
        let report =
            characterize_chip(&chip, &protocol, &sim, 10_000 + run, &FitOptions::default()).unwrap();
        let ok = report.results.iter().all(|r| {
            let (a, b) = r.pair;
            let beta_true = chip.crosstalk.beta[a][b];
            if beta_true < 0.05 {
                return true;
            }
            (r.beta_hat - beta_true).abs() <= 0.01
                && wrap_phase(r.theta_hat - chip.crosstalk.theta[a][b]).abs() <= 0.1
        });
        if ok {
            successes += 1;
        }
    }
    check(
        3,
        "round-trip learning",
        successes * 100 >= 95 * runs as usize,
        &format!("{successes}/{runs} runs recovered all beta >= 0.05 pairs"),
    );
}

#[test]
fn criterion_4_chi2_calibration() {
    let cfg = ChipGenConfig { qubit_count: 8, beta_range: (0.02, 0.15), ..Default::default() };
    let mut chip = generate_chip(&cfg, 4);
    chip.topology.disabled_readout_qubits.push(5);
    let report = characterize_chip(
        &chip,
        &PhaseSweepProtocol::default(),
        &SimulationConfig::rwa_two_level(),
        44,
        &FitOptions::default(),
    )
    .unwrap();
    check(
        4,
        "chi-squared calibration",
        report.results.len() == 49 && report.median_chi2 >= 0.7 && report.median_chi2 <= 1.4,
        &format!("{} fits, median chi2/dof = {:.3}", report.results.len(), report.median_chi2),
    );
}

#[test]
fn criterion_5_prediction_quality() {
    let protocol = PhaseSweepProtocol::default();
    let sim = SimulationConfig::rwa_two_level();
    let cfg = ChipGenConfig { qubit_count: 8, beta_range: (0.02, 0.15), ..Default::default() };
    let chip = generate_chip(&cfg, 5);
    let report = characterize_chip(&chip, &protocol, &sim, 55, &FitOptions::default()).unwrap();

    let mut multiplets = random_multiplets(&chip, 40, Some(2), 505).unwrap();
    multiplets.extend(random_multiplets(&chip, 40, Some(3), 506).unwrap());

    let mut chi2s = Vec::new();
    let mut residuals = Vec::new();
    for (i, (a, secs)) in multiplets.iter().enumerate() {
        let ds = run_multiplet_experiment(&chip, *a, secs, &protocol, &sim, 7000 + i as u64).unwrap();
        let prediction = predict_multiplet(&report, *a, secs, &protocol).unwrap();
        chi2s.push(score_prediction(&prediction, &ds).unwrap());
        for (o, m) in ds.observed_z.iter().zip(&prediction.predicted_z) {
            residuals.push((o - m).abs());
        }
    }
    let med_chi2 = median(&chi2s);
    let med_resid = median(&residuals);
    check(
        5,
        "zero-parameter prediction quality",
        med_chi2 < 2.0 && med_resid <= 0.04,
        &format!("median chi2/dof = {med_chi2:.3}, median |residual| = {med_resid:.4}"),
    );
}

#[test]
fn criterion_6_shot_noise_scale() {
    let s = sigma_from_counts(0.0, 1000, &ReadoutErrorModel::identity());
    check(6, "shot-noise scale", (s - 0.0316).abs() <= 1e-4, &format!("sigma = {s:.5}"));
}

#[test]
fn criterion_7_readout_mitigation() {
    let model = ReadoutErrorModel { p0_given_0: 0.9, p1_given_1: 0.8 };
    let shots = 100_000u64;
    let mut ok = true;
    let mut detail = String::new();
    for (case, &p) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xAC07 + case as u64);
        let ideal = sample_counts(p, shots, &mut rng);
        let (m0, m1) = apply_readout_error(ideal, &model, &mut rng);
        let mit =
            mitigate_readout((m0 as f64 / shots as f64, m1 as f64 / shots as f64), &model).unwrap();
        let se = ((p.max(0.01) * (1.0 - p).max(0.01) / shots as f64).sqrt() / model.determinant())
            .max(1e-4);
        if (mit.f1 - p).abs() >= 5.0 * se {
            ok = false;
            detail = format!("p = {p}: recovered {} (se {se:.2e})", mit.f1);
        }
    }
    check(7, "readout mitigation", ok, &detail);
}

fn golden_fit(a: usize, b: usize, beta: f64, theta: f64) -> PairFitResult {
    PairFitResult {
        pair: (a, b),
        beta_hat: beta,
        theta_hat: theta,
        chi2_per_dof: 1.0,
        beta_stderr: 0.002,
        theta_stderr: 0.02,
        flags: FitFlags::default(),
    }
}

#[test]
fn criterion_8_graph_tiers_golden() {
    let report = build_report(vec![
        golden_fit(0, 1, 0.12, 0.5),
        golden_fit(0, 2, 0.2, 1.0),
        golden_fit(1, 0, 0.07, -0.5),
        golden_fit(1, 3, 0.05, 0.0),
        golden_fit(2, 0, 0.03, 0.1),
        golden_fit(2, 3, 0.16, -2.0),
        golden_fit(3, 1, 0.1, 2.0),
        golden_fit(3, 2, 0.049, 0.3),
    ]);
    let graph = build_graph(&report, &ChipTopology::ring(4));

    // tier boundaries: 0.049 hidden, 0.05 and 0.1 green, 0.12 strong
    use crosstalk_core::report::Tier;
    let tier = |a, b| graph.edges.iter().find(|e| (e.from, e.to) == (a, b)).unwrap().tier;
    let boundaries_ok = tier(3, 2) == Tier::Hidden
        && tier(1, 3) == Tier::Green
        && tier(3, 1) == Tier::Green
        && tier(0, 1) == Tier::Strong;

    let dot = render_dot(&graph);
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/graph.dot");
    if std::env::var("BLESS").is_ok() {
        std::fs::create_dir_all(golden_path.parent().unwrap()).unwrap();
        std::fs::write(&golden_path, &dot).unwrap();
    }
    let golden = std::fs::read_to_string(&golden_path).expect("golden DOT file present");
    check(
        8,
        "graph tiers golden file",
        boundaries_ok && dot == golden,
        &format!("boundaries_ok = {boundaries_ok}, dot matches golden = {}", dot == golden),
    );
}

fn run_binary(dir: &Path, threads: &str, args: &[&str]) {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_crosstalk"))
        .env("RAYON_NUM_THREADS", threads)
        .args(["--seed", "77", "--output-dir"])
        .arg(dir)
        .args(args)
        .status()
        .unwrap();
    assert!(status.success(), "crosstalk {args:?} failed");
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn criterion_9_thread_count_determinism() {
    let base = std::env::temp_dir().join("crosstalk-acceptance-9");
    let _ = std::fs::remove_dir_all(&base);
    let d1 = base.join("t1");
    let d8 = base.join("t8");
    for (dir, threads) in [(&d1, "1"), (&d8, "8")] {
        run_binary(dir, threads, &["characterize"]);
        run_binary(dir, threads, &["verify", "--random", "8"]);
    }
    let (s1, s8) = (snapshot(&d1), snapshot(&d8));
    let names_match = s1.len() == s8.len();
    let identical = names_match && s1 == s8;
    check(
        9,
        "thread-count determinism",
        identical,
        &format!("{} vs {} files, byte-identical = {identical}", s1.len(), s8.len()),
    );
    let _ = std::fs::remove_dir_all(&base);
}

#[test]
fn criterion_10_weak_limit_bound() {
    let mut worst = 0.0f64;
    for ib in 0..=100 {
        let beta = 0.05 * ib as f64 / 100.0;
        for it in 0..8 {
            let theta = -PI + 2.0 * PI * it as f64 / 8.0;
            for ip in 0..4000 {
                let dphi = 2.0 * PI * ip as f64 / 4000.0;
                let err =
                    (eta_weak(beta, theta, dphi).unwrap() - eta_pair(beta, theta, dphi).unwrap()).abs();
                worst = worst.max(err);
            }
        }
    }
    check(10, "weak-limit bound", worst <= 1.3e-3, &format!("max |eta_weak - eta_pair| = {worst:.2e}"));
}
