//! Synthetic experiment generation: turns noiseless oracle curves into
//! realistic phase-sweep records with finite shots, readout corruption and
//! confusion-matrix readout mitigation.
//!
//! Randomness discipline: every (pair, phase point) gets its own counter-mode
//! substream derived from the master seed, so results are independent of
//! evaluation order and safe to parallelize.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::model::{ChipGroundTruth, PulseEnvelope, ReadoutErrorModel};
use crate::oracle::{rabi_curve, DriveTermInstance, OracleError, SimulationConfig};

/// Sweep protocol: number of uniformly spaced phase points on `[0, 2*pi)`,
/// shots per point, pulse area and duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSweepProtocol {
    pub phase_count: usize,
    pub shots: u64,
    /// Integrated pulse area `Omega_hat`, radians.
    pub rotation_angle: f64,
    /// Pulse duration, seconds.
    pub duration: f64,
}

impl Default for PhaseSweepProtocol {
    fn default() -> Self {
        PhaseSweepProtocol {
            phase_count: 33,
            shots: 1000,
            rotation_angle: crate::model::DEFAULT_ROTATION_ANGLE,
            duration: crate::model::DEFAULT_DURATION,
        }
    }
}

/// Uniform grid of `n` phases on `[0, 2*pi)` (endpoint excluded).
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 2.0 * core::f64::consts::PI * i as f64 / n as f64)
        .collect()
}

/// One recorded phase-sweep experiment: mitigated `<Z>` observations with
/// their standard deviations over a `delta_phi` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSweepDataset {
    pub primary_qubit: usize,
    pub secondary_qubits: Vec<usize>,
    pub rotation_angle: f64,
    pub phases: Vec<f64>,
    pub observed_z: Vec<f64>,
    pub sigma: Vec<f64>,
    pub shots: u64,
    /// Master seed the record was generated from (0 for ingested data).
    pub seed: u64,
    /// Indices of points where mitigation overshot `[-1, 1]` and was clipped.
    pub clipped_points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    QubitOutOfRange(usize),
    DisabledReadout(usize),
    DuplicateQubit(usize),
    EmptyProtocol,
    SingularReadoutModel,
    Oracle(OracleError),
}

impl From<OracleError> for ExperimentError {
    fn from(e: OracleError) -> Self {
        ExperimentError::Oracle(e)
    }
}

impl core::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExperimentError::QubitOutOfRange(q) => write!(f, "qubit {q} is out of range"),
            ExperimentError::DisabledReadout(q) => {
                write!(f, "qubit {q} has disabled readout and cannot be measured")
            }
            ExperimentError::DuplicateQubit(q) => write!(f, "qubit {q} appears more than once"),
            ExperimentError::EmptyProtocol => write!(f, "protocol needs at least one phase point"),
            ExperimentError::SingularReadoutModel => write!(f, "readout confusion matrix is singular"),
            ExperimentError::Oracle(e) => write!(f, "oracle failure: {e}"),
        }
    }
}

/// Mix a master seed with context tags into an independent substream seed
/// (splitmix64 finalizer chain).
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
    let mut s = splitmix(master);
    for &t in tags {
        s = splitmix(s ^ t.wrapping_mul(0xD1342543DE82EF95).wrapping_add(1));
    }
    s
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random mantissa bits
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draw `(n0, n1)` ground/excited counts for a true excited-state
/// probability `p` over `shots` shots.
pub fn sample_counts(p_excited: f64, shots: u64, rng: &mut ChaCha8Rng) -> (u64, u64) {
    let p = p_excited.clamp(0.0, 1.0);
    let mut n1 = 0u64;
    for _ in 0..shots {
        if uniform01(rng) < p {
            n1 += 1;
        }
    }
    (shots - n1, n1)
}

/// Corrupt ideal counts through the readout confusion model: each true-0
/// shot reads 1 with probability `1 - p0_given_0`, each true-1 shot reads 0
/// with probability `1 - p1_given_1`.
pub fn apply_readout_error(
    counts: (u64, u64),
    model: &ReadoutErrorModel,
    rng: &mut ChaCha8Rng,
) -> (u64, u64) {
    let (n0, n1) = counts;
    let mut m0 = 0u64;
    let mut m1 = 0u64;
    for _ in 0..n0 {
        if uniform01(rng) < model.p0_given_0 {
            m0 += 1;
        } else {
            m1 += 1;
        }
    }
    for _ in 0..n1 {
        if uniform01(rng) < model.p1_given_1 {
            m1 += 1;
        } else {
            m0 += 1;
        }
    }
    (m0, m1)
}

/// Result of confusion-matrix inversion; frequencies sum to 1 and are
/// clipped to `[0, 1]` with `clipped` raised on overshoot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MitigatedFrequencies {
    pub f0: f64,
    pub f1: f64,
    pub clipped: bool,
}

/// Invert the 2x2 readout confusion matrix on observed frequencies.
pub fn mitigate_readout(
    observed: (f64, f64),
    model: &ReadoutErrorModel,
) -> Result<MitigatedFrequencies, ExperimentError> {
    let det = model.determinant();
    if det <= 0.0 {
        return Err(ExperimentError::SingularReadoutModel);
    }
    let (f0, f1) = observed;
    let c0 = (model.p1_given_1 * f0 - (1.0 - model.p1_given_1) * f1) / det;
    let c1 = (model.p0_given_0 * f1 - (1.0 - model.p0_given_0) * f0) / det;
    if c0 < 0.0 {
        Ok(MitigatedFrequencies { f0: 0.0, f1: 1.0, clipped: true })
    } else if c1 < 0.0 {
        Ok(MitigatedFrequencies { f0: 1.0, f1: 0.0, clipped: true })
    } else {
        Ok(MitigatedFrequencies { f0: c0, f1: c1, clipped: false })
    }
}

/// Floor applied to per-point standard deviations so exactly saturated
/// points (p = 0 or 1) keep a usable weight.
pub const SIGMA_FLOOR: f64 = 1e-3;

/// Binomial standard deviation of the mitigated `<Z>` estimate: the raw
/// `2*sqrt(p(1-p)/shots)` amplified by the mitigation inverse `1/det`,
/// floored at [`SIGMA_FLOOR`].
pub fn sigma_from_counts(corrected_z: f64, shots: u64, model: &ReadoutErrorModel) -> f64 {
    let p = ((1.0 - corrected_z) / 2.0).clamp(0.0, 1.0);
    let raw = 2.0 * libm::sqrt(p * (1.0 - p) / shots as f64);
    let amplified = raw / model.determinant();
    if amplified > SIGMA_FLOOR {
        amplified
    } else {
        SIGMA_FLOOR
    }
}

fn check_primary(chip: &ChipGroundTruth, a: usize) -> Result<(), ExperimentError> {
    if a >= chip.qubit_count() {
        return Err(ExperimentError::QubitOutOfRange(a));
    }
    if !chip.topology.readout_enabled(a) {
        return Err(ExperimentError::DisabledReadout(a));
    }
    Ok(())
}

/// Build the drive list seen by target qubit `a` when drives `a` and each of
/// `secondaries` are pulsed simultaneously, all secondaries at qubit `a`'s
/// frequency. `drives[0]` is the primary.
pub fn drive_terms(
    chip: &ChipGroundTruth,
    a: usize,
    secondaries: &[usize],
    protocol: &PhaseSweepProtocol,
) -> Vec<DriveTermInstance> {
    let envelope = PulseEnvelope::cosine(protocol.duration, protocol.rotation_angle);
    let carrier = chip.drives[a].carrier_frequency;
    let mut drives = Vec::with_capacity(1 + secondaries.len());
    drives.push(DriveTermInstance {
        beta: chip.crosstalk.beta[a][a],
        theta: chip.crosstalk.theta[a][a],
        phi: chip.drives[a].software_phase,
        carrier,
        envelope,
        delay: 0.0,
    });
    for &k in secondaries {
        drives.push(DriveTermInstance {
            beta: chip.crosstalk.beta[a][k],
            theta: chip.crosstalk.theta[a][k],
            phi: chip.drives[k].software_phase,
            carrier,
            envelope,
            delay: chip.crosstalk.tau[a][k],
        });
    }
    drives
}

fn run_sweep(
    chip: &ChipGroundTruth,
    a: usize,
    secondaries: &[usize],
    protocol: &PhaseSweepProtocol,
    sim: &SimulationConfig,
    master_seed: u64,
) -> Result<PhaseSweepDataset, ExperimentError> {
    check_primary(chip, a)?;
    let n = chip.qubit_count();
    let mut seen = alloc::vec![false; n];
    seen[a] = true;
    for &k in secondaries {
        if k >= n {
            return Err(ExperimentError::QubitOutOfRange(k));
        }
        if seen[k] {
            return Err(ExperimentError::DuplicateQubit(k));
        }
        seen[k] = true;
    }
    if protocol.phase_count == 0 {
        return Err(ExperimentError::EmptyProtocol);
    }

    let phases = phase_grid(protocol.phase_count);
    let drives = drive_terms(chip, a, secondaries, protocol);
    let truth = rabi_curve(&chip.transmons[a], &drives, sim, &phases)?;
    let readout = &chip.readout[a];

    let mut observed_z = Vec::with_capacity(phases.len());
    let mut sigma = Vec::with_capacity(phases.len());
    let mut clipped_points = Vec::new();

    // tag layout: [salt, primary, packed secondaries, phase index]
    let sec_tag = secondaries
        .iter()
        .fold(0u64, |acc, &k| acc.wrapping_mul(0x100).wrapping_add(k as u64 + 1));

    for (i, &z_true) in truth.iter().enumerate() {
        let p_exc = ((1.0 - z_true) / 2.0).clamp(0.0, 1.0);
        let seed = derive_seed(master_seed, &[0x5EED_u64, a as u64, sec_tag, i as u64]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ideal = sample_counts(p_exc, protocol.shots, &mut rng);
        let (m0, m1) = apply_readout_error(ideal, readout, &mut rng);
        let shots_f = protocol.shots as f64;
        let mitigated = mitigate_readout((m0 as f64 / shots_f, m1 as f64 / shots_f), readout)?;
        if mitigated.clipped {
            clipped_points.push(i);
        }
        let z = mitigated.f0 - mitigated.f1;
        observed_z.push(z);
        sigma.push(sigma_from_counts(z, protocol.shots, readout));
    }

    Ok(PhaseSweepDataset {
        primary_qubit: a,
        secondary_qubits: secondaries.to_vec(),
        rotation_angle: protocol.rotation_angle,
        phases,
        observed_z,
        sigma,
        shots: protocol.shots,
        seed: master_seed,
        clipped_points,
    })
}

/// Run the two-qubit simultaneous-Rabi sweep for directed pair `(a, b)`:
/// qubit `a` is measured while drive `b` is the crosstalk source.
pub fn run_pair_experiment(
    chip: &ChipGroundTruth,
    a: usize,
    b: usize,
    protocol: &PhaseSweepProtocol,
    sim: &SimulationConfig,
    master_seed: u64,
) -> Result<PhaseSweepDataset, ExperimentError> {
    run_sweep(chip, a, &[b], protocol, sim, master_seed)
}

/// Run the multi-drive sweep: primary `a` plus 2-3 simultaneously driven
/// secondaries, all sharing the common swept phase.
pub fn run_multiplet_experiment(
    chip: &ChipGroundTruth,
    a: usize,
    secondaries: &[usize],
    protocol: &PhaseSweepProtocol,
    sim: &SimulationConfig,
    master_seed: u64,
) -> Result<PhaseSweepDataset, ExperimentError> {
    run_sweep(chip, a, secondaries, protocol, sim, master_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn counts_at_probability_extremes() {
        assert_eq!(sample_counts(0.0, 1000, &mut rng(1)), (1000, 0));
        assert_eq!(sample_counts(1.0, 5, &mut rng(2)), (0, 5));
    }

    #[test]
    fn counts_concentrate_at_half() {
        // law of large numbers: mean over 1e4 repetitions of p_hat at p=0.5
        let mut r = rng(42);
        let mut total = 0u64;
        let reps = 10_000;
        for _ in 0..reps {
            total += sample_counts(0.5, 1000, &mut r).1;
        }
        let mean = total as f64 / (reps as f64 * 1000.0);
        assert!((mean - 0.5).abs() < 0.005, "mean = {mean}");
    }

    #[test]
    fn identity_readout_is_transparent() {
        let model = ReadoutErrorModel::identity();
        assert_eq!(apply_readout_error((123, 877), &model, &mut rng(3)), (123, 877));
        let m = mitigate_readout((0.3, 0.7), &model).unwrap();
        assert_eq!((m.f0, m.f1, m.clipped), (0.3, 0.7, false));
    }

    #[test]
    fn readout_corruption_rates() {
        let model = ReadoutErrorModel { p0_given_0: 0.9, p1_given_1: 0.8 };
        let shots = 100_000;
        let (_, m1) = apply_readout_error((0, shots), &model, &mut rng(7));
        let f1 = m1 as f64 / shots as f64;
        assert!((f1 - 0.8).abs() < 0.004, "f1 = {f1}");
        let (m0, _) = apply_readout_error((shots, 0), &model, &mut rng(8));
        let f0 = m0 as f64 / shots as f64;
        assert!((f0 - 0.9).abs() < 0.004, "f0 = {f0}");
    }

    #[test]
    fn mitigation_inverts_exactly() {
        let model = ReadoutErrorModel { p0_given_0: 0.9, p1_given_1: 0.8 };
        // forward: true (1, 0) observes (0.9, 0.1); inverse must return it
        let m = mitigate_readout((0.9, 0.1), &model).unwrap();
        assert!((m.f0 - 1.0).abs() < 1e-12 && m.f1.abs() < 1e-12 && !m.clipped);
        // observing (1, 0) is beyond the model's reach: raw inverse gives
        // f0' = 0.8/0.7 > 1, clipped with the flag raised
        let m = mitigate_readout((1.0, 0.0), &model).unwrap();
        assert_eq!((m.f0, m.f1), (1.0, 0.0));
        assert!(m.clipped);
    }

    #[test]
    fn mitigation_preserves_unit_sum() {
        let model = ReadoutErrorModel { p0_given_0: 0.93, p1_given_1: 0.87 };
        for i in 0..=20 {
            let f0 = i as f64 / 20.0;
            let m = mitigate_readout((f0, 1.0 - f0), &model).unwrap();
            assert!((m.f0 + m.f1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_values() {
        let id = ReadoutErrorModel::identity();
        let s = sigma_from_counts(0.0, 1000, &id); // p = 0.5
        assert!((s - 0.03162).abs() < 1e-4, "s = {s}");
        assert_eq!(sigma_from_counts(1.0, 1000, &id), SIGMA_FLOOR);
        assert_eq!(sigma_from_counts(-1.0, 1000, &id), SIGMA_FLOOR);
        let m = ReadoutErrorModel { p0_given_0: 0.9, p1_given_1: 0.9 };
        let s = sigma_from_counts(0.0, 1000, &m);
        assert!((s - 0.03162 / 0.8).abs() < 2e-4, "s = {s}");
    }

    #[test]
    fn corrupt_then_mitigate_recovers_probability() {
        let model = ReadoutErrorModel { p0_given_0: 0.9, p1_given_1: 0.8 };
        let shots = 100_000u64;
        for (case, &p) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
            let mut r = rng(1000 + case as u64);
            let ideal = sample_counts(p, shots, &mut r);
            let (m0, m1) = apply_readout_error(ideal, &model, &mut r);
            let mit =
                mitigate_readout((m0 as f64 / shots as f64, m1 as f64 / shots as f64), &model).unwrap();
            // binomial stderr of the mitigated estimator
            let se = (libm::sqrt(p.max(0.01) * (1.0 - p).max(0.01) / shots as f64)
                / model.determinant())
            .max(1e-4);
            assert!(
                (mit.f1 - p).abs() < 5.0 * se,
                "p = {p}: recovered {} (se {se})",
                mit.f1
            );
        }
    }

    #[test]
    fn derive_seed_separates_streams() {
        let a = derive_seed(1, &[1, 2, 3]);
        let b = derive_seed(1, &[1, 2, 4]);
        let c = derive_seed(2, &[1, 2, 3]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[1, 2, 3]));
    }

    #[test]
    fn phase_grid_is_half_open() {
        let g = phase_grid(33);
        assert_eq!(g.len(), 33);
        assert_eq!(g[0], 0.0);
        assert!(*g.last().unwrap() < 2.0 * core::f64::consts::PI);
    }

    mod pipeline {
        use super::*;
        use crate::model::ChipGroundTruth;
        use crate::oracle::SimulationConfig;
        use core::f64::consts::PI;

        fn test_chip(n: usize) -> ChipGroundTruth {
            let cfg = crate::chipgen::ChipGenConfig {
                qubit_count: n,
                beta_range: (0.0, 0.0),
                ..Default::default()
            };
            crate::chipgen::generate_chip(&cfg, 0)
        }

        #[test]
        fn zero_crosstalk_data_is_flat_near_zero() {
            let chip = test_chip(3);
            let ds = run_pair_experiment(
                &chip,
                0,
                1,
                &PhaseSweepProtocol::default(),
                &SimulationConfig::rwa_two_level(),
                11,
            )
            .unwrap();
            // cos(2.5*pi) = 0; every point within 4 sigma of 0
            for (z, s) in ds.observed_z.iter().zip(&ds.sigma) {
                assert!(z.abs() < 4.0 * s, "z = {z}, sigma = {s}");
            }
        }

        #[test]
        fn crosstalk_amplitude_matches_analytic() {
            let mut chip = test_chip(3);
            chip.crosstalk.beta[0][1] = 0.15;
            chip.crosstalk.theta[0][1] = 0.8;
            let ds = run_pair_experiment(
                &chip,
                0,
                1,
                &PhaseSweepProtocol::default(),
                &SimulationConfig::rwa_two_level(),
                13,
            )
            .unwrap();
            let spec = crate::analytic::PairwiseDriveSpec {
                beta: 0.15,
                theta: 0.8,
                phi_a: 0.0,
                phi_b: 0.0,
                rotation_angle: 2.5 * PI,
            };
            let predicted: Vec<f64> = ds
                .phases
                .iter()
                .map(|&d| crate::analytic::pair_expectations(&spec, d).unwrap().2)
                .collect();
            let pp_pred = predicted.iter().cloned().fold(f64::MIN, f64::max)
                - predicted.iter().cloned().fold(f64::MAX, f64::min);
            let pp_obs = ds.observed_z.iter().cloned().fold(f64::MIN, f64::max)
                - ds.observed_z.iter().cloned().fold(f64::MAX, f64::min);
            assert!((pp_obs - pp_pred).abs() < 0.2, "obs {pp_obs} vs pred {pp_pred}");
        }

        #[test]
        fn datasets_are_deterministic() {
            let chip = test_chip(3);
            let run = || {
                run_pair_experiment(
                    &chip,
                    1,
                    2,
                    &PhaseSweepProtocol::default(),
                    &SimulationConfig::rwa_two_level(),
                    99,
                )
                .unwrap()
            };
            assert_eq!(run(), run());
        }

        #[test]
        fn single_secondary_multiplet_equals_pair() {
            let chip = test_chip(3);
            let protocol = PhaseSweepProtocol::default();
            let sim = SimulationConfig::rwa_two_level();
            let pair = run_pair_experiment(&chip, 0, 2, &protocol, &sim, 5).unwrap();
            let multi = run_multiplet_experiment(&chip, 0, &[2], &protocol, &sim, 5).unwrap();
            assert_eq!(pair, multi);
        }

        #[test]
        fn disabled_readout_rejected() {
            let mut chip = test_chip(3);
            chip.topology.disabled_readout_qubits.push(1);
            let err = run_pair_experiment(
                &chip,
                1,
                0,
                &PhaseSweepProtocol::default(),
                &SimulationConfig::rwa_two_level(),
                1,
            )
            .unwrap_err();
            assert_eq!(err, ExperimentError::DisabledReadout(1));
        }

        #[test]
        fn opposite_phase_secondaries_cancel() {
            let mut chip = test_chip(4);
            chip.crosstalk.beta[0][1] = 0.1;
            chip.crosstalk.theta[0][1] = 0.0;
            chip.crosstalk.beta[0][2] = 0.1;
            chip.crosstalk.theta[0][2] = -PI; // canonical form of pi
            let ds = run_multiplet_experiment(
                &chip,
                0,
                &[1, 2],
                &PhaseSweepProtocol::default(),
                &SimulationConfig::rwa_two_level(),
                21,
            )
            .unwrap();
            // eta == 1 for every dphi, so the curve is flat at cos(2.5*pi)=0
            for (z, s) in ds.observed_z.iter().zip(&ds.sigma) {
                assert!(z.abs() < 4.0 * s, "z = {z}");
            }
        }

        #[test]
        fn quadrupling_shots_halves_sigma() {
            let chip = test_chip(3);
            let sim = SimulationConfig::rwa_two_level();
            let mut p = PhaseSweepProtocol::default();
            let d1 = run_pair_experiment(&chip, 0, 1, &p, &sim, 3).unwrap();
            p.shots = 4000;
            let d4 = run_pair_experiment(&chip, 0, 1, &p, &sim, 3).unwrap();
            let median = |mut v: Vec<f64>| {
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v[v.len() / 2]
            };
            let ratio = median(d1.sigma) / median(d4.sigma);
            assert!((ratio - 2.0).abs() < 0.2, "ratio = {ratio}");
        }
    }
}
