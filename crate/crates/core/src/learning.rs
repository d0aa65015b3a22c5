//! Fits directional crosstalk parameters `(beta, theta)` to phase-sweep
//! data by chi-squared minimization, and aggregates whole-chip statistics.
//!
//! The chi-squared landscape at large rotation angles is multi-modal (the
//! cosine wraps), so the fit runs a coarse grid scan over the full parameter
//! box followed by a derivative-free pattern search refinement.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::analytic::eta_pair;
use crate::experiment::{derive_seed, run_pair_experiment, ExperimentError, PhaseSweepDataset, PhaseSweepProtocol};
use crate::model::{wrap_phase, ChipGroundTruth};
use crate::oracle::SimulationConfig;

/// Upper bound of the beta search box, far above physically observed values.
pub const BETA_SEARCH_MAX: f64 = 0.5;
/// Coarse grid spacing in beta.
pub const BETA_GRID_STEP: f64 = 0.01;
/// Number of coarse grid points in theta over `[-pi, pi)`.
pub const THETA_GRID_POINTS: usize = 64;
/// Below this fitted beta the phase theta shifts the curve by less than
/// typical shot noise and is reported as unidentifiable.
pub const BETA_FLOOR: f64 = 0.005;
/// Refinement terminates once both search steps drop below this.
pub const PARAM_TOLERANCE: f64 = 1e-5;

/// Diagnostic flags attached to a pair fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitFlags {
    /// Fitted beta below [`BETA_FLOOR`]; theta carries no information.
    pub theta_unidentifiable: bool,
    /// Fitted beta ended up against the search boundary.
    pub boundary_hit: bool,
    /// Refinement did not converge; the reported optimum is the best point
    /// seen.
    pub poor_fit: bool,
}

/// Fitted crosstalk parameters for one directed qubit pair `(a, b)`:
/// qubit `a` measured, drive `b` the crosstalk source.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFitResult {
    pub pair: (usize, usize),
    pub beta_hat: f64,
    /// Canonicalized to `[-pi, pi)`.
    pub theta_hat: f64,
    pub chi2_per_dof: f64,
    pub beta_stderr: f64,
    pub theta_stderr: f64,
    pub flags: FitFlags,
}

/// All pair fits for a chip plus aggregate statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipFitReport {
    /// One entry per directed pair with readout-enabled primary, sorted by
    /// `(a, b)`.
    pub results: Vec<PairFitResult>,
    pub median_chi2: f64,
    /// Pearson correlation between fitted beta and theta across pairs.
    pub beta_theta_correlation: f64,
}

impl ChipFitReport {
    pub fn find(&self, a: usize, b: usize) -> Option<&PairFitResult> {
        self.results.iter().find(|r| r.pair == (a, b))
    }

    /// Fitted beta matrix in the chip schema: diagonal 1, unfitted entries
    /// (disabled-readout primaries) 0.
    pub fn beta_matrix(&self, n: usize) -> Vec<Vec<f64>> {
        let mut m = alloc::vec![alloc::vec![0.0; n]; n];
        for (j, row) in m.iter_mut().enumerate() {
            row[j] = 1.0;
        }
        for r in &self.results {
            m[r.pair.0][r.pair.1] = r.beta_hat;
        }
        m
    }

    /// Fitted theta matrix in the chip schema; unfitted entries 0.
    pub fn theta_matrix(&self, n: usize) -> Vec<Vec<f64>> {
        let mut m = alloc::vec![alloc::vec![0.0; n]; n];
        for r in &self.results {
            m[r.pair.0][r.pair.1] = r.theta_hat;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// `chi_squared_per_dof` needs more points than parameters.
    TooFewPoints { points: usize, params: usize },
    NonPositiveSigma,
    LengthMismatch,
    /// `fit_pair` expects exactly one secondary qubit.
    NotAPairDataset,
    Experiment(ExperimentError),
}

impl From<ExperimentError> for FitError {
    fn from(e: ExperimentError) -> Self {
        FitError::Experiment(e)
    }
}

impl core::fmt::Display for FitError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FitError::TooFewPoints { points, params } => {
                write!(f, "need more than {params} points, got {points}")
            }
            FitError::NonPositiveSigma => write!(f, "all sigma values must be positive"),
            FitError::LengthMismatch => write!(f, "observed/model/sigma lengths differ"),
            FitError::NotAPairDataset => {
                write!(f, "pair fitting requires exactly one secondary qubit")
            }
            FitError::Experiment(e) => write!(f, "experiment failure: {e}"),
        }
    }
}

/// Chi-squared per degree of freedom:
/// `sum((O_i - M_i)^2 / sigma_i^2) / (N - p)`.
pub fn chi_squared_per_dof(
    observed: &[f64],
    model: &[f64],
    sigma: &[f64],
    n_params: usize,
) -> Result<f64, FitError> {
    if observed.len() != model.len() || observed.len() != sigma.len() {
        return Err(FitError::LengthMismatch);
    }
    if observed.len() <= n_params {
        return Err(FitError::TooFewPoints { points: observed.len(), params: n_params });
    }
    if sigma.iter().any(|&s| !(s > 0.0)) {
        return Err(FitError::NonPositiveSigma);
    }
    let total: f64 = observed
        .iter()
        .zip(model)
        .zip(sigma)
        .map(|((o, m), s)| {
            let r = (o - m) / s;
            r * r
        })
        .sum();
    Ok(total / (observed.len() - n_params) as f64)
}

/// Model Z expectation for the pair sweep at one phase point.
fn model_z(beta: f64, theta: f64, rotation_angle: f64, delta_phi: f64) -> f64 {
    let eta = eta_pair(beta, theta, delta_phi).unwrap_or(1.0);
    libm::cos(rotation_angle * eta)
}

fn total_chi2(ds: &PhaseSweepDataset, beta: f64, theta: f64) -> f64 {
    ds.phases
        .iter()
        .zip(&ds.observed_z)
        .zip(&ds.sigma)
        .map(|((&d, &o), &s)| {
            let r = (o - model_z(beta, theta, ds.rotation_angle, d)) / s;
            r * r
        })
        .sum()
}

/// Fit options; bootstrap uncertainties are available as an alternative to
/// the default quadratic-expansion errors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    /// When `Some(n)`, run `n` parametric bootstrap replicates and report
    /// their spread as the parameter uncertainties.
    pub bootstrap_replicates: Option<usize>,
    /// Seed for the bootstrap resampling stream.
    pub bootstrap_seed: u64,
}

struct SearchOutcome {
    beta: f64,
    theta: f64,
    chi2: f64,
    converged: bool,
}

/// Coarse grid scan over the full parameter box.
fn grid_scan(ds: &PhaseSweepDataset) -> (f64, f64, f64) {
    let mut best = (0.0, -core::f64::consts::PI, f64::INFINITY);
    let beta_points = (BETA_SEARCH_MAX / BETA_GRID_STEP) as usize;
    for ib in 0..=beta_points {
        let beta = ib as f64 * BETA_GRID_STEP;
        for it in 0..THETA_GRID_POINTS {
            let theta = -core::f64::consts::PI
                + 2.0 * core::f64::consts::PI * it as f64 / THETA_GRID_POINTS as f64;
            let c = total_chi2(ds, beta, theta);
            if c < best.2 {
                best = (beta, theta, c);
            }
        }
    }
    best
}

/// Derivative-free compass search from the grid optimum down to
/// [`PARAM_TOLERANCE`]. Only accepts strict improvements, so the refined
/// optimum can never be worse than any coarse grid point.
fn refine(ds: &PhaseSweepDataset, start: (f64, f64, f64)) -> SearchOutcome {
    let (mut beta, mut theta, mut chi2) = start;
    let mut step_b = BETA_GRID_STEP;
    let mut step_t = 2.0 * core::f64::consts::PI / THETA_GRID_POINTS as f64;
    let mut iterations = 0usize;
    const MAX_ITERATIONS: usize = 20_000;

    while step_b > PARAM_TOLERANCE || step_t > PARAM_TOLERANCE {
        if iterations > MAX_ITERATIONS {
            return SearchOutcome { beta, theta, chi2, converged: false };
        }
        let candidates = [
            ((beta + step_b).min(BETA_SEARCH_MAX), theta),
            ((beta - step_b).max(0.0), theta),
            (beta, wrap_phase(theta + step_t)),
            (beta, wrap_phase(theta - step_t)),
        ];
        let mut improved = false;
        for &(b, t) in &candidates {
            let c = total_chi2(ds, b, t);
            if c < chi2 {
                beta = b;
                theta = t;
                chi2 = c;
                improved = true;
            }
        }
        if !improved {
            step_b *= 0.5;
            step_t *= 0.5;
        }
        iterations += 1;
    }
    SearchOutcome { beta, theta, chi2, converged: true }
}

/// 1-sigma uncertainties from the local quadratic expansion of the total
/// chi-squared (the `delta chi2 = 1` contour), via a finite-difference
/// Hessian. Falls back to the diagonal when the Hessian is not positive
/// definite; capped at `1.0` for beta and `pi` for theta.
fn quadratic_errors(ds: &PhaseSweepDataset, beta: f64, theta: f64) -> (f64, f64) {
    let hb = 1e-4;
    let ht = 1e-4;
    let f = |b: f64, t: f64| total_chi2(ds, b.max(0.0), t);
    let f0 = f(beta, theta);
    let hbb = (f(beta + hb, theta) - 2.0 * f0 + f(beta - hb, theta)) / (hb * hb);
    let htt = (f(beta, theta + ht) - 2.0 * f0 + f(beta, theta - ht)) / (ht * ht);
    let hbt = (f(beta + hb, theta + ht) - f(beta + hb, theta - ht) - f(beta - hb, theta + ht)
        + f(beta - hb, theta - ht))
        / (4.0 * hb * ht);

    let det = hbb * htt - hbt * hbt;
    let (var_b, var_t) = if det > 0.0 && hbb > 0.0 {
        // cov = 2 * H^-1
        (2.0 * htt / det, 2.0 * hbb / det)
    } else {
        (
            if hbb > 0.0 { 2.0 / hbb } else { f64::INFINITY },
            if htt > 0.0 { 2.0 / htt } else { f64::INFINITY },
        )
    };
    (
        libm::sqrt(var_b.max(0.0)).min(1.0),
        libm::sqrt(var_t.max(0.0)).min(core::f64::consts::PI),
    )
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

fn bootstrap_errors(
    ds: &PhaseSweepDataset,
    beta: f64,
    theta: f64,
    replicates: usize,
    seed: u64,
) -> (f64, f64) {
    let model: Vec<f64> = ds
        .phases
        .iter()
        .map(|&d| model_z(beta, theta, ds.rotation_angle, d))
        .collect();
    let mut betas = Vec::with_capacity(replicates);
    let mut dthetas = Vec::with_capacity(replicates);
    let mut resampled = ds.clone();
    for r in 0..replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0xB007u64, r as u64]));
        for (i, z) in resampled.observed_z.iter_mut().enumerate() {
            *z = model[i] + ds.sigma[i] * gaussian(&mut rng);
        }
        let out = refine(&resampled, (beta, theta, total_chi2(&resampled, beta, theta)));
        betas.push(out.beta);
        dthetas.push(wrap_phase(out.theta - theta));
    }
    let sd = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len() - 1) as f64;
        libm::sqrt(var)
    };
    (sd(&betas), sd(&dthetas).min(core::f64::consts::PI))
}

/// Fit `(beta, theta)` to a single-secondary phase-sweep dataset.
pub fn fit_pair(ds: &PhaseSweepDataset, options: &FitOptions) -> Result<PairFitResult, FitError> {
    if ds.secondary_qubits.len() != 1 {
        return Err(FitError::NotAPairDataset);
    }
    if ds.phases.len() < 8 {
        return Err(FitError::TooFewPoints { points: ds.phases.len(), params: 2 });
    }
    if ds.sigma.iter().any(|&s| !(s > 0.0)) {
        return Err(FitError::NonPositiveSigma);
    }

    let start = grid_scan(ds);
    let out = refine(ds, start);
    let beta_hat = out.beta;
    let theta_hat = wrap_phase(out.theta);

    let (beta_stderr, theta_stderr) = match options.bootstrap_replicates {
        Some(n) if n >= 2 => bootstrap_errors(ds, beta_hat, theta_hat, n, options.bootstrap_seed),
        _ => quadratic_errors(ds, beta_hat, theta_hat),
    };

    let dof = ds.phases.len() - 2;
    let chi2_per_dof = out.chi2 / dof as f64;

    let flags = FitFlags {
        theta_unidentifiable: beta_hat < BETA_FLOOR,
        boundary_hit: beta_hat >= BETA_SEARCH_MAX - BETA_GRID_STEP,
        poor_fit: !out.converged,
    };

    Ok(PairFitResult {
        pair: (ds.primary_qubit, *ds.secondary_qubits.first().unwrap()),
        beta_hat,
        theta_hat,
        chi2_per_dof,
        beta_stderr,
        theta_stderr,
        flags,
    })
}

/// Median of a sample (midpoint convention for even lengths).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Pearson correlation coefficient; 0 when either sample is degenerate.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    if x.len() != y.len() || x.len() < 2 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    sxy / libm::sqrt(sxx * syy)
}

/// Assemble a chip report from already-fitted pairs: sorts by pair index and
/// computes the aggregate statistics.
pub fn build_report(mut results: Vec<PairFitResult>) -> ChipFitReport {
    results.sort_by_key(|r| r.pair);
    let chi2s: Vec<f64> = results.iter().map(|r| r.chi2_per_dof).collect();
    let betas: Vec<f64> = results.iter().map(|r| r.beta_hat).collect();
    let thetas: Vec<f64> = results.iter().map(|r| r.theta_hat).collect();
    ChipFitReport {
        median_chi2: median(&chi2s),
        beta_theta_correlation: pearson(&betas, &thetas),
        results,
    }
}

/// Run the full pairwise characterization protocol on a chip: one simulated
/// phase-sweep experiment and fit per directed pair whose primary has
/// working readout. Disabled-readout qubits still act as crosstalk sources.
pub fn characterize_chip(
    chip: &ChipGroundTruth,
    protocol: &PhaseSweepProtocol,
    sim: &SimulationConfig,
    master_seed: u64,
    options: &FitOptions,
) -> Result<ChipFitReport, FitError> {
    let n = chip.qubit_count();
    let mut results = Vec::new();
    for a in 0..n {
        if !chip.topology.readout_enabled(a) {
            continue;
        }
        for b in 0..n {
            if b == a {
                continue;
            }
            let ds = run_pair_experiment(chip, a, b, protocol, sim, master_seed)?;
            results.push(fit_pair(&ds, options)?);
        }
    }
    Ok(build_report(results))
}

/// Fit a report from an existing dataset collection (the refit path for
/// recorded data). Non-pair datasets are rejected.
pub fn characterize_from_datasets(
    datasets: &[PhaseSweepDataset],
    options: &FitOptions,
) -> Result<ChipFitReport, FitError> {
    let mut results = Vec::with_capacity(datasets.len());
    for ds in datasets {
        results.push(fit_pair(ds, options)?);
    }
    Ok(build_report(results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{phase_grid, PhaseSweepDataset};
    use alloc::vec;
    use alloc::vec::Vec;
    use core::f64::consts::PI;

    #[test]
    fn chi2_arithmetic() {
        let o = [1.0, 2.0, 3.0];
        let m = [1.0, 2.0, 3.0];
        let s = [0.1, 0.1, 0.1];
        assert_eq!(chi_squared_per_dof(&o, &m, &s, 1).unwrap(), 0.0);

        let o = [1.0, 1.0, 1.0];
        let m = [0.0, 0.0, 0.0];
        let s = [1.0, 1.0, 1.0];
        assert_eq!(chi_squared_per_dof(&o, &m, &s, 1).unwrap(), 1.5);

        assert!(matches!(
            chi_squared_per_dof(&o, &m, &s, 3),
            Err(FitError::TooFewPoints { .. })
        ));
        assert!(matches!(
            chi_squared_per_dof(&o, &m, &[1.0, 0.0, 1.0], 1),
            Err(FitError::NonPositiveSigma)
        ));
    }

    fn synthetic_dataset(beta: f64, theta: f64, sigma: f64) -> PhaseSweepDataset {
        let phases = phase_grid(33);
        let observed: Vec<f64> = phases
            .iter()
            .map(|&d| model_z(beta, theta, 2.5 * PI, d))
            .collect();
        PhaseSweepDataset {
            primary_qubit: 0,
            secondary_qubits: vec![1],
            rotation_angle: 2.5 * PI,
            sigma: vec![sigma; phases.len()],
            observed_z: observed,
            phases,
            shots: 1000,
            seed: 0,
            clipped_points: vec![],
        }
    }

    #[test]
    fn noiseless_fit_recovers_exactly() {
        let ds = synthetic_dataset(0.12, -0.7, 0.03);
        let fit = fit_pair(&ds, &FitOptions::default()).unwrap();
        assert!((fit.beta_hat - 0.12).abs() < 1e-4, "beta = {}", fit.beta_hat);
        assert!((fit.theta_hat + 0.7).abs() < 1e-3, "theta = {}", fit.theta_hat);
        assert!(fit.chi2_per_dof < 1e-8);
        assert!(!fit.flags.theta_unidentifiable && !fit.flags.boundary_hit && !fit.flags.poor_fit);
    }

    #[test]
    fn flat_dataset_gives_zero_beta_with_flag() {
        let ds = synthetic_dataset(0.0, 0.0, 1e-6);
        let fit = fit_pair(&ds, &FitOptions::default()).unwrap();
        assert_eq!(fit.beta_hat, 0.0);
        assert!(fit.flags.theta_unidentifiable);
    }

    #[test]
    fn refined_optimum_beats_every_grid_point() {
        let ds = synthetic_dataset(0.137, 1.9, 0.03);
        let fit = fit_pair(&ds, &FitOptions::default()).unwrap();
        let at_fit = total_chi2(&ds, fit.beta_hat, fit.theta_hat);
        for ib in 0..=50 {
            let beta = ib as f64 * BETA_GRID_STEP;
            for it in 0..THETA_GRID_POINTS {
                let theta = -PI + 2.0 * PI * it as f64 / THETA_GRID_POINTS as f64;
                assert!(at_fit <= total_chi2(&ds, beta, theta) + 1e-12);
            }
        }
    }

    #[test]
    fn phase_wrap_yields_same_theta() {
        let a = synthetic_dataset(0.1, 1.0, 0.02);
        let b = synthetic_dataset(0.1, 1.0 + 2.0 * PI, 0.02);
        let fa = fit_pair(&a, &FitOptions::default()).unwrap();
        let fb = fit_pair(&b, &FitOptions::default()).unwrap();
        assert!((fa.theta_hat - fb.theta_hat).abs() < 1e-6);
    }

    #[test]
    fn pair_dataset_required() {
        let mut ds = synthetic_dataset(0.1, 0.0, 0.03);
        ds.secondary_qubits = vec![1, 2];
        assert!(matches!(
            fit_pair(&ds, &FitOptions::default()),
            Err(FitError::NotAPairDataset)
        ));
        let mut ds = synthetic_dataset(0.1, 0.0, 0.03);
        ds.phases.truncate(5);
        ds.observed_z.truncate(5);
        ds.sigma.truncate(5);
        assert!(matches!(
            fit_pair(&ds, &FitOptions::default()),
            Err(FitError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn bootstrap_errors_are_finite_and_comparable() {
        let ds = synthetic_dataset(0.1, 0.5, 0.03);
        let quad = fit_pair(&ds, &FitOptions::default()).unwrap();
        let boot = fit_pair(
            &ds,
            &FitOptions { bootstrap_replicates: Some(30), bootstrap_seed: 7 },
        )
        .unwrap();
        assert!(boot.beta_stderr > 0.0 && boot.beta_stderr < 0.05);
        // same order of magnitude as the quadratic expansion
        let ratio = boot.beta_stderr / quad.beta_stderr;
        assert!(ratio > 0.2 && ratio < 5.0, "ratio = {ratio}");
    }

    #[test]
    fn median_and_pearson_basics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]), 2.5);
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        assert!((pearson(&x, &y) - 1.0).abs() < 1e-12);
        let y = [8.0, 6.0, 4.0, 2.0];
        assert!((pearson(&x, &y) + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&x, &[1.0, 1.0, 1.0, 1.0]), 0.0);
    }

    mod chip {
        use super::*;
        use crate::experiment::PhaseSweepProtocol;
        use crate::oracle::SimulationConfig;
        fn random_chip(n: usize, seed: u64, beta_lo: f64, beta_hi: f64) -> ChipGroundTruth {
            let cfg = crate::chipgen::ChipGenConfig {
                qubit_count: n,
                beta_range: (beta_lo, beta_hi),
                ..Default::default()
            };
            crate::chipgen::generate_chip(&cfg, seed)
        }

        #[test]
        fn eight_qubit_chip_with_disabled_readout_yields_49_fits() {
            let mut chip = random_chip(8, 3, 0.02, 0.15);
            chip.topology.disabled_readout_qubits.push(5);
            let report = characterize_chip(
                &chip,
                &PhaseSweepProtocol::default(),
                &SimulationConfig::rwa_two_level(),
                17,
                &FitOptions::default(),
            )
            .unwrap();
            assert_eq!(report.results.len(), 49);
            // disabled qubit appears only as a source
            assert!(report.results.iter().all(|r| r.pair.0 != 5));
            assert!(report.results.iter().any(|r| r.pair.1 == 5));
            // sorted by pair
            let pairs: Vec<_> = report.results.iter().map(|r| r.pair).collect();
            let mut sorted = pairs.clone();
            sorted.sort_unstable();
            assert_eq!(pairs, sorted);
        }

        #[test]
        fn characterization_is_deterministic() {
            let chip = random_chip(3, 5, 0.05, 0.15);
            let run = || {
                characterize_chip(
                    &chip,
                    &PhaseSweepProtocol::default(),
                    &SimulationConfig::rwa_two_level(),
                    23,
                    &FitOptions::default(),
                )
                .unwrap()
            };
            assert_eq!(run(), run());
        }

        #[test]
        fn round_trip_recovery_single_seed() {
            let chip = random_chip(4, 9, 0.06, 0.15);
            let report = characterize_chip(
                &chip,
                &PhaseSweepProtocol::default(),
                &SimulationConfig::rwa_two_level(),
                31,
                &FitOptions::default(),
            )
            .unwrap();
            for r in &report.results {
                let (a, b) = r.pair;
                let true_beta = chip.crosstalk.beta[a][b];
                let true_theta = chip.crosstalk.theta[a][b];
                assert!(
                    (r.beta_hat - true_beta).abs() < 0.01,
                    "pair {:?}: beta {} vs {}",
                    r.pair,
                    r.beta_hat,
                    true_beta
                );
                assert!(
                    wrap_phase(r.theta_hat - true_theta).abs() < 0.1,
                    "pair {:?}: theta {} vs {}",
                    r.pair,
                    r.theta_hat,
                    true_theta
                );
            }
        }
    }
}
