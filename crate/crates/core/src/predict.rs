//! Zero-parameter prediction of 3- and 4-qubit simultaneous-drive curves
//! from pairwise fits, scoring against data and the crosstalk accumulation
//! decomposition.
//!
//! Nothing is refitted here: every `(beta, theta)` contribution is taken
//! verbatim from the pair fit report, so the prediction has zero free
//! parameters and is scored with `p = 0`.

use alloc::vec::Vec;

use crate::analytic::{eta_multi, MultiDriveSpec};
use crate::experiment::{phase_grid, PhaseSweepDataset, PhaseSweepProtocol};
use crate::learning::{chi_squared_per_dof, ChipFitReport, FitError};

/// Per-secondary contribution used in a prediction: the source qubit and the
/// fitted `(beta, theta)` taken from the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contribution {
    pub qubit: usize,
    pub beta: f64,
    pub theta: f64,
}

/// Predicted Z curve for one primary qubit driven simultaneously with a set
/// of secondaries.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipletPrediction {
    pub primary_qubit: usize,
    pub secondaries: Vec<usize>,
    pub phases: Vec<f64>,
    pub predicted_z: Vec<f64>,
    /// Filled in by [`score_prediction`]; absent until scored against data.
    pub chi2_per_dof_vs_data: Option<f64>,
    pub contributions: Vec<Contribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredictError {
    /// No pair fit available for the directed pair `(primary, secondary)`.
    MissingPairFit(usize, usize),
    /// Prediction and dataset phase grids differ.
    GridMismatch,
    /// Prediction and dataset reference different qubits.
    QubitMismatch,
    Fit(FitError),
}

impl From<FitError> for PredictError {
    fn from(e: FitError) -> Self {
        PredictError::Fit(e)
    }
}

impl core::fmt::Display for PredictError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PredictError::MissingPairFit(a, b) => {
                write!(f, "no pair fit for directed pair ({a}, {b})")
            }
            PredictError::GridMismatch => write!(f, "phase grids do not match"),
            PredictError::QubitMismatch => write!(f, "prediction and dataset qubits differ"),
            PredictError::Fit(e) => write!(f, "{e}"),
        }
    }
}

/// Predict the multiplet Z curve for primary `a` and the given secondaries
/// from pairwise fits alone.
pub fn predict_multiplet(
    report: &ChipFitReport,
    a: usize,
    secondaries: &[usize],
    protocol: &PhaseSweepProtocol,
) -> Result<MultipletPrediction, PredictError> {
    let mut contributions = Vec::with_capacity(secondaries.len());
    for &k in secondaries {
        let fit = report
            .find(a, k)
            .ok_or(PredictError::MissingPairFit(a, k))?;
        contributions.push(Contribution { qubit: k, beta: fit.beta_hat, theta: fit.theta_hat });
    }
    let phases = phase_grid(protocol.phase_count);
    let terms: Vec<(f64, f64)> = contributions.iter().map(|c| (c.beta, c.theta)).collect();
    let predicted_z = phases
        .iter()
        .map(|&dphi| {
            let spec = MultiDriveSpec {
                rotation_angle: protocol.rotation_angle,
                terms: terms.clone(),
                delta_phi: dphi,
            };
            // terms come from fits with beta >= 0, so eta_multi cannot fail
            libm::cos(protocol.rotation_angle * eta_multi(&spec).unwrap_or(1.0))
        })
        .collect();
    Ok(MultipletPrediction {
        primary_qubit: a,
        secondaries: secondaries.to_vec(),
        phases,
        predicted_z,
        chi2_per_dof_vs_data: None,
        contributions,
    })
}

/// Score a prediction against a measured dataset with chi-squared per degree
/// of freedom at zero free parameters.
pub fn score_prediction(
    prediction: &MultipletPrediction,
    dataset: &PhaseSweepDataset,
) -> Result<f64, PredictError> {
    if prediction.primary_qubit != dataset.primary_qubit
        || prediction.secondaries != dataset.secondary_qubits
    {
        return Err(PredictError::QubitMismatch);
    }
    if prediction.phases.len() != dataset.phases.len()
        || prediction
            .phases
            .iter()
            .zip(&dataset.phases)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(PredictError::GridMismatch);
    }
    Ok(chi_squared_per_dof(
        &dataset.observed_z,
        &prediction.predicted_z,
        &dataset.sigma,
        0,
    )?)
}

/// Predictions for the full secondary set and every nonempty subset,
/// lexicographically ordered (the accumulation decomposition: with 3
/// secondaries this yields 3 single-pair curves, 3 two-secondary curves and
/// the full curve).
pub fn decompose_accumulation(
    report: &ChipFitReport,
    a: usize,
    secondaries: &[usize],
    protocol: &PhaseSweepProtocol,
) -> Result<Vec<MultipletPrediction>, PredictError> {
    let n = secondaries.len();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| secondaries[i])
            .collect();
        subsets.push(subset);
    }
    subsets.sort();
    subsets
        .iter()
        .map(|s| predict_multiplet(report, a, s, protocol))
        .collect()
}
