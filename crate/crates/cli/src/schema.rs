//! On-disk file formats: run config, chip ground truth, datasets, fit
//! reports, predictions and the structured graph export.
//!
//! All formats are JSON. Floating-point fields round-trip bit-exactly
//! (serde_json emits the shortest decimal that parses back to the same
//! double). Chip files store frequencies in plain Hz; the conversion to
//! angular rad/s happens at this boundary and nowhere else.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crosstalk_core::chipgen::ChipGenConfig;
use crosstalk_core::experiment::{PhaseSweepDataset, PhaseSweepProtocol};
use crosstalk_core::learning::{build_report, ChipFitReport, FitFlags, PairFitResult};
use crosstalk_core::model::{
    ChipGroundTruth, ChipTopology, CrosstalkMatrix, DriveChannel, PulseEnvelope,
    ReadoutErrorModel, TransmonParams, DEFAULT_DURATION, DEFAULT_ROTATION_ANGLE,
};
use crosstalk_core::oracle::{Frame, SimulationConfig, StepControl};
use crosstalk_core::predict::MultipletPrediction;
use crosstalk_core::report::{CrosstalkGraph, DirectionColor, GraphEdge, Tier};

use crate::error::{AppError, AppResult};

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// run config

/// Top-level run configuration. Every field is optional; missing blocks take
/// the documented defaults. Command-line flags override config fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    /// Path to an existing chip ground-truth file. Mutually exclusive with
    /// `generate`.
    pub chip_file: Option<PathBuf>,
    /// Synthesize the chip instead of loading one.
    pub generate: Option<GenerateBlock>,
    pub protocol: ProtocolBlock,
    pub oracle: OracleBlock,
    pub output_dir: Option<PathBuf>,
    pub master_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateBlock {
    pub qubit_count: usize,
    /// Uniform range for off-diagonal crosstalk strengths.
    pub beta_range: (f64, f64),
    /// `(p0_given_0, p1_given_1)` applied to every qubit.
    pub readout: (f64, f64),
    pub disabled_readout_qubits: Vec<usize>,
    /// Chip-generation seed; defaults to the master seed when absent.
    pub seed: Option<u64>,
}

impl Default for GenerateBlock {
    fn default() -> Self {
        let d = ChipGenConfig::default();
        GenerateBlock {
            qubit_count: d.qubit_count,
            beta_range: d.beta_range,
            readout: d.readout,
            disabled_readout_qubits: d.disabled_readout_qubits,
            seed: None,
        }
    }
}

impl GenerateBlock {
    pub fn to_core(&self) -> ChipGenConfig {
        ChipGenConfig {
            qubit_count: self.qubit_count,
            beta_range: self.beta_range,
            readout: self.readout,
            disabled_readout_qubits: self.disabled_readout_qubits.clone(),
        }
    }
}

/// Phase-sweep protocol block; the defaults are the reference protocol
/// (33 phases, 1000 shots, rotation angle 2.5*pi, 160 ns).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolBlock {
    pub phases: usize,
    pub shots: u64,
    /// Radians.
    pub rotation_angle: f64,
    /// Seconds.
    pub duration: f64,
}

impl Default for ProtocolBlock {
    fn default() -> Self {
        let d = PhaseSweepProtocol::default();
        ProtocolBlock {
            phases: d.phase_count,
            shots: d.shots,
            rotation_angle: d.rotation_angle,
            duration: d.duration,
        }
    }
}

impl ProtocolBlock {
    pub fn to_core(&self) -> AppResult<PhaseSweepProtocol> {
        if self.phases == 0 {
            return Err(AppError::config("protocol.phases must be positive"));
        }
        if self.shots == 0 {
            return Err(AppError::config("protocol.shots must be positive"));
        }
        if !(self.rotation_angle > 0.0) {
            return Err(AppError::config("protocol.rotation_angle must be positive"));
        }
        if !(self.duration > 0.0) {
            return Err(AppError::config("protocol.duration must be positive"));
        }
        Ok(PhaseSweepProtocol {
            phase_count: self.phases,
            shots: self.shots,
            rotation_angle: self.rotation_angle,
            duration: self.duration,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleBlock {
    /// 2 or 3 transmon levels.
    pub levels: usize,
    /// "rwa" or "lab".
    pub frame: String,
    /// "auto", {"fixed": seconds} or {"adaptive": tolerance}.
    pub step: StepBlock,
    pub include_delays: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepBlock {
    Auto,
    Fixed(f64),
    Adaptive(f64),
}

impl Default for OracleBlock {
    fn default() -> Self {
        OracleBlock {
            levels: 2,
            frame: String::from("rwa"),
            step: StepBlock::Auto,
            include_delays: false,
        }
    }
}

impl OracleBlock {
    pub fn to_core(&self) -> AppResult<SimulationConfig> {
        let frame = match self.frame.as_str() {
            "rwa" => Frame::RotatingRwa,
            "lab" => Frame::Lab,
            other => {
                return Err(AppError::config(format!(
                    "oracle.frame must be \"rwa\" or \"lab\", got \"{other}\""
                )))
            }
        };
        if self.levels != 2 && self.levels != 3 {
            return Err(AppError::config("oracle.levels must be 2 or 3"));
        }
        let step = match self.step {
            StepBlock::Auto => StepControl::Auto,
            StepBlock::Fixed(dt) => StepControl::Fixed(dt),
            StepBlock::Adaptive(tol) => StepControl::Adaptive(tol),
        };
        Ok(SimulationConfig { levels: self.levels, frame, step, include_delays: self.include_delays })
    }
}

// ---------------------------------------------------------------------------
// chip file

/// Chip ground-truth file. Frequencies are in Hz (not angular); `crosstalk`
/// holds the row-major N x N matrices, entry `[j][k]` describing the effect
/// of drive `k` on qubit `j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChipFile {
    pub version: u32,
    pub qubits: Vec<QubitEntry>,
    pub crosstalk: CrosstalkEntry,
    pub topology: TopologyEntry,
    pub readout: Vec<ReadoutEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitEntry {
    pub frequency_hz: f64,
    pub anharmonicity_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkEntry {
    pub beta: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub tau: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyEntry {
    pub coupler_edges: Vec<(usize, usize)>,
    pub disabled_readout_qubits: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutEntry {
    pub p0_given_0: f64,
    pub p1_given_1: f64,
}

impl ChipFile {
    pub fn from_core(chip: &ChipGroundTruth) -> Self {
        ChipFile {
            version: SCHEMA_VERSION,
            qubits: chip
                .transmons
                .iter()
                .map(|t| QubitEntry {
                    frequency_hz: t.frequency / (2.0 * PI),
                    anharmonicity_hz: t.anharmonicity / (2.0 * PI),
                })
                .collect(),
            crosstalk: CrosstalkEntry {
                beta: chip.crosstalk.beta.clone(),
                theta: chip.crosstalk.theta.clone(),
                tau: chip.crosstalk.tau.clone(),
            },
            topology: TopologyEntry {
                coupler_edges: chip.topology.coupler_edges.clone(),
                disabled_readout_qubits: chip.topology.disabled_readout_qubits.clone(),
            },
            readout: chip
                .readout
                .iter()
                .map(|r| ReadoutEntry { p0_given_0: r.p0_given_0, p1_given_1: r.p1_given_1 })
                .collect(),
        }
    }

    /// Reconstruct the ground truth. Drive channels default to on-resonance
    /// carriers with zero software phase; the sweep protocol supplies the
    /// envelope.
    pub fn to_core(&self) -> AppResult<ChipGroundTruth> {
        if self.version != SCHEMA_VERSION {
            return Err(AppError::config(format!(
                "unsupported chip file version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        let n = self.qubits.len();
        let envelope = PulseEnvelope::cosine(DEFAULT_DURATION, DEFAULT_ROTATION_ANGLE);
        let chip = ChipGroundTruth {
            transmons: self
                .qubits
                .iter()
                .map(|q| TransmonParams {
                    frequency: 2.0 * PI * q.frequency_hz,
                    anharmonicity: 2.0 * PI * q.anharmonicity_hz,
                })
                .collect(),
            drives: self
                .qubits
                .iter()
                .map(|q| DriveChannel {
                    carrier_frequency: 2.0 * PI * q.frequency_hz,
                    software_phase: 0.0,
                    envelope,
                })
                .collect(),
            crosstalk: CrosstalkMatrix {
                size: n,
                beta: self.crosstalk.beta.clone(),
                theta: self.crosstalk.theta.clone(),
                tau: self.crosstalk.tau.clone(),
            },
            topology: ChipTopology {
                qubit_count: n,
                coupler_edges: self.topology.coupler_edges.clone(),
                disabled_readout_qubits: self.topology.disabled_readout_qubits.clone(),
            },
            readout: self
                .readout
                .iter()
                .map(|r| ReadoutErrorModel { p0_given_0: r.p0_given_0, p1_given_1: r.p1_given_1 })
                .collect(),
        };
        let violations = crosstalk_core::model::validate_chip(&chip);
        if !violations.is_empty() {
            return Err(AppError::config(format!(
                "invalid chip file: {}",
                violations.join("; ")
            )));
        }
        Ok(chip)
    }
}

// ---------------------------------------------------------------------------
// dataset file

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub version: u32,
    pub primary_qubit: usize,
    pub secondary_qubits: Vec<usize>,
    pub protocol: ProtocolBlock,
    pub phases: Vec<f64>,
    pub observed_z: Vec<f64>,
    pub sigma: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub clipped_points: Vec<usize>,
}

impl DatasetFile {
    pub fn from_core(ds: &PhaseSweepDataset, protocol: &ProtocolBlock) -> Self {
        DatasetFile {
            version: SCHEMA_VERSION,
            primary_qubit: ds.primary_qubit,
            secondary_qubits: ds.secondary_qubits.clone(),
            protocol: ProtocolBlock {
                phases: ds.phases.len(),
                shots: ds.shots,
                rotation_angle: ds.rotation_angle,
                duration: protocol.duration,
            },
            phases: ds.phases.clone(),
            observed_z: ds.observed_z.clone(),
            sigma: ds.sigma.clone(),
            shots: ds.shots,
            seed: ds.seed,
            clipped_points: ds.clipped_points.clone(),
        }
    }

    pub fn to_core(&self) -> AppResult<PhaseSweepDataset> {
        if self.version != SCHEMA_VERSION {
            return Err(AppError::config(format!(
                "unsupported dataset file version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if self.phases.len() != self.observed_z.len() || self.phases.len() != self.sigma.len() {
            return Err(AppError::config(
                "dataset phases/observed_z/sigma lengths differ",
            ));
        }
        Ok(PhaseSweepDataset {
            primary_qubit: self.primary_qubit,
            secondary_qubits: self.secondary_qubits.clone(),
            rotation_angle: self.protocol.rotation_angle,
            phases: self.phases.clone(),
            observed_z: self.observed_z.clone(),
            sigma: self.sigma.clone(),
            shots: self.shots,
            seed: self.seed,
            clipped_points: self.clipped_points.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// fit report file

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReportFile {
    pub version: u32,
    pub qubit_count: usize,
    pub results: Vec<FitEntry>,
    pub median_chi2: f64,
    pub beta_theta_correlation: f64,
    /// Fitted matrices in the chip schema (diagonal 1 / unfitted 0) so a
    /// fitted chip can be fed back into simulation.
    pub beta_matrix: Vec<Vec<f64>>,
    pub theta_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitEntry {
    pub pair: (usize, usize),
    pub beta_hat: f64,
    pub theta_hat: f64,
    pub chi2_per_dof: f64,
    pub beta_stderr: f64,
    pub theta_stderr: f64,
    pub theta_unidentifiable: bool,
    pub boundary_hit: bool,
    pub poor_fit: bool,
}

impl FitReportFile {
    pub fn from_core(report: &ChipFitReport, qubit_count: usize) -> Self {
        FitReportFile {
            version: SCHEMA_VERSION,
            qubit_count,
            results: report
                .results
                .iter()
                .map(|r| FitEntry {
                    pair: r.pair,
                    beta_hat: r.beta_hat,
                    theta_hat: r.theta_hat,
                    chi2_per_dof: r.chi2_per_dof,
                    beta_stderr: r.beta_stderr,
                    theta_stderr: r.theta_stderr,
                    theta_unidentifiable: r.flags.theta_unidentifiable,
                    boundary_hit: r.flags.boundary_hit,
                    poor_fit: r.flags.poor_fit,
                })
                .collect(),
            median_chi2: report.median_chi2,
            beta_theta_correlation: report.beta_theta_correlation,
            beta_matrix: report.beta_matrix(qubit_count),
            theta_matrix: report.theta_matrix(qubit_count),
        }
    }

    pub fn to_core(&self) -> AppResult<ChipFitReport> {
        if self.version != SCHEMA_VERSION {
            return Err(AppError::config(format!(
                "unsupported fit report version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        Ok(build_report(
            self.results
                .iter()
                .map(|e| PairFitResult {
                    pair: e.pair,
                    beta_hat: e.beta_hat,
                    theta_hat: e.theta_hat,
                    chi2_per_dof: e.chi2_per_dof,
                    beta_stderr: e.beta_stderr,
                    theta_stderr: e.theta_stderr,
                    flags: FitFlags {
                        theta_unidentifiable: e.theta_unidentifiable,
                        boundary_hit: e.boundary_hit,
                        poor_fit: e.poor_fit,
                    },
                })
                .collect(),
        ))
    }
}

// ---------------------------------------------------------------------------
// prediction file

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionFile {
    pub version: u32,
    pub primary_qubit: usize,
    pub secondaries: Vec<usize>,
    pub phases: Vec<f64>,
    pub predicted_z: Vec<f64>,
    pub contributions: Vec<ContributionEntry>,
    /// Present only when the prediction was scored against data.
    pub chi2_per_dof_vs_data: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContributionEntry {
    pub qubit: usize,
    pub beta: f64,
    pub theta: f64,
}

impl PredictionFile {
    pub fn from_core(p: &MultipletPrediction) -> Self {
        PredictionFile {
            version: SCHEMA_VERSION,
            primary_qubit: p.primary_qubit,
            secondaries: p.secondaries.clone(),
            phases: p.phases.clone(),
            predicted_z: p.predicted_z.clone(),
            contributions: p
                .contributions
                .iter()
                .map(|c| ContributionEntry { qubit: c.qubit, beta: c.beta, theta: c.theta })
                .collect(),
            chi2_per_dof_vs_data: p.chi2_per_dof_vs_data,
        }
    }
}

// ---------------------------------------------------------------------------
// structured graph export

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub version: u32,
    pub nodes: Vec<usize>,
    pub edges: Vec<GraphEdgeEntry>,
    pub coupler_edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphEdgeEntry {
    pub from: usize,
    pub to: usize,
    pub beta: f64,
    pub theta: f64,
    pub tier: String,
    pub direction_color: String,
    pub has_coupler: bool,
}

impl GraphFile {
    pub fn from_core(g: &CrosstalkGraph) -> Self {
        GraphFile {
            version: SCHEMA_VERSION,
            nodes: g.nodes.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| GraphEdgeEntry {
                    from: e.from,
                    to: e.to,
                    beta: e.beta,
                    theta: e.theta,
                    tier: match e.tier {
                        Tier::Hidden => String::from("hidden"),
                        Tier::Green => String::from("green"),
                        Tier::Strong => String::from("strong"),
                    },
                    direction_color: match e.direction_color {
                        DirectionColor::Red => String::from("red"),
                        DirectionColor::Blue => String::from("blue"),
                    },
                    has_coupler: e.has_coupler,
                })
                .collect(),
            coupler_edges: g.coupler_edges.clone(),
        }
    }

    pub fn to_core(&self) -> AppResult<CrosstalkGraph> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let tier = match e.tier.as_str() {
                "hidden" => Tier::Hidden,
                "green" => Tier::Green,
                "strong" => Tier::Strong,
                other => return Err(AppError::config(format!("unknown tier \"{other}\""))),
            };
            let direction_color = match e.direction_color.as_str() {
                "red" => DirectionColor::Red,
                "blue" => DirectionColor::Blue,
                other => return Err(AppError::config(format!("unknown color \"{other}\""))),
            };
            edges.push(GraphEdge {
                from: e.from,
                to: e.to,
                beta: e.beta,
                theta: e.theta,
                tier,
                direction_color,
                has_coupler: e.has_coupler,
            });
        }
        Ok(CrosstalkGraph {
            nodes: self.nodes.clone(),
            edges,
            coupler_edges: self.coupler_edges.clone(),
        })
    }
}
