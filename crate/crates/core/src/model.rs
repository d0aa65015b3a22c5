//! Physical parameters and shared domain types for a transmon chip with
//! classical drive crosstalk.
//!
//! All frequencies are angular (rad/s); all phases are radians, canonicalized
//! to `[-pi, pi)` where noted. The chip is described by per-qubit transmon
//! parameters, per-qubit drive channels and the directional crosstalk
//! matrices `beta` (relative strength), `theta` (relative phase) and `tau`
//! (relative signal delay).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Tolerance on the `beta` diagonal: a calibrated drive should have
/// `beta[j][j]` within this distance of 1. A validation default, not a
/// physical claim.
pub const BETA_DIAGONAL_TOLERANCE: f64 = 0.05;

/// Wrap a finite phase into `[-pi, pi)`. NaN propagates; see
/// [`canonicalize_phase`] for the checked variant.
pub fn wrap_phase(x: f64) -> f64 {
    let mut r = libm::fmod(x + PI, 2.0 * PI);
    if r < 0.0 {
        r += 2.0 * PI;
    }
    r - PI
}

/// Canonicalize a phase into `[-pi, pi)`, rejecting non-finite input.
///
/// The result is congruent to the input modulo 2*pi and the map is
/// idempotent. The interval is half-open: both `pi` and `-pi` map to `-pi`.
pub fn canonicalize_phase(x: f64) -> Result<f64, ModelError> {
    if !x.is_finite() {
        return Err(ModelError::NonFinitePhase);
    }
    Ok(wrap_phase(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelError {
    NonFinitePhase,
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::NonFinitePhase => write!(f, "phase must be finite"),
        }
    }
}

/// Per-qubit transmon parameters: a Duffing oscillator with frequency
/// `omega_j` and anharmonicity `alpha_j` (negative by convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    /// Qubit 0-1 transition frequency, rad/s.
    pub frequency: f64,
    /// Anharmonicity, rad/s. Ignored in 2-level simulation.
    pub anharmonicity: f64,
}

/// Default anharmonicity magnitude, rad/s (-2*pi*600 MHz). The sign follows
/// the usual transmon convention.
pub const DEFAULT_ANHARMONICITY: f64 = -2.0 * PI * 600.0e6;

/// Pulse envelope shapes supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeShape {
    /// `Omega(s) = A * (1 - cos(2*pi*s/T)) / 2`, zero at both ends.
    Cosine,
    /// Constant amplitude over the full duration.
    Flat,
}

/// A drive pulse described by its shape, duration and total rotation angle
/// (integrated area `Omega_hat = <Omega> * t`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnvelope {
    pub shape: EnvelopeShape,
    /// Pulse duration, seconds.
    pub duration: f64,
    /// Integrated pulse area, radians. `pi` is a bit flip.
    pub rotation_angle: f64,
}

/// Default gate duration, 160 ns.
pub const DEFAULT_DURATION: f64 = 160e-9;
/// Default rotation angle, 2.5*pi.
pub const DEFAULT_ROTATION_ANGLE: f64 = 2.5 * PI;

impl PulseEnvelope {
    pub fn cosine(duration: f64, rotation_angle: f64) -> Self {
        PulseEnvelope {
            shape: EnvelopeShape::Cosine,
            duration,
            rotation_angle,
        }
    }

    pub fn flat(duration: f64, rotation_angle: f64) -> Self {
        PulseEnvelope {
            shape: EnvelopeShape::Flat,
            duration,
            rotation_angle,
        }
    }

    /// Peak amplitude, rad/s. Chosen so the integral over the duration is
    /// exactly `rotation_angle`.
    pub fn peak_amplitude(&self) -> f64 {
        match self.shape {
            EnvelopeShape::Cosine => 2.0 * self.rotation_angle / self.duration,
            EnvelopeShape::Flat => self.rotation_angle / self.duration,
        }
    }

    /// Instantaneous amplitude `Omega(s)` at time `s` from pulse start,
    /// rad/s. Zero outside `[0, duration]`.
    pub fn amplitude(&self, s: f64) -> f64 {
        if s < 0.0 || s > self.duration {
            return 0.0;
        }
        match self.shape {
            EnvelopeShape::Cosine => {
                let a = self.peak_amplitude();
                a * (1.0 - libm::cos(2.0 * PI * s / self.duration)) / 2.0
            }
            EnvelopeShape::Flat => self.peak_amplitude(),
        }
    }
}

/// One physical drive line: carrier frequency, software phase and envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveChannel {
    /// Carrier (drive) frequency, rad/s.
    pub carrier_frequency: f64,
    /// Software phase offset, radians, in `[-pi, pi)`.
    pub software_phase: f64,
    pub envelope: PulseEnvelope,
}

/// Directional crosstalk matrices for an N-qubit chip.
///
/// Entry `[j][k]` describes the effect of drive `k` on qubit `j`:
/// `beta[j][k]` is the relative strength, `theta[j][k]` the relative phase
/// and `tau[j][k] = tau_j - tau_k` the relative signal delay. `tau` is
/// skew-symmetric, so any single row determines the whole matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosstalkMatrix {
    pub size: usize,
    pub beta: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub tau: Vec<Vec<f64>>,
}

impl CrosstalkMatrix {
    /// The identity crosstalk matrix: `beta = I`, `theta = 0`, `tau = 0`
    /// (an ideal chip with no crosstalk).
    pub fn identity(size: usize) -> Self {
        let mut beta = alloc::vec![alloc::vec![0.0; size]; size];
        for (j, row) in beta.iter_mut().enumerate() {
            row[j] = 1.0;
        }
        CrosstalkMatrix {
            size,
            beta,
            theta: alloc::vec![alloc::vec![0.0; size]; size],
            tau: alloc::vec![alloc::vec![0.0; size]; size],
        }
    }

    /// Rebuild the full skew-symmetric `tau` matrix from its first row,
    /// using `tau[j][k] = tau[j][0] - tau[k][0]`.
    pub fn tau_from_row(row0: &[f64]) -> Vec<Vec<f64>> {
        let n = row0.len();
        let mut tau = alloc::vec![alloc::vec![0.0; n]; n];
        for j in 0..n {
            for k in 0..n {
                // row0[j] = tau[0][j] = -tau[j][0]
                tau[j][k] = row0[k] - row0[j];
            }
        }
        tau
    }
}

/// Static chip layout: which qubit pairs share a physical coupler and which
/// qubits have unusable readout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipTopology {
    pub qubit_count: usize,
    /// Unordered pairs, stored with the smaller index first.
    pub coupler_edges: Vec<(usize, usize)>,
    /// Qubits that cannot serve as the measured (primary) qubit. Their
    /// drives remain valid crosstalk sources.
    pub disabled_readout_qubits: Vec<usize>,
}

impl ChipTopology {
    /// Ring connectivity over `n` qubits (nearest-neighbor couplers).
    pub fn ring(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            if i < j {
                edges.push((i, j));
            } else if n > 2 {
                edges.push((j, i));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        ChipTopology {
            qubit_count: n,
            coupler_edges: edges,
            disabled_readout_qubits: Vec::new(),
        }
    }

    pub fn has_coupler(&self, a: usize, b: usize) -> bool {
        let e = (a.min(b), a.max(b));
        self.coupler_edges.contains(&e)
    }

    pub fn readout_enabled(&self, q: usize) -> bool {
        !self.disabled_readout_qubits.contains(&q)
    }
}

/// Per-qubit readout confusion model: `p0_given_0` is the probability of
/// reading 0 when the qubit is in state 0, `p1_given_1` of reading 1 when in
/// state 1. Both must exceed 0.5 so the confusion matrix is invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutErrorModel {
    pub p0_given_0: f64,
    pub p1_given_1: f64,
}

impl ReadoutErrorModel {
    /// Perfect readout.
    pub fn identity() -> Self {
        ReadoutErrorModel {
            p0_given_0: 1.0,
            p1_given_1: 1.0,
        }
    }

    /// Determinant of the 2x2 confusion matrix, `p0|0 + p1|1 - 1`.
    pub fn determinant(&self) -> f64 {
        self.p0_given_0 + self.p1_given_1 - 1.0
    }

    pub fn is_valid(&self) -> bool {
        self.p0_given_0 > 0.5 && self.p0_given_0 <= 1.0 && self.p1_given_1 > 0.5 && self.p1_given_1 <= 1.0
    }
}

/// Complete ground truth for a synthetic chip: everything the simulator
/// needs to generate experiments and everything learning tries to recover.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipGroundTruth {
    pub transmons: Vec<TransmonParams>,
    pub drives: Vec<DriveChannel>,
    pub crosstalk: CrosstalkMatrix,
    pub topology: ChipTopology,
    pub readout: Vec<ReadoutErrorModel>,
}

impl ChipGroundTruth {
    pub fn qubit_count(&self) -> usize {
        self.topology.qubit_count
    }
}

/// Check every chip invariant and return a human-readable description of
/// each violation. Validation reports; it never aborts.
pub fn validate_chip(chip: &ChipGroundTruth) -> Vec<String> {
    let mut violations = Vec::new();
    let n = chip.topology.qubit_count;

    if chip.transmons.len() != n {
        violations.push(format!(
            "transmons: expected {} entries, found {}",
            n,
            chip.transmons.len()
        ));
    }
    if chip.drives.len() != n {
        violations.push(format!("drives: expected {} entries, found {}", n, chip.drives.len()));
    }
    if chip.readout.len() != n {
        violations.push(format!("readout: expected {} entries, found {}", n, chip.readout.len()));
    }

    for (j, t) in chip.transmons.iter().enumerate() {
        if !(t.frequency > 0.0) {
            violations.push(format!("transmons[{j}].frequency must be positive"));
        }
    }
    for (k, d) in chip.drives.iter().enumerate() {
        if !(d.carrier_frequency > 0.0) {
            violations.push(format!("drives[{k}].carrier_frequency must be positive"));
        }
        if !(d.software_phase >= -PI && d.software_phase < PI) {
            violations.push(format!("drives[{k}].software_phase must lie in [-pi, pi)"));
        }
        if !(d.envelope.duration > 0.0) {
            violations.push(format!("drives[{k}].envelope.duration must be positive"));
        }
        if !(d.envelope.rotation_angle >= 0.0) {
            violations.push(format!("drives[{k}].envelope.rotation_angle must be nonnegative"));
        }
    }

    let ct = &chip.crosstalk;
    if ct.size != n {
        violations.push(format!("crosstalk.size: expected {}, found {}", n, ct.size));
    }
    let square = |m: &Vec<Vec<f64>>| m.len() == ct.size && m.iter().all(|r| r.len() == ct.size);
    if !square(&ct.beta) || !square(&ct.theta) || !square(&ct.tau) {
        violations.push(String::from("crosstalk matrices must be size x size"));
        return violations;
    }
    for j in 0..ct.size {
        if libm::fabs(ct.beta[j][j] - 1.0) > BETA_DIAGONAL_TOLERANCE {
            violations.push(format!(
                "beta[{j}][{j}] must be within {BETA_DIAGONAL_TOLERANCE} of 1"
            ));
        }
        if ct.theta[j][j] != 0.0 {
            violations.push(format!("theta diagonal must be 0 (theta[{j}][{j}] != 0)"));
        }
        if ct.tau[j][j] != 0.0 {
            violations.push(format!("tau diagonal must be 0 (tau[{j}][{j}] != 0)"));
        }
        for k in 0..ct.size {
            if !(ct.beta[j][k] >= 0.0) {
                violations.push(format!("beta must be nonnegative (beta[{j}][{k}] < 0)"));
            }
            if !(ct.theta[j][k] >= -PI && ct.theta[j][k] < PI) {
                violations.push(format!("theta[{j}][{k}] must lie in [-pi, pi)"));
            }
            if ct.tau[j][k] + ct.tau[k][j] != 0.0 {
                violations.push(format!(
                    "tau must be skew-symmetric (tau[{j}][{k}] + tau[{k}][{j}] != 0)"
                ));
            }
        }
    }

    for &(a, b) in &chip.topology.coupler_edges {
        if a >= n || b >= n {
            violations.push(format!("coupler edge ({a},{b}) references an invalid qubit"));
        }
        if a == b {
            violations.push(format!("coupler edge ({a},{b}) is a self-edge"));
        }
    }
    for &q in &chip.topology.disabled_readout_qubits {
        if q >= n {
            violations.push(format!("disabled readout qubit {q} is out of range"));
        }
    }
    for (q, r) in chip.readout.iter().enumerate() {
        if !r.is_valid() {
            violations.push(format!(
                "readout[{q}]: probabilities must lie in (0.5, 1.0]"
            ));
        }
    }

    violations
}
