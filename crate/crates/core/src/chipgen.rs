//! Synthetic chip generation.
//!
//! Produces ring-topology ground-truth chips with randomly drawn crosstalk:
//! off-diagonal `beta` uniform in a configured range, `theta` uniform over
//! `[-pi, pi)`, unit `beta` diagonal and zero delays.
//!
//! The default qubit frequencies (5.0 GHz + 100 MHz per qubit index) are
//! placeholders: no public frequency table exists for the kind of device
//! being modeled, and none of the implemented dynamics depends on the
//! absolute values in the rotating frame.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::experiment::derive_seed;
use crate::model::{
    ChipGroundTruth, ChipTopology, CrosstalkMatrix, DriveChannel, PulseEnvelope,
    ReadoutErrorModel, TransmonParams, DEFAULT_ANHARMONICITY, DEFAULT_DURATION,
    DEFAULT_ROTATION_ANGLE,
};

/// Parameters for synthetic chip generation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipGenConfig {
    pub qubit_count: usize,
    /// Off-diagonal crosstalk strengths are drawn uniformly from this range.
    pub beta_range: (f64, f64),
    /// Readout fidelities `(p0_given_0, p1_given_1)` applied to every qubit.
    pub readout: (f64, f64),
    pub disabled_readout_qubits: Vec<usize>,
}

impl Default for ChipGenConfig {
    fn default() -> Self {
        ChipGenConfig {
            qubit_count: 8,
            beta_range: (0.0, 0.15),
            readout: (0.97, 0.95),
            disabled_readout_qubits: Vec::new(),
        }
    }
}

/// An ideal chip: no crosstalk, perfect readout.
pub fn ideal_chip(n: usize) -> ChipGroundTruth {
    let envelope = PulseEnvelope::cosine(DEFAULT_DURATION, DEFAULT_ROTATION_ANGLE);
    ChipGroundTruth {
        transmons: (0..n)
            .map(|j| TransmonParams {
                frequency: 2.0 * PI * (5.0e9 + 0.1e9 * j as f64),
                anharmonicity: DEFAULT_ANHARMONICITY,
            })
            .collect(),
        drives: (0..n)
            .map(|j| DriveChannel {
                carrier_frequency: 2.0 * PI * (5.0e9 + 0.1e9 * j as f64),
                software_phase: 0.0,
                envelope,
            })
            .collect(),
        crosstalk: CrosstalkMatrix::identity(n),
        topology: ChipTopology::ring(n),
        readout: vec![ReadoutErrorModel::identity(); n],
    }
}

/// Generate a random chip. Deterministic in `(config, seed)`.
pub fn generate_chip(config: &ChipGenConfig, seed: u64) -> ChipGroundTruth {
    let n = config.qubit_count;
    let mut chip = ideal_chip(n);
    chip.readout = vec![
        ReadoutErrorModel {
            p0_given_0: config.readout.0,
            p1_given_1: config.readout.1,
        };
        n
    ];
    chip.topology.disabled_readout_qubits = config.disabled_readout_qubits.clone();
    chip.topology.disabled_readout_qubits.sort_unstable();
    chip.topology.disabled_readout_qubits.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0xC419u64]));
    let mut uniform = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let (lo, hi) = config.beta_range;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            chip.crosstalk.beta[j][k] = lo + (hi - lo) * uniform();
            chip.crosstalk.theta[j][k] = -PI + 2.0 * PI * uniform();
        }
    }
    chip
}
