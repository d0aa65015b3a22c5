//! Brute-force time-domain integration of the driven-transmon Schrodinger
//! equation for one target qubit under any number of simultaneous drives.
//!
//! This module is the independent ground truth for the closed forms in
//! [`crate::analytic`] and the signal source for synthetic experiments. It
//! supports 2 or 3 transmon levels, lab frame or rotating frame with the
//! rotating wave approximation (RWA), and optional relative signal delays.
//!
//! The rotating frame is taken at the carrier of the first drive in the
//! list, which is the intended (primary) drive in every protocol here.
//!
//! Integrator: fixed-step classical Runge-Kutta (RK4). The state is
//! renormalized after every step; the pre-renormalization drift is checked
//! against a hard bound and reported as an integration failure if exceeded,
//! so accepted trajectories conserve the norm to well below 1e-9.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::{PulseEnvelope, TransmonParams};

/// Simulation frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Full lab-frame Hamiltonian including counter-rotating terms.
    Lab,
    /// Rotating frame at the primary drive carrier, counter-rotating terms
    /// dropped.
    RotatingRwa,
}

/// Step-size control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    /// Step chosen automatically as `1 / (200 * f_max)` with `f_max` the
    /// largest angular frequency appearing in the frame.
    Auto,
    /// Fixed step, seconds.
    Fixed(f64),
    /// Adaptive step doubling with the given relative error tolerance per
    /// step.
    Adaptive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    /// Number of transmon levels to keep, 2 or 3.
    pub levels: usize,
    pub frame: Frame,
    pub step: StepControl,
    /// Apply the per-drive relative delays `tau`.
    pub include_delays: bool,
}

impl SimulationConfig {
    pub fn rwa_two_level() -> Self {
        SimulationConfig {
            levels: 2,
            frame: Frame::RotatingRwa,
            step: StepControl::Auto,
            include_delays: false,
        }
    }
}

/// One drive term acting on the simulated target qubit, mirroring a row of
/// the crosstalk matrices: relative strength `beta`, relative phase `theta`,
/// software phase `phi`, carrier frequency and relative delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveTermInstance {
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
    /// Carrier frequency, rad/s.
    pub carrier: f64,
    pub envelope: PulseEnvelope,
    /// Relative signal delay `tau_jk`, seconds.
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    InvalidConfig(&'static str),
    NoDrives,
    /// The step size collapsed below a representable or sane value.
    StepUnderflow {
        step: f64,
        span: f64,
    },
    /// Norm drift in a single step exceeded the hard bound.
    NormDrift {
        step_index: usize,
        drift: f64,
    },
    /// Adaptive control could not meet the tolerance.
    ToleranceUnreachable {
        time: f64,
        error_estimate: f64,
    },
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::InvalidConfig(msg) => write!(f, "invalid simulation config: {msg}"),
            OracleError::NoDrives => write!(f, "at least one drive term is required"),
            OracleError::StepUnderflow { step, span } => {
                write!(f, "time step {step} underflowed for span {span}")
            }
            OracleError::NormDrift { step_index, drift } => {
                write!(f, "norm drift {drift} at step {step_index} exceeds bound")
            }
            OracleError::ToleranceUnreachable { time, error_estimate } => {
                write!(f, "adaptive tolerance unreachable at t={time} (err={error_estimate})")
            }
        }
    }
}

/// Final state amplitudes, dimension = simulated levels.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

/// Pauli expectations on the {0,1} subspace plus leakage population outside
/// it. Conventions: `X = |0><1| + |1><0|`, `Y = i(|0><1| - |1><0|)`,
/// `Z = |0><0| - |1><1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochExpectations {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub leakage: f64,
}

const MAX_STEPS: usize = 200_000_000;
const STEP_NORM_DRIFT_BOUND: f64 = 1e-10;

type Amp = [Complex64; 3];

struct Hamiltonian<'a> {
    levels: usize,
    frame: Frame,
    /// Static diagonal in the chosen frame, rad/s.
    diag: [f64; 3],
    frame_freq: f64,
    drives: &'a [DriveTermInstance],
    include_delays: bool,
}

impl<'a> Hamiltonian<'a> {
    fn new(target: &TransmonParams, drives: &'a [DriveTermInstance], config: &SimulationConfig) -> Self {
        let frame_freq = match config.frame {
            Frame::Lab => 0.0,
            Frame::RotatingRwa => drives[0].carrier,
        };
        let mut diag = [0.0; 3];
        for (n, d) in diag.iter_mut().enumerate().take(config.levels) {
            let nf = n as f64;
            *d = (target.frequency - frame_freq) * nf
                + 0.5 * target.anharmonicity * nf * (nf - 1.0);
        }
        Hamiltonian {
            levels: config.levels,
            frame: config.frame,
            diag,
            frame_freq,
            drives,
            include_delays: config.include_delays,
        }
    }

    /// Coefficient `c(t)` multiplying the lowering operator `a` (the raising
    /// term carries the conjugate). In the lab frame `c` is the real total
    /// drive field.
    fn coupling(&self, t: f64) -> Complex64 {
        let mut c = Complex64::new(0.0, 0.0);
        for d in self.drives {
            let delay = if self.include_delays { d.delay } else { 0.0 };
            let tl = t - delay;
            let amp = d.beta * d.envelope.amplitude(tl);
            if amp == 0.0 {
                continue;
            }
            match self.frame {
                Frame::Lab => {
                    let psi = d.carrier * tl - d.theta - d.phi;
                    c += Complex64::new(amp * libm::cos(psi), 0.0);
                }
                Frame::RotatingRwa => {
                    // keep only the co-rotating term
                    let phase = (d.carrier - self.frame_freq) * t - d.carrier * delay
                        - d.theta
                        - d.phi;
                    c += 0.5 * amp * Complex64::new(libm::cos(phase), libm::sin(phase));
                }
            }
        }
        c
    }

    /// `out = -i H(t) psi`
    fn deriv(&self, t: f64, psi: &Amp, out: &mut Amp) {
        let c = self.coupling(t);
        let cb = c.conj();
        let l = self.levels;
        for n in 0..l {
            let mut h = psi[n] * self.diag[n];
            if n > 0 {
                h += cb * psi[n - 1] * libm::sqrt(n as f64);
            }
            if n + 1 < l {
                h += c * psi[n + 1] * libm::sqrt((n + 1) as f64);
            }
            out[n] = Complex64::new(h.im, -h.re); // -i * h
        }
    }

    /// Largest angular frequency scale present in this frame, rad/s.
    fn max_frequency(&self) -> f64 {
        let mut f_max: f64 = 0.0;
        for n in 0..self.levels {
            f_max = f_max.max(libm::fabs(self.diag[n]));
        }
        let mut drive_sum = 0.0;
        for d in self.drives {
            drive_sum += d.beta * d.envelope.peak_amplitude();
            if matches!(self.frame, Frame::Lab) {
                f_max = f_max.max(d.carrier);
            } else {
                f_max = f_max.max(libm::fabs(d.carrier - self.frame_freq));
            }
        }
        f_max.max(drive_sum)
    }
}

fn norm_sq(psi: &Amp, levels: usize) -> f64 {
    psi.iter().take(levels).map(|a| a.norm_sqr()).sum()
}

fn rk4_step(h: &Hamiltonian, t: f64, dt: f64, psi: &Amp) -> Amp {
    let l = h.levels;
    let mut k1 = [Complex64::new(0.0, 0.0); 3];
    let mut k2 = k1;
    let mut k3 = k1;
    let mut k4 = k1;
    let mut tmp = k1;

    h.deriv(t, psi, &mut k1);
    for n in 0..l {
        tmp[n] = psi[n] + 0.5 * dt * k1[n];
    }
    h.deriv(t + 0.5 * dt, &tmp, &mut k2);
    for n in 0..l {
        tmp[n] = psi[n] + 0.5 * dt * k2[n];
    }
    h.deriv(t + 0.5 * dt, &tmp, &mut k3);
    for n in 0..l {
        tmp[n] = psi[n] + dt * k3[n];
    }
    h.deriv(t + dt, &tmp, &mut k4);

    let mut out = [Complex64::new(0.0, 0.0); 3];
    for n in 0..l {
        out[n] = psi[n] + (dt / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    out
}

/// Renormalize and enforce the per-step drift bound.
fn accept_step(psi: &mut Amp, levels: usize, step_index: usize) -> Result<(), OracleError> {
    let n2 = norm_sq(psi, levels);
    let drift = libm::fabs(libm::sqrt(n2) - 1.0);
    if drift > STEP_NORM_DRIFT_BOUND || !n2.is_finite() {
        return Err(OracleError::NormDrift { step_index, drift });
    }
    let inv = 1.0 / libm::sqrt(n2);
    for a in psi.iter_mut().take(levels) {
        *a *= inv;
    }
    Ok(())
}

/// Integrate the target qubit from `|0>` across the full support of all
/// drive pulses and return the final state.
pub fn evolve_target(
    target: &TransmonParams,
    drives: &[DriveTermInstance],
    config: &SimulationConfig,
) -> Result<StateVector, OracleError> {
    if drives.is_empty() {
        return Err(OracleError::NoDrives);
    }
    if config.levels < 2 || config.levels > 3 {
        return Err(OracleError::InvalidConfig("levels must be 2 or 3"));
    }
    match config.step {
        StepControl::Fixed(dt) if !(dt > 0.0) => {
            return Err(OracleError::InvalidConfig("time_step must be positive"))
        }
        StepControl::Adaptive(tol) if !(tol > 0.0 && tol < 1.0) => {
            return Err(OracleError::InvalidConfig("tolerance must lie in (0, 1)"))
        }
        _ => {}
    }

    let h = Hamiltonian::new(target, drives, config);

    // integration span covering every (possibly delayed) pulse
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 0.0;
    for d in drives {
        let delay = if config.include_delays { d.delay } else { 0.0 };
        t0 = t0.min(delay);
        t1 = t1.max(delay + d.envelope.duration);
    }
    let span = t1 - t0;
    if !(span > 0.0) {
        return Err(OracleError::InvalidConfig("all pulses have zero support"));
    }

    let mut psi: Amp = [Complex64::new(0.0, 0.0); 3];
    psi[0] = Complex64::new(1.0, 0.0);

    match config.step {
        StepControl::Auto | StepControl::Fixed(_) => {
            let dt_req = match config.step {
                StepControl::Fixed(dt) => dt,
                _ => 1.0 / (200.0 * h.max_frequency().max(1.0 / span)),
            };
            // resolve the envelope even for very weak drives
            let dt_target = dt_req.min(span / 1000.0);
            let steps = libm::ceil(span / dt_target) as usize;
            if steps > MAX_STEPS || steps == 0 {
                return Err(OracleError::StepUnderflow { step: dt_target, span });
            }
            let dt = span / steps as f64;
            for i in 0..steps {
                let t = t0 + i as f64 * dt;
                psi = rk4_step(&h, t, dt, &psi);
                accept_step(&mut psi, config.levels, i)?;
            }
        }
        StepControl::Adaptive(tol) => {
            let mut t = t0;
            let mut dt = span / 1000.0;
            let mut i = 0usize;
            while t < t1 {
                if i > MAX_STEPS {
                    return Err(OracleError::StepUnderflow { step: dt, span });
                }
                if t + dt > t1 {
                    dt = t1 - t;
                }
                // one full step vs two half steps
                let full = rk4_step(&h, t, dt, &psi);
                let half = rk4_step(&h, t, 0.5 * dt, &psi);
                let two_half = rk4_step(&h, t + 0.5 * dt, 0.5 * dt, &half);
                let mut err: f64 = 0.0;
                for n in 0..config.levels {
                    err += (full[n] - two_half[n]).norm_sqr();
                }
                let err = libm::sqrt(err) / 15.0;
                if err <= tol {
                    psi = two_half;
                    accept_step(&mut psi, config.levels, i)?;
                    t += dt;
                    if err < tol / 32.0 {
                        dt *= 2.0;
                    }
                } else {
                    dt *= 0.5;
                    if dt < span * 1e-12 {
                        return Err(OracleError::ToleranceUnreachable {
                            time: t,
                            error_estimate: err,
                        });
                    }
                }
                i += 1;
            }
        }
    }

    Ok(StateVector {
        amplitudes: psi[..config.levels].to_vec(),
    })
}

/// Pauli expectations on levels {0, 1} plus the leakage population.
pub fn expectation_xyz(state: &StateVector) -> BlochExpectations {
    let c0 = state.amplitudes[0];
    let c1 = if state.amplitudes.len() > 1 {
        state.amplitudes[1]
    } else {
        Complex64::new(0.0, 0.0)
    };
    let p0 = c0.norm_sqr();
    let p1 = c1.norm_sqr();
    let cross = c0.conj() * c1;
    BlochExpectations {
        x: 2.0 * cross.re,
        y: -2.0 * cross.im,
        z: p0 - p1,
        leakage: (1.0 - p0 - p1).max(0.0),
    }
}

/// Sweep the software phase retardation `delta_phi` applied to every
/// secondary drive (`drives[1..]`) and return the noiseless `<Z>` per grid
/// point. Mirrors the simultaneous-Rabi circuit: the primary pulse is fixed
/// while each secondary is virtually Z-rotated by `delta_phi`.
pub fn rabi_curve(
    target: &TransmonParams,
    drives: &[DriveTermInstance],
    config: &SimulationConfig,
    delta_phi_grid: &[f64],
) -> Result<Vec<f64>, OracleError> {
    if delta_phi_grid.is_empty() {
        return Err(OracleError::InvalidConfig("delta_phi grid must be nonempty"));
    }
    let mut out = Vec::with_capacity(delta_phi_grid.len());
    let mut shifted = drives.to_vec();
    for &dphi in delta_phi_grid {
        for (k, d) in shifted.iter_mut().enumerate() {
            d.phi = if k == 0 { drives[k].phi } else { drives[k].phi - dphi };
        }
        let state = evolve_target(target, &shifted, config)?;
        out.push(expectation_xyz(&state).z);
    }
    Ok(out)
}
