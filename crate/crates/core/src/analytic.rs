//! Closed-form expectation values for a resonantly driven two-level qubit
//! whose drive is corrupted by one or more crosstalk tones.
//!
//! All tones share the primary drive frequency, so in the rotating frame the
//! intended drive and the crosstalk terms add coherently into a single
//! effective drive with amplitude scale `eta`. The measured Z expectation
//! after a pulse of area `Omega_hat` is then `cos(Omega_hat * eta)`.
//!
//! Phase convention: the swept software phase `delta_phi` retards the
//! secondary drive, so a single crosstalk tone enters through
//! `cos(delta_phi - theta)` and the Z curve is symmetric about
//! `delta_phi = theta`.

use alloc::vec::Vec;

/// Pairwise drive specification: one intended drive on the measured qubit
/// plus one crosstalk tone of relative strength `beta` and phase `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseDriveSpec {
    pub beta: f64,
    pub theta: f64,
    /// Software phase of the intended (primary) drive.
    pub phi_a: f64,
    /// Software phase of the crosstalk source drive.
    pub phi_b: f64,
    /// Integrated pulse area `Omega_hat`, radians.
    pub rotation_angle: f64,
}

/// Multi-drive specification: the intended drive plus any number of
/// crosstalk tones `(beta_k, theta_k)`, all retarded by the common swept
/// phase `delta_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDriveSpec {
    pub rotation_angle: f64,
    pub terms: Vec<(f64, f64)>,
    pub delta_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticError {
    NegativeBeta,
}

impl core::fmt::Display for AnalyticError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AnalyticError::NegativeBeta => write!(f, "crosstalk strength beta must be nonnegative"),
        }
    }
}

/// Effective drive scale for a single crosstalk tone:
/// `sqrt(1 + beta^2 + 2*beta*cos(delta_phi - theta))`.
pub fn eta_pair(beta: f64, theta: f64, delta_phi: f64) -> Result<f64, AnalyticError> {
    if beta < 0.0 {
        return Err(AnalyticError::NegativeBeta);
    }
    let s = 1.0 + beta * beta + 2.0 * beta * libm::cos(delta_phi - theta);
    // s can dip infinitesimally below zero at full destructive interference
    Ok(libm::sqrt(s.max(0.0)))
}

/// Weak-crosstalk approximation of [`eta_pair`]:
/// `1 + beta*cos(delta_phi - theta)`.
pub fn eta_weak(beta: f64, theta: f64, delta_phi: f64) -> Result<f64, AnalyticError> {
    if beta < 0.0 {
        return Err(AnalyticError::NegativeBeta);
    }
    Ok(1.0 + beta * libm::cos(delta_phi - theta))
}

/// `sin(x)/x`, series-evaluated below |x| = 1e-4 where the direct quotient
/// loses accuracy.
fn sinc(x: f64) -> f64 {
    if libm::fabs(x) < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        libm::sin(x) / x
    }
}

/// Bloch-vector expectations `(<X>, <Y>, <Z>)` after a pairwise-corrupted
/// pulse, with the swept phase `delta_phi` retarding the secondary drive.
///
/// The operator convention is `X = |0><1| + |1><0|`, `Y = i(|0><1| - |1><0|)`
/// and `Z = |0><0| - |1><1|`; the qubit starts in `|0>`.
pub fn pair_expectations(
    spec: &PairwiseDriveSpec,
    delta_phi: f64,
) -> Result<(f64, f64, f64), AnalyticError> {
    if spec.beta < 0.0 {
        return Err(AnalyticError::NegativeBeta);
    }
    // effective secondary phase after the virtual-Z retardation
    let phi_b_eff = spec.phi_b - delta_phi;
    let dphi_ab = spec.phi_a - phi_b_eff;
    let eta = eta_pair(spec.beta, spec.theta, dphi_ab)?;
    let omega = spec.rotation_angle;
    // sin(eta*Omega)/eta = Omega * sinc(eta*Omega)
    let envelope = omega * sinc(eta * omega);
    let x = (libm::sin(spec.phi_a) + spec.beta * libm::sin(spec.theta + phi_b_eff)) * envelope;
    let y = (libm::cos(spec.phi_a) + spec.beta * libm::cos(spec.theta + phi_b_eff)) * envelope;
    let z = libm::cos(eta * omega);
    Ok((x, y, z))
}

/// Effective drive scale for any number of crosstalk tones: the coherent sum
/// `|1 + sum_k beta_k * exp(i*(delta_phi - theta_k))|`.
///
/// With one term this reduces to [`eta_pair`]; with two terms it expands to
/// `sqrt(1 + b^2 + c^2 + 2b*cos(dphi - tb) + 2c*cos(dphi - tc)
///  + 2bc*cos(tb - tc))`.
pub fn eta_multi(spec: &MultiDriveSpec) -> Result<f64, AnalyticError> {
    let mut re = 1.0;
    let mut im = 0.0;
    for &(beta, theta) in &spec.terms {
        if beta < 0.0 {
            return Err(AnalyticError::NegativeBeta);
        }
        re += beta * libm::cos(spec.delta_phi - theta);
        im += beta * libm::sin(spec.delta_phi - theta);
    }
    Ok(libm::sqrt(re * re + im * im))
}

/// Predicted Z expectation under simultaneous drives:
/// `cos(rotation_angle * eta_multi)`.
pub fn predict_z_multi(spec: &MultiDriveSpec) -> Result<f64, AnalyticError> {
    Ok(libm::cos(spec.rotation_angle * eta_multi(spec)?))
}
