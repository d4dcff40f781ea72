//! Scalar diagnostics: the non-unitarity parameter η, Euclidean distance
//! and fidelity between states, the analytic bounds D_max / F_min, and the
//! one-parameter linear error model with its least-squares fit.

use crate::linalg::{LinalgError, Matrix, StateVector, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("sin 3θ = 0: bound is singular at θ = {0}")]
    SingularAngle(f64),
    #[error("fit needs at least two samples with η > 0")]
    Unidentifiable,
    #[error("fidelity sample {0} outside (0, 1]")]
    BadFidelity(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Per-point record of an amplification sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionRecord {
    pub eta: f64,
    pub k: usize,
    pub probability: f64,
    pub distance: f64,
    pub fidelity: f64,
}

/// Fitted slope of the linear error model plus its RMS residual in
/// fidelity space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModelFit {
    pub c: f64,
    pub residual: f64,
}

/// Non-unitarity η = ‖V†V − I‖. When `alpha_norm` is given, V = A/alpha_norm;
/// otherwise V = A directly (the convention of the reference sweeps).
pub fn eta(a: &Matrix, alpha_norm: Option<f64>) -> Result<f64, MetricsError> {
    let v = match alpha_norm {
        Some(s) => a.scale(C64::new(1.0 / s, 0.0)),
        None => a.clone(),
    };
    let gram = &v.adjoint() * &v;
    Ok(gram.sub(&Matrix::identity(a.rows())).spectral_norm()?)
}

/// D(β, ω) = √(2(1 − |⟨β|ω⟩|)), global-phase-invariant, in [0, √2].
pub fn euclidean_distance(beta: &StateVector, omega: &StateVector) -> f64 {
    let overlap = beta.overlap_abs(omega).min(1.0);
    (2.0 * (1.0 - overlap)).max(0.0).sqrt()
}

/// F(β, ω) = |⟨β|ω⟩|².
pub fn fidelity(beta: &StateVector, omega: &StateVector) -> f64 {
    beta.overlap_abs(omega).min(1.0).powi(2)
}

fn bound_coefficient(theta: f64) -> Result<f64, MetricsError> {
    let s3 = (3.0 * theta).sin();
    if s3.abs() < 1e-14 {
        return Err(MetricsError::SingularAngle(theta));
    }
    Ok(4.0 * theta.sin() * theta.cos().powi(2) / s3)
}

/// Upper bound on the one-iteration Euclidean distance.
pub fn d_max(theta: f64, eta: f64) -> Result<f64, MetricsError> {
    let x = bound_coefficient(theta)? * eta;
    Ok((2.0 * (1.0 - 1.0 / (1.0 + x * x).sqrt())).sqrt())
}

/// Lower bound on the one-iteration fidelity.
pub fn f_min(theta: f64, eta: f64) -> Result<f64, MetricsError> {
    let x = bound_coefficient(theta)? * eta;
    Ok(1.0 / (1.0 + x * x))
}

/// Linear error model prediction: |ω⟩ = (|β⟩ + cη|β⊥⟩)/√(1+(cη)²) gives
/// D = √(2(1 − 1/√(1+(cη)²))) and F = 1/(1+(cη)²).
pub fn model_predict(c: f64, eta: f64) -> (f64, f64) {
    let x = c * eta;
    let f = 1.0 / (1.0 + x * x);
    let d = (2.0 * (1.0 - f.sqrt())).sqrt();
    (d, f)
}

/// Least-squares fit of c on the linearized form √(1/F − 1) = cη. The
/// residual is the RMS error of the reconstructed fidelities.
pub fn fit_c(samples: &[(f64, f64)]) -> Result<ErrorModelFit, MetricsError> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut used = 0usize;
    for &(eta, f) in samples {
        if !(f > 0.0 && f <= 1.0 + 1e-12) {
            return Err(MetricsError::BadFidelity(f));
        }
        if eta <= 0.0 {
            continue;
        }
        let y = (1.0 / f.min(1.0) - 1.0).max(0.0).sqrt();
        num += eta * y;
        den += eta * eta;
        used += 1;
    }
    if used < 2 {
        // all-fidelity-one data is still identifiable: c = 0
        let all_perfect = samples.iter().all(|&(_, f)| (f - 1.0).abs() <= 1e-12);
        if !(all_perfect && !samples.is_empty()) {
            return Err(MetricsError::Unidentifiable);
        }
    }
    let c = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
    let mse: f64 = samples
        .iter()
        .map(|&(eta, f)| {
            let (_, f_pred) = model_predict(c, eta.max(0.0));
            (f_pred - f).powi(2)
        })
        .sum::<f64>()
        / samples.len() as f64;
    Ok(ErrorModelFit {
        c,
        residual: mse.sqrt(),
    })
}
