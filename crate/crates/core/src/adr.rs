//! Discretized 1-D advection-diffusion-reaction model: Courant numbers,
//! CFL enforcement, the circulant explicit-Euler step matrix, the exact
//! classical stepper used as ground truth, and the advection-only estimate
//! consumed by the approximate reflection.

use crate::linalg::{LinalgError, Matrix, StateVector, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdrError {
    #[error("CFL violation: {constraint} (value {value}, bound {bound})")]
    CflViolation {
        constraint: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("Courant numbers must be non-negative, got {0}")]
    NegativeCourant(f64),
    #[error("grid spacing and time step must be positive")]
    NonPositiveStep,
    #[error("time scale must lie in (0, 1], got {0}")]
    BadTimeScale(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Dimensionless step parameters of the explicit scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdrParams {
    gamma_d: f64,
    gamma_a: f64,
    gamma_r: f64,
    n_qubits: u32,
}

impl AdrParams {
    /// Validates positivity and the CFL bounds γ_d ≤ 1/2, γ_a ≤ 1, γ_r ≤ 1.
    pub fn new(gamma_d: f64, gamma_a: f64, gamma_r: f64, n_qubits: u32) -> Result<Self, AdrError> {
        for &g in &[gamma_d, gamma_a, gamma_r] {
            if !(g >= 0.0) {
                return Err(AdrError::NegativeCourant(g));
            }
        }
        if gamma_d > 0.5 {
            return Err(AdrError::CflViolation {
                constraint: "gamma_d <= 1/2",
                value: gamma_d,
                bound: 0.5,
            });
        }
        if gamma_a > 1.0 {
            return Err(AdrError::CflViolation {
                constraint: "gamma_a <= 1",
                value: gamma_a,
                bound: 1.0,
            });
        }
        if gamma_r > 1.0 {
            return Err(AdrError::CflViolation {
                constraint: "gamma_r <= 1",
                value: gamma_r,
                bound: 1.0,
            });
        }
        Ok(Self {
            gamma_d,
            gamma_a,
            gamma_r,
            n_qubits,
        })
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// Grid size N = 2^n.
    pub fn grid_points(&self) -> usize {
        1usize << self.n_qubits
    }
}

/// Physical constants of the continuous problem plus discretization steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub diffusion: f64,
    pub velocity: f64,
    pub reaction: f64,
    pub dx: f64,
    pub dt: f64,
}

/// Uniform rescaling of the time step: multiplies all three Courant
/// numbers, which preserves CFL for t_scale in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScale(f64);

impl TimeScale {
    pub fn new(t: f64) -> Result<Self, AdrError> {
        if t > 0.0 && t <= 1.0 {
            Ok(Self(t))
        } else {
            Err(AdrError::BadTimeScale(t))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// (γ_d, γ_a, γ_r) = (Δt·D/Δx², Δt·U/Δx, a·Δt), CFL-checked.
pub fn courant_from_physical(p: &PhysicalParams, n_qubits: u32) -> Result<AdrParams, AdrError> {
    if p.dx <= 0.0 || p.dt <= 0.0 {
        return Err(AdrError::NonPositiveStep);
    }
    AdrParams::new(
        p.dt * p.diffusion / (p.dx * p.dx),
        p.dt * p.velocity / p.dx,
        p.reaction * p.dt,
        n_qubits,
    )
}

/// Stencil coefficients λ₀ = 1−2γ_d−γ_r, λ₁ = γ_d−γ_a/2, λ₂ = γ_d+γ_a/2.
pub fn lambdas(p: &AdrParams) -> (f64, f64, f64) {
    (
        1.0 - 2.0 * p.gamma_d - p.gamma_r,
        p.gamma_d - p.gamma_a / 2.0,
        p.gamma_d + p.gamma_a / 2.0,
    )
}

/// Banded circulant step matrix A = λ₀I + λ₁C† + λ₂C: λ₀ on the diagonal,
/// λ₁ on the superdiagonal and the bottom-left corner, λ₂ on the
/// subdiagonal and the top-right corner. For N = 2 the two off-diagonal
/// coefficients land on the same entry and accumulate.
pub fn build_adr_matrix(p: &AdrParams) -> Matrix {
    let n = p.grid_points();
    let (l0, l1, l2) = lambdas(p);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        let add = |m: &mut Matrix, r: usize, c: usize, v: f64| {
            let cur = m.get(r, c);
            m.set(r, c, cur + C64::new(v, 0.0));
        };
        add(&mut a, i, i, l0);
        add(&mut a, i, (i + 1) % n, l1);
        add(&mut a, i, (i + n - 1) % n, l2);
    }
    a
}

/// Multiply all Courant numbers by the time scale; as t_scale → 0 the step
/// matrix approaches the identity.
pub fn scale_time(p: &AdrParams, t: TimeScale) -> AdrParams {
    AdrParams {
        gamma_d: p.gamma_d * t.value(),
        gamma_a: p.gamma_a * t.value(),
        gamma_r: p.gamma_r * t.value(),
        n_qubits: p.n_qubits,
    }
}

/// A^steps · phi in ordinary floating point: the unnormalized ground truth.
pub fn classical_step(
    p: &AdrParams,
    phi: &StateVector,
    steps: usize,
) -> Result<StateVector, AdrError> {
    let n = p.grid_points();
    if phi.dim() != n {
        return Err(AdrError::Linalg(LinalgError::DimMismatch(format!(
            "state dim {} vs grid {}",
            phi.dim(),
            n
        ))));
    }
    let a = build_adr_matrix(p);
    let mut out = phi.clone();
    for _ in 0..steps {
        out = a.apply(&out)?;
    }
    Ok(out)
}

/// Normalized advection-only step: the cheap spatial-translation estimate
/// used to build the approximate reflection (γ_d = γ_r = 0, same γ_a).
pub fn advection_only_estimate(
    p: &AdrParams,
    phi: &StateVector,
) -> Result<StateVector, AdrError> {
    let adv = AdrParams {
        gamma_d: 0.0,
        gamma_a: p.gamma_a,
        gamma_r: 0.0,
        n_qubits: p.n_qubits,
    };
    let stepped = classical_step(&adv, phi, 1)?;
    Ok(stepped.normalize()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cyclic_shift, RandomSeed};

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn courant_formulas() {
        let p = PhysicalParams {
            diffusion: 1.0,
            velocity: 2.0,
            reaction: 3.0,
            dx: 1.0,
            dt: 0.1,
        };
        let c = courant_from_physical(&p, 4).unwrap();
        approx(c.gamma_d(), 0.1, 1e-15);
        approx(c.gamma_a(), 0.2, 1e-15);
        approx(c.gamma_r(), 0.3, 1e-15);

        let zero = PhysicalParams {
            diffusion: 0.0,
            velocity: 0.0,
            reaction: 0.0,
            dx: 1.0,
            dt: 0.1,
        };
        let c0 = courant_from_physical(&zero, 2).unwrap();
        assert_eq!((c0.gamma_d(), c0.gamma_a(), c0.gamma_r()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn cfl_violation_names_the_constraint() {
        let p = PhysicalParams {
            diffusion: 1.0,
            velocity: 0.0,
            reaction: 0.0,
            dx: 1.0,
            dt: 1.0,
        };
        match courant_from_physical(&p, 4) {
            Err(AdrError::CflViolation { constraint, .. }) => {
                assert_eq!(constraint, "gamma_d <= 1/2")
            }
            other => panic!("expected CFL error, got {other:?}"),
        }
    }

    #[test]
    fn lambda_values() {
        let p = AdrParams::new(0.0, 0.0, 0.0, 2).unwrap();
        assert_eq!(lambdas(&p), (1.0, 0.0, 0.0));

        let p = AdrParams::new(0.1, 0.1, 0.2, 2).unwrap();
        let (l0, l1, l2) = lambdas(&p);
        approx(l0, 0.6, 1e-15);
        approx(l1, 0.05, 1e-15);
        approx(l2, 0.15, 1e-15);

        let p = AdrParams::new(0.01, 0.9, 0.01, 4).unwrap();
        let (l0, l1, l2) = lambdas(&p);
        approx(l0, 0.97, 1e-15);
        approx(l1, -0.44, 1e-15);
        approx(l2, 0.46, 1e-15);
    }

    #[test]
    fn identity_dynamics() {
        let p = AdrParams::new(0.0, 0.0, 0.0, 3).unwrap();
        let a = build_adr_matrix(&p);
        approx(
            a.sub(&Matrix::identity(8)).spectral_norm().unwrap(),
            0.0,
            1e-15,
        );
        let phi = haar(8, 7);
        let out = classical_step(&p, &phi, 5).unwrap();
        approx(out.sub(&phi).norm(), 0.0, 1e-15);
    }

    fn haar(n: usize, seed: u64) -> StateVector {
        crate::linalg::haar_state(n, RandomSeed(seed))
    }

    #[test]
    fn matrix_layout_row_zero() {
        let p = AdrParams::new(0.1, 0.1, 0.2, 2).unwrap();
        let a = build_adr_matrix(&p);
        let row0: Vec<f64> = (0..4).map(|j| a.get(0, j).re).collect();
        let expect = [0.6, 0.05, 0.0, 0.15];
        for (got, want) in row0.iter().zip(expect) {
            approx(*got, want, 1e-15);
        }
    }

    #[test]
    fn commutes_with_shift() {
        let p = AdrParams::new(0.1, 0.3, 0.2, 4).unwrap();
        let a = build_adr_matrix(&p);
        let c = cyclic_shift(16);
        let comm = (&a * &c).sub(&(&c * &a));
        approx(comm.spectral_norm().unwrap(), 0.0, 1e-13);
    }

    #[test]
    fn row_sums_equal_one_minus_gamma_r() {
        let p = AdrParams::new(0.2, 0.7, 0.35, 3).unwrap();
        let a = build_adr_matrix(&p);
        for i in 0..8 {
            let s: f64 = (0..8).map(|j| a.get(i, j).re).sum();
            approx(s, 1.0 - 0.35, 1e-13);
        }
    }

    #[test]
    fn circulant_spectrum_matches_dft_reconstruction() {
        let p = AdrParams::new(0.01, 0.9, 0.01, 4).unwrap();
        let a = build_adr_matrix(&p);
        let (l0, l1, l2) = lambdas(&p);
        let n = 16;
        // rebuild A from its DFT eigenvalues: A = F diag(μ) F†
        let f = Matrix::from_fn(n, n, |j, k| {
            C64::from_polar(
                1.0 / (n as f64).sqrt(),
                2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / n as f64,
            )
        });
        let mu = Matrix::from_fn(n, n, |j, k| {
            if j != k {
                return C64::new(0.0, 0.0);
            }
            // C f_j = ω^{-j} f_j for Fourier column f_j, so C† contributes ω^{+j}
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
            C64::new(l0, 0.0) + w * l1 + w.conj() * l2
        });
        let rebuilt = &(&f * &mu) * &f.adjoint();
        approx(rebuilt.sub(&a).spectral_norm().unwrap(), 0.0, 1e-12);
    }

    #[test]
    fn scale_time_behaviour() {
        let p = AdrParams::new(0.01, 0.9, 0.01, 4).unwrap();
        let same = scale_time(&p, TimeScale::new(1.0).unwrap());
        assert_eq!(same, p);
        let half = scale_time(&p, TimeScale::new(0.5).unwrap());
        approx(half.gamma_d(), 0.005, 1e-15);
        approx(half.gamma_a(), 0.45, 1e-15);
        approx(half.gamma_r(), 0.005, 1e-15);
        assert!(TimeScale::new(0.0).is_err());
        assert!(TimeScale::new(1.5).is_err());
    }

    #[test]
    fn step_matrix_approaches_identity_as_time_shrinks() {
        let p = AdrParams::new(0.01, 0.9, 0.01, 4).unwrap();
        let mut last = 0.0;
        for i in 1..=20 {
            let t = TimeScale::new(i as f64 / 20.0).unwrap();
            let a = build_adr_matrix(&scale_time(&p, t));
            let dist = a.sub(&Matrix::identity(16)).spectral_norm().unwrap();
            assert!(dist >= last - 1e-12, "‖A(t)−I‖ not monotone at t={t:?}");
            last = dist;
        }
    }

    #[test]
    fn reaction_only_decay() {
        let p = AdrParams::new(0.0, 0.0, 0.3, 3).unwrap();
        let out = classical_step(&p, &StateVector::basis(8, 0), 1).unwrap();
        approx(out.get(0).re, 0.7, 1e-15);
        approx(out.norm(), 0.7, 1e-15);
    }

    #[test]
    fn uniform_state_scales_by_row_sum() {
        let p = AdrParams::new(0.2, 0.6, 0.4, 3).unwrap();
        let u = StateVector::uniform(8);
        let out = classical_step(&p, &u, 1).unwrap();
        let rescaled = out.scale(C64::new(1.0 / 0.6, 0.0));
        approx(rescaled.sub(&u).norm(), 0.0, 1e-13);
    }

    #[test]
    fn zero_steps_is_identity() {
        let p = AdrParams::new(0.1, 0.5, 0.2, 3).unwrap();
        let phi = haar(8, 11);
        assert_eq!(classical_step(&p, &phi, 0).unwrap(), phi);
    }

    #[test]
    fn advection_estimate_translates_basis_state() {
        let p = AdrParams::new(0.25, 0.9, 0.5, 4).unwrap();
        let est = advection_only_estimate(&p, &StateVector::basis(16, 5)).unwrap();
        // normalize(e5 − 0.45 e4 + 0.45 e6)
        let norm = (1.0f64 + 2.0 * 0.45 * 0.45).sqrt();
        approx(est.get(5).re, 1.0 / norm, 1e-13);
        approx(est.get(4).re, -0.45 / norm, 1e-13);
        approx(est.get(6).re, 0.45 / norm, 1e-13);
        approx(est.norm(), 1.0, 1e-12);
    }

    #[test]
    fn advection_estimate_without_advection_is_identity() {
        let p = AdrParams::new(0.25, 0.0, 0.5, 3).unwrap();
        let phi = haar(8, 3);
        let est = advection_only_estimate(&p, &phi).unwrap();
        approx(est.sub(&phi).norm(), 0.0, 1e-12);
    }
}
