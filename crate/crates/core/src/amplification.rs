//! Amplification strategies applied to a block encoding: oblivious
//! amplitude amplification, the π/3 fixed-point recursion, the
//! approximate-reflection Grover variant, and the inverse-encoding (W)
//! variant, together with the analytic oracles for the distorted state.

use crate::encoding::{
    extend_with_ancillas, project_success, BlockEncoding, EncodingError, PostSelection,
};
use crate::linalg::{LinalgError, Matrix, StateVector, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmplificationError {
    #[error("encoded matrix is singular")]
    SingularMatrix,
    #[error("degenerate angle: cos θ = 0")]
    DegenerateAngle,
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which amplification strategy produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    None,
    Oaa,
    Pi3,
    ApproxReflection,
    WVariant,
}

impl Strategy {
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::Oaa => "oaa",
            Strategy::Pi3 => "pi3",
            Strategy::ApproxReflection => "approx-reflection",
            Strategy::WVariant => "w-variant",
        }
    }
}

/// Reflection (or π/3 phase) operators on the full register.
#[derive(Debug, Clone)]
pub enum ReflectionSpec {
    /// R = 2P − I about the ancilla-|0⟩ subspace.
    AboutAncillaZero,
    /// −R, the sign-flipped target reflection.
    NegatedAncillaZero,
    /// 2|φ⟩⟨φ| − I about a full-register state.
    AboutState(StateVector),
    /// I − (1−e^{iπ/3})|φ⟩⟨φ| on the source state.
    Pi3PhaseSource(StateVector),
    /// I − (1−e^{iπ/3})P on the ancilla-|0⟩ subspace.
    Pi3PhaseTarget,
}

impl ReflectionSpec {
    /// Materialize as a dense unitary on an (m_ancilla + n_system) register.
    pub fn build(&self, m_ancilla: u32, n_system: u32) -> Matrix {
        let sys = 1usize << n_system;
        let full = sys << m_ancilla;
        match self {
            ReflectionSpec::AboutAncillaZero => Matrix::from_fn(full, full, |i, j| {
                if i != j {
                    C64::new(0.0, 0.0)
                } else if i < sys {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(-1.0, 0.0)
                }
            }),
            ReflectionSpec::NegatedAncillaZero => ReflectionSpec::AboutAncillaZero
                .build(m_ancilla, n_system)
                .scale(C64::new(-1.0, 0.0)),
            ReflectionSpec::AboutState(phi) => {
                assert_eq!(phi.dim(), full);
                Matrix::from_fn(full, full, |i, j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    phi.get(i) * phi.get(j).conj() * 2.0 - C64::new(delta, 0.0)
                })
            }
            ReflectionSpec::Pi3PhaseSource(phi) => {
                assert_eq!(phi.dim(), full);
                let w = C64::new(1.0, 0.0) - C64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
                Matrix::from_fn(full, full, |i, j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    C64::new(delta, 0.0) - w * phi.get(i) * phi.get(j).conj()
                })
            }
            ReflectionSpec::Pi3PhaseTarget => {
                let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
                Matrix::from_fn(full, full, |i, j| {
                    if i != j {
                        C64::new(0.0, 0.0)
                    } else if i < sys {
                        w
                    } else {
                        C64::new(1.0, 0.0)
                    }
                })
            }
        }
    }
}

/// One entry of an amplification trace: the pre-projection register state
/// after k iterations, and its post-selection.
#[derive(Debug, Clone)]
pub struct OaaIterate {
    pub k: usize,
    pub full_state: StateVector,
    pub post: PostSelection,
}

/// Trace of a strategy, indexed from k = 0 (no amplification), plus the
/// classical reference state β = Aψ/‖Aψ‖.
#[derive(Debug, Clone)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub trace: Vec<OaaIterate>,
    pub exact_reference: StateVector,
}

/// The OAA iteration operator S = −U R U† R.
pub fn build_s(be: &BlockEncoding) -> Matrix {
    let r = ReflectionSpec::AboutAncillaZero.build(be.m_ancilla(), be.n_system());
    let u = be.unitary();
    let s = &(&(u * &r) * &u.adjoint()) * &r;
    s.scale(C64::new(-1.0, 0.0))
}

fn exact_reference(be: &BlockEncoding, psi: &StateVector) -> Result<StateVector, AmplificationError> {
    Ok(be.encoded_matrix().apply(psi)?.normalize()?)
}

fn trace_from_iteration(
    be: &BlockEncoding,
    psi: &StateVector,
    step: &Matrix,
    k_max: usize,
    strategy: Strategy,
) -> Result<StrategyReport, AmplificationError> {
    let mut full = be.apply(psi)?;
    let mut trace = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            full = step.apply(&full)?;
        }
        let post = project_success(&full, be.m_ancilla())?;
        trace.push(OaaIterate {
            k,
            full_state: full.clone(),
            post,
        });
    }
    Ok(StrategyReport {
        strategy,
        trace,
        exact_reference: exact_reference(be, psi)?,
    })
}

/// Run k_max iterations of S after U, recording each post-selection.
pub fn oaa_run(
    be: &BlockEncoding,
    psi: &StateVector,
    k_max: usize,
) -> Result<StrategyReport, AmplificationError> {
    let s = build_s(be);
    trace_from_iteration(be, psi, &s, k_max, Strategy::Oaa)
}

/// As [`oaa_run`], but reusing a prebuilt step operator; avoids rebuilding
/// S when sweeping many states against one encoding.
pub fn oaa_run_with(
    be: &BlockEncoding,
    s: &Matrix,
    psi: &StateVector,
    k_max: usize,
) -> Result<StrategyReport, AmplificationError> {
    trace_from_iteration(be, psi, s, k_max, Strategy::Oaa)
}

/// Exact one-step OAA oracle: ((3/s)V − (4/s³)VV†V)ψ with V = A, s = α.
/// Unnormalized; the identity P S U P = |0⟩⟨0| ⊗ (3A/α − 4AA†A/α³) holds
/// for every α, not only near 2.
pub fn modstate_oracle(
    a: &Matrix,
    alpha: f64,
    psi: &StateVector,
) -> Result<StateVector, AmplificationError> {
    let v_psi = a.apply(psi)?;
    let vvv_psi = a.apply(&a.adjoint().apply(&v_psi)?)?;
    Ok(v_psi
        .scale(C64::new(3.0 / alpha, 0.0))
        .sub(&vvv_psi.scale(C64::new(4.0 / alpha.powi(3), 0.0))))
}

struct AngleDecomposition {
    theta: f64,
    /// |Φ⟩ = |0⟩ ⊗ Aψ/‖Aψ‖
    phi: StateVector,
    /// |Φ⊥⟩ = (U|Ψ⟩ − sinθ|Φ⟩)/cosθ
    phi_perp: StateVector,
    /// |Φ_ε⟩ = |0⟩ ⊗ (V†)⁻¹ψ with V = A/(α sinθ)
    phi_eps: StateVector,
}

fn angle_decomposition(
    be: &BlockEncoding,
    psi: &StateVector,
) -> Result<AngleDecomposition, AmplificationError> {
    let theta = be.theta_of(psi)?;
    let (sin_t, cos_t) = (theta.sin(), theta.cos());
    if cos_t.abs() < 1e-14 {
        return Err(AmplificationError::DegenerateAngle);
    }
    let a_psi = be.encoded_matrix().apply(psi)?;
    let phi_sys = a_psi.normalize()?;
    let phi = extend_with_ancillas(&phi_sys, be.m_ancilla());
    let u_psi = be.apply(psi)?;
    let phi_perp = u_psi
        .sub(&phi.scale(C64::new(sin_t, 0.0)))
        .scale(C64::new(1.0 / cos_t, 0.0));
    // (V†)⁻¹ψ = α sinθ (A†)⁻¹ψ
    let a_adj_inv = be
        .encoded_matrix()
        .adjoint()
        .try_inverse()
        .ok_or(AmplificationError::SingularMatrix)?;
    let eps_sys = a_adj_inv
        .apply(psi)?
        .scale(C64::new(be.alpha() * sin_t, 0.0));
    let phi_eps = extend_with_ancillas(&eps_sys, be.m_ancilla());
    Ok(AngleDecomposition {
        theta,
        phi,
        phi_perp,
        phi_eps,
    })
}

/// The state |Ψ⊥_true⟩ = U†(cosθ|Φ_ε⟩ − sinθ|Φ⊥⟩), exactly orthogonal to
/// |Ψ⟩ = |0⟩⊗ψ even for non-unitary A (generally unnormalized).
pub fn true_orthogonal_state(
    be: &BlockEncoding,
    psi: &StateVector,
) -> Result<StateVector, AmplificationError> {
    let d = angle_decomposition(be, psi)?;
    let rhs = d
        .phi_eps
        .scale(C64::new(d.theta.cos(), 0.0))
        .sub(&d.phi_perp.scale(C64::new(d.theta.sin(), 0.0)));
    Ok(be.unitary().adjoint().apply(&rhs)?)
}

/// The naive orthogonal state U†(cosθ|Φ⟩ − sinθ|Φ⊥⟩), which loses
/// orthogonality to |Ψ⟩ when A is non-unitary.
pub fn naive_orthogonal_state(
    be: &BlockEncoding,
    psi: &StateVector,
) -> Result<StateVector, AmplificationError> {
    let d = angle_decomposition(be, psi)?;
    let rhs = d
        .phi
        .scale(C64::new(d.theta.cos(), 0.0))
        .sub(&d.phi_perp.scale(C64::new(d.theta.sin(), 0.0)));
    Ok(be.unitary().adjoint().apply(&rhs)?)
}

/// One-iteration approximate expansion
/// sin3θ|Φ⟩ + cos3θ|Φ⊥⟩ − 2sinθcos²θ(|ε⟩ + URU†|ε⟩) with
/// |ε⟩ = |Φ⟩ − |Φ_ε⟩. Returns the approximate full state for residual
/// comparison against S·U(|0⟩⊗ψ); exact when A is unitary.
pub fn appendix_expansion(
    be: &BlockEncoding,
    psi: &StateVector,
) -> Result<StateVector, AmplificationError> {
    let d = angle_decomposition(be, psi)?;
    let eps = d.phi.sub(&d.phi_eps);
    let r = ReflectionSpec::AboutAncillaZero.build(be.m_ancilla(), be.n_system());
    let u = be.unitary();
    let urut_eps = u.apply(&r.apply(&u.adjoint().apply(&eps)?)?)?;
    let coeff = 2.0 * d.theta.sin() * d.theta.cos().powi(2);
    Ok(d
        .phi
        .scale(C64::new((3.0 * d.theta).sin(), 0.0))
        .add(&d.phi_perp.scale(C64::new((3.0 * d.theta).cos(), 0.0)))
        .sub(&eps.add(&urut_eps).scale(C64::new(coeff, 0.0))))
}

/// π/3 fixed-point recursion V₀ = U, V_{m+1} = V_m S_s V_m† S_t V_m with
/// e^{iπ/3} phases on the source state and the target subspace. Requires
/// the initial state to be known. The failure probability cubes per level.
pub fn pi3_run(
    be: &BlockEncoding,
    psi: &StateVector,
    k_max: usize,
) -> Result<StrategyReport, AmplificationError> {
    let source = extend_with_ancillas(psi, be.m_ancilla());
    let s_source = ReflectionSpec::Pi3PhaseSource(source.clone()).build(be.m_ancilla(), be.n_system());
    let s_target = ReflectionSpec::Pi3PhaseTarget.build(be.m_ancilla(), be.n_system());
    let mut v = be.unitary().clone();
    let mut trace = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            v = &(&(&(&v * &s_source) * &v.adjoint()) * &s_target) * &v;
        }
        let full = v.apply(&source)?;
        let post = project_success(&full, be.m_ancilla())?;
        trace.push(OaaIterate {
            k,
            full_state: full,
            post,
        });
    }
    Ok(StrategyReport {
        strategy: Strategy::Pi3,
        trace,
        exact_reference: exact_reference(be, psi)?,
    })
}

/// Which register the approximate source reflection acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectionScope {
    /// Reflect about |0⟩⊗ψ̃ on the full register (default).
    #[default]
    FullRegister,
    /// Reflect about ψ̃ on the system register only.
    SystemOnly,
}

/// Approximate-reflection Grover iteration G̃ = U R̃_s U† R̃_t with
/// R̃_t = −R and R̃_s the reflection about the estimate ψ̃.
pub fn approx_reflection_run(
    be: &BlockEncoding,
    psi: &StateVector,
    psi_tilde: &StateVector,
    k_max: usize,
    scope: ReflectionScope,
) -> Result<StrategyReport, AmplificationError> {
    let r_s = match scope {
        ReflectionScope::FullRegister => {
            let s_tilde = extend_with_ancillas(psi_tilde, be.m_ancilla());
            ReflectionSpec::AboutState(s_tilde).build(be.m_ancilla(), be.n_system())
        }
        ReflectionScope::SystemOnly => {
            let sys = ReflectionSpec::AboutState(psi_tilde.clone()).build(0, be.n_system());
            Matrix::identity(1 << be.m_ancilla()).kron(&sys)
        }
    };
    let r_t = ReflectionSpec::NegatedAncillaZero.build(be.m_ancilla(), be.n_system());
    let u = be.unitary();
    let g = &(&(u * &r_s) * &u.adjoint()) * &r_t;
    trace_from_iteration(be, psi, &g, k_max, Strategy::ApproxReflection)
}

/// Inverse-encoding variant S̃ = −U R W R where W block-encodes A⁻¹.
/// Ancilla registers are padded to a common size before composing.
pub fn w_variant_run(
    be: &BlockEncoding,
    be_w: &BlockEncoding,
    psi: &StateVector,
    k_max: usize,
) -> Result<StrategyReport, AmplificationError> {
    let m = be.m_ancilla().max(be_w.m_ancilla());
    let u_p = be.pad_ancillas(m - be.m_ancilla())?;
    let w_p = be_w.pad_ancillas(m - be_w.m_ancilla())?;
    let r = ReflectionSpec::AboutAncillaZero.build(m, be.n_system());
    let s = (&(&(u_p.unitary() * &r) * w_p.unitary()) * &r).scale(C64::new(-1.0, 0.0));
    let mut report = trace_from_iteration(&u_p, psi, &s, k_max, Strategy::WVariant)?;
    report.exact_reference = exact_reference(be, psi)?;
    Ok(report)
}

/// Subnormalization for the inverse encoding: ‖A⁻¹‖ rounded up to the next
/// power of two.
pub fn w_alpha(a_inv: &Matrix) -> Result<f64, AmplificationError> {
    let norm = a_inv.spectral_norm()?;
    Ok(2.0f64.powi(norm.log2().ceil() as i32).max(1.0))
}
