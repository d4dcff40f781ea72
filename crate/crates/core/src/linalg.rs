//! Dense complex linear algebra: matrices, state vectors, tensor products,
//! norms and Haar-random state sampling. Everything else in the crate is
//! built on top of these carriers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Normalization tolerance for states flagged as normalized.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
}

/// Dense complex matrix, row-major in its semantic indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    inner: DMatrix<C64>,
}

impl Matrix {
    pub fn from_inner(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_inner(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_inner(DMatrix::identity(n, n))
    }

    /// Build from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Self::from_inner(DMatrix::from_fn(rows, cols, f))
    }

    /// Build from real entries in row-major order.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let nr = rows.len();
        let nc = if nr > 0 { rows[0].len() } else { 0 };
        Self::from_fn(nr, nc, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.inner[(i, j)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Matrix product.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols() != other.rows() {
            return Err(LinalgError::DimMismatch(format!(
                "matmul: {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Matrix::from_inner(&self.inner * &other.inner))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_inner(self.inner.adjoint())
    }

    /// Tensor product with `self`'s indices most significant.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix::from_inner(self.inner.kronecker(&other.inner))
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix::from_inner(&self.inner * s)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix::from_inner(&self.inner + &other.inner)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix::from_inner(&self.inner - &other.inner)
    }

    /// Largest singular value, computed as the square root of the largest
    /// eigenvalue of the Hermitian product M†M.
    pub fn spectral_norm(&self) -> Result<f64, LinalgError> {
        if !self.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        if self.rows() == 0 || self.cols() == 0 {
            return Ok(0.0);
        }
        let gram = self.inner.adjoint() * &self.inner;
        let eig = nalgebra::SymmetricEigen::new(gram);
        let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        Ok(max.max(0.0).sqrt())
    }

    /// ‖U†U − I‖ in the spectral norm.
    pub fn unitarity_error(&self) -> Result<f64, LinalgError> {
        let n = self.cols();
        let gram = Matrix::from_inner(self.inner.adjoint() * &self.inner);
        gram.sub(&Matrix::identity(n)).spectral_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.rows() == self.cols() && self.unitarity_error().map(|e| e <= tol).unwrap_or(false)
    }

    pub fn try_inverse(&self) -> Option<Matrix> {
        self.inner.clone().try_inverse().map(Matrix::from_inner)
    }

    /// Apply to a state vector.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector, LinalgError> {
        if self.cols() != v.dim() {
            return Err(LinalgError::DimMismatch(format!(
                "apply: {}x{} to dim {}",
                self.rows(),
                self.cols(),
                v.dim()
            )));
        }
        Ok(StateVector::from_inner(&self.inner * v.inner()))
    }

    /// Hermitian square root of a positive semidefinite matrix. Eigenvalues
    /// in [-neg_tol, 0) are clipped to zero; anything lower is rejected.
    pub fn psd_sqrt(&self, neg_tol: f64) -> Result<Matrix, LinalgError> {
        let eig = nalgebra::SymmetricEigen::new(self.inner.clone());
        let n = self.rows();
        let mut d = DMatrix::<C64>::zeros(n, n);
        for (i, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev < -neg_tol {
                return Err(LinalgError::DimMismatch(format!(
                    "matrix is not positive semidefinite (eigenvalue {ev})"
                )));
            }
            d[(i, i)] = C64::new(ev.max(0.0).sqrt(), 0.0);
        }
        let q = eig.eigenvectors;
        Ok(Matrix::from_inner(&q * d * q.adjoint()))
    }
}

impl std::ops::Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matmul dimension mismatch")
    }
}

/// Cyclic shift on N grid points: C·e_j = e_{(j+1) mod N}. Unitary, C^N = I.
pub fn cyclic_shift(n_dim: usize) -> Matrix {
    assert!(n_dim >= 2, "cyclic shift needs dimension >= 2");
    Matrix::from_fn(n_dim, n_dim, |i, j| {
        if i == (j + 1) % n_dim {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    inner: DVector<C64>,
}

impl StateVector {
    pub fn from_inner(inner: DVector<C64>) -> Self {
        Self { inner }
    }

    pub fn from_slice(amps: &[C64]) -> Self {
        Self::from_inner(DVector::from_column_slice(amps))
    }

    pub fn inner(&self) -> &DVector<C64> {
        &self.inner
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_inner(DVector::zeros(dim))
    }

    /// Computational basis state e_index.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::from_inner(v)
    }

    /// Uniform superposition 1/√dim (1, …, 1).
    pub fn uniform(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self::from_inner(DVector::from_element(dim, a))
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn get(&self, i: usize) -> C64 {
        self.inner[i]
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalize(&self) -> Result<StateVector, LinalgError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(LinalgError::ZeroNorm);
        }
        Ok(StateVector::from_inner(&self.inner / C64::new(n, 0.0)))
    }

    /// ⟨self|other⟩ with the left argument conjugated.
    pub fn inner_product(&self, other: &StateVector) -> C64 {
        self.inner.dotc(&other.inner)
    }

    /// |⟨self|other⟩|, the global-phase-invariant overlap.
    pub fn overlap_abs(&self, other: &StateVector) -> f64 {
        self.inner_product(other).norm()
    }

    pub fn scale(&self, s: C64) -> StateVector {
        StateVector::from_inner(&self.inner * s)
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        StateVector::from_inner(&self.inner + &other.inner)
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        StateVector::from_inner(&self.inner - &other.inner)
    }

    /// Tensor product |self⟩⊗|other⟩ with `self` most significant.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector::from_inner(self.inner.kronecker(&other.inner))
    }
}

/// Seed for deterministic sampling. Identical seed gives an identical
/// sample sequence independent of execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// Derive a per-item seed for order-independent ensembles.
    pub fn derive(&self, index: u64) -> RandomSeed {
        RandomSeed(self.0.wrapping_add(index))
    }
}

/// Haar-random state on the unit sphere: i.i.d. standard complex Gaussian
/// components, then normalized. Rotation invariance follows from the
/// unitary invariance of the Gaussian measure.
pub fn haar_state(n_dim: usize, seed: RandomSeed) -> StateVector {
    assert!(n_dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut amps = Vec::with_capacity(n_dim);
    for _ in 0..n_dim {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        amps.push(C64::new(re, im));
    }
    StateVector::from_slice(&amps)
        .normalize()
        .expect("Gaussian vector is nonzero with probability one")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn matmul_identity_and_zero() {
        let m = Matrix::from_fn(4, 4, |i, j| C64::new((i * 4 + j) as f64, 0.3));
        let id = Matrix::identity(4);
        assert_eq!(id.matmul(&m).unwrap(), m);
        let z = Matrix::zeros(4, 4);
        assert_eq!(m.matmul(&z).unwrap(), z);
    }

    #[test]
    fn matmul_dim_mismatch() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        assert!(a.matmul(&b).is_err());
    }

    #[test]
    fn shift_period_equals_dimension() {
        let c = cyclic_shift(4);
        let c4 = &(&(&c * &c) * &c) * &c;
        let err = c4.sub(&Matrix::identity(4)).spectral_norm().unwrap();
        approx(err, 0.0, 1e-14);
    }

    #[test]
    fn shift_is_pauli_x_for_two_dims() {
        let c = cyclic_shift(2);
        assert_eq!(c.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(c.get(1, 0), C64::new(1.0, 0.0));
        assert_eq!(c.get(0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn shift_moves_basis_vector() {
        let c = cyclic_shift(4);
        let e0 = StateVector::basis(4, 0);
        let e1 = c.apply(&e0).unwrap();
        assert_eq!(e1, StateVector::basis(4, 1));
    }

    #[test]
    fn shift_unitary() {
        let c = cyclic_shift(16);
        assert!(c.unitarity_error().unwrap() <= 1e-14);
    }

    #[test]
    fn adjoint_basics() {
        let m = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 5.0]]);
        assert_eq!(m.adjoint(), m);
        let ii = Matrix::identity(2).scale(C64::new(0.0, 1.0));
        assert_eq!(ii.adjoint(), Matrix::identity(2).scale(C64::new(0.0, -1.0)));
    }

    #[test]
    fn adjoint_reverses_products() {
        let a = random_matrix(4, 7);
        let b = random_matrix(4, 13);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        approx(lhs.sub(&rhs).spectral_norm().unwrap(), 0.0, 1e-13);
    }

    #[test]
    fn kron_identities() {
        let i2 = Matrix::identity(2);
        assert_eq!(i2.kron(&i2), Matrix::identity(4));
        // |0⟩⟨0| ⊗ I₂ = diag(1,1,0,0)
        let p0 = Matrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let proj = p0.kron(&i2);
        for i in 0..4 {
            let expect = if i < 2 { 1.0 } else { 0.0 };
            approx(proj.get(i, i).re, expect, 0.0);
        }
    }

    fn random_matrix(n: usize, seed: u64) -> Matrix {
        let v = haar_state(n * n, RandomSeed(seed));
        Matrix::from_fn(n, n, |i, j| v.get(i * n + j))
    }

    #[test]
    fn kron_mixed_product() {
        let (a, b, c, d) = (
            random_matrix(2, 1),
            random_matrix(2, 2),
            random_matrix(2, 3),
            random_matrix(2, 4),
        );
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        approx(lhs.sub(&rhs).spectral_norm().unwrap(), 0.0, 1e-13);
    }

    #[test]
    fn spectral_norm_basics() {
        approx(Matrix::identity(5).spectral_norm().unwrap(), 1.0, 1e-12);
        let d = Matrix::from_real_rows(&[vec![0.5, 0.0], vec![0.0, -2.0]]);
        approx(d.spectral_norm().unwrap(), 2.0, 1e-12);
    }

    #[test]
    fn spectral_norm_circulant_matches_dft_oracle() {
        // banded circulant a0 I + a1 C† + a2 C has eigenvalues
        // a0 + a1 ω^j + a2 ω^{-j}
        let n = 16usize;
        let (a0, a1, a2) = (0.97, -0.44, 0.46);
        let c = cyclic_shift(n);
        let m = Matrix::identity(n)
            .scale(C64::new(a0, 0.0))
            .add(&c.adjoint().scale(C64::new(a1, 0.0)))
            .add(&c.scale(C64::new(a2, 0.0)));
        let oracle = (0..n)
            .map(|j| {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                let w = C64::from_polar(1.0, phi);
                (C64::new(a0, 0.0) + w * a1 + w.conj() * a2).norm()
            })
            .fold(0.0f64, f64::max);
        approx(m.spectral_norm().unwrap(), oracle, 1e-10);
    }

    #[test]
    fn spectral_norm_rejects_non_finite() {
        let mut m = Matrix::identity(2);
        m.set(0, 0, C64::new(f64::NAN, 0.0));
        assert!(m.spectral_norm().is_err());
    }

    #[test]
    fn haar_state_normalized_and_deterministic() {
        let v = haar_state(8, RandomSeed(42));
        approx(v.norm(), 1.0, 1e-12);
        assert_eq!(v, haar_state(8, RandomSeed(42)));
        assert_ne!(v, haar_state(8, RandomSeed(43)));
    }

    #[test]
    fn haar_state_component_symmetry() {
        let samples = 10_000;
        let mean: f64 = (0..samples)
            .map(|i| haar_state(4, RandomSeed(1000 + i)).get(0).norm_sqr())
            .sum::<f64>()
            / samples as f64;
        approx(mean, 0.25, 0.01);
    }

    #[test]
    fn normalize_zero_vector_fails() {
        assert!(StateVector::zeros(4).normalize().is_err());
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = random_matrix(4, 99);
        let gram = &a.adjoint() * &a; // Hermitian PSD
        let s = gram.psd_sqrt(1e-14).unwrap();
        approx((&s * &s).sub(&gram).spectral_norm().unwrap(), 0.0, 1e-12);
    }
}
