use num_complex::Complex64;

use super::eigen::{hermitian_eig, hermitian_eigenvalues, SpectralData};
use super::matrix::ComplexMatrix;
use crate::config::ToleranceConfig;
use crate::error::{GateauxError, Result};

/// Orthonormal basis of the top eigenspace of `A*A`, i.e. the unit
/// vectors on which `A` attains its norm.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEigenspace {
    /// `n x k`, orthonormal columns.
    pub basis: ComplexMatrix,
    pub dim_k: usize,
    /// `|A|`.
    pub op_norm: f64,
    /// `|A|^2`, the largest eigenvalue of `A*A`.
    pub lambda_max: f64,
}

impl MaxEigenspace {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.basis.column(j)
    }

    /// Orthogonal projector `U U*` onto the eigenspace.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * &self.basis.adjoint()
    }

    /// Lifts a `k x k` matrix to ambient coordinates: `U X U*`.
    pub fn lift(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis * x) * &self.basis.adjoint()
    }

    pub fn lift_vector(&self, w: &[Complex64]) -> Vec<Complex64> {
        self.basis.mul_vec(w)
    }
}

/// Spectral norm `sqrt(lambda_max(A*A))`. The zero matrix has norm 0.
pub fn operator_norm(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    if a.is_zero() {
        return Ok(0.0);
    }
    let gram = a.adjoint_mul(a);
    let eig = hermitian_eigenvalues(&gram, tol)?;
    Ok(eig[0].max(0.0).sqrt())
}

/// Full spectral data of `A*A`.
pub fn gram_spectrum(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SpectralData> {
    hermitian_eig(&a.adjoint_mul(a), tol)
}

/// Eigenspace of `A*A` for eigenvalues `lambda >= lambda_max (1 - cluster_rel)`.
pub fn max_eigenspace(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<MaxEigenspace> {
    if a.is_zero() {
        return Err(GateauxError::ZeroMatrix);
    }
    let spectrum = gram_spectrum(a, tol)?;
    max_eigenspace_from_spectrum(&spectrum, tol)
}

pub(crate) fn max_eigenspace_from_spectrum(
    spectrum: &SpectralData,
    tol: &ToleranceConfig,
) -> Result<MaxEigenspace> {
    let lambda_max = spectrum.lambda_max();
    if lambda_max <= 0.0 {
        return Err(GateauxError::ZeroMatrix);
    }
    let cut = lambda_max * (1.0 - tol.cluster_rel);
    let dim_k = spectrum.eigenvalues.iter().take_while(|&&l| l >= cut).count();
    let n = spectrum.dim();
    let columns: Vec<Vec<Complex64>> = (0..dim_k).map(|j| spectrum.vector(j)).collect();
    Ok(MaxEigenspace {
        basis: ComplexMatrix::from_columns(n, &columns),
        dim_k,
        op_norm: lambda_max.sqrt(),
        lambda_max,
    })
}

/// Compression `U* M U` of `M` to the eigenspace.
pub fn compress(m: &ComplexMatrix, space: &MaxEigenspace) -> Result<ComplexMatrix> {
    let n = space.basis.rows();
    if m.shape() != (n, n) {
        return Err(GateauxError::DimensionMismatch(format!(
            "compression needs a {n}x{n} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.congruence(&space.basis))
}
