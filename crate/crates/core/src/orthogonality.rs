//! Birkhoff-James orthogonality of a matrix to a direction or a subspace,
//! with certificates that can be checked without rerunning any solver.
//!
//! `A` is orthogonal to the span of `B_1..B_m` exactly when some density
//! matrix `T` supported on the top eigenspace `E` of `A*A` satisfies
//! `tr(A*B_j T) = 0` for every generator. In `E`-coordinates with
//! `C_j = U* A*B_j U` this is a feasibility problem over the `k x k`
//! spectrahedron with the real constraints `Herm(C_j)`, `Herm(i C_j)`.
//!
//! The subspace is given by a finite generating set; dependent generators
//! only add redundant constraints. The condition quantifies over the queried
//! subspace itself.

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::derivative::{min_phi_in, phi_gateaux};
use crate::error::{GateauxError, Result};
use crate::feasibility::{
    aggregate, spectrahedron_feasibility, split_constraints, SpectrahedronOutcome,
};
use crate::linalg::{
    compress, hermitian_eig, inner, max_eigenspace, vec_norm, ComplexMatrix,
    MaxEigenspace,
};

/// Absolute Hermitian and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Relative tolerance on `tr(A*A T) = |A|^2` and on `A*A u = |A|^2 u`.
pub const MAXIMIZER_REL_TOL: f64 = 1e-7;
/// Tolerance on pairwise orthonormality of decomposition vectors.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Positive semidefinite, trace-one matrix representing the state
/// `X -> tr(X T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    /// `k x k`, in top-eigenspace coordinates.
    pub mat: ComplexMatrix,
    /// `U mat U*` in ambient coordinates.
    pub ambient: Option<ComplexMatrix>,
}

impl DensityMatrix {
    /// Pairing `tr(X T)` against the ambient matrix (or `mat` when no lift is stored).
    pub fn pair(&self, x: &ComplexMatrix) -> Complex64 {
        let t = self.ambient.as_ref().unwrap_or(&self.mat);
        (x * t).trace()
    }
}

/// Checks Hermitian symmetry, unit trace and positive semidefiniteness.
pub fn check_density(t: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    if !t.is_square() {
        return Err(GateauxError::NotADensityMatrix(format!(
            "not square ({}x{})",
            t.rows(),
            t.cols()
        )));
    }
    let asym = (t - &t.adjoint()).frobenius_norm();
    if asym > DENSITY_TOL {
        return Err(GateauxError::NotADensityMatrix(format!(
            "Hermitian defect {asym:.3e}"
        )));
    }
    let trace = t.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(GateauxError::NotADensityMatrix(format!(
            "trace {} + {}i differs from 1",
            trace.re, trace.im
        )));
    }
    let lambda_min = hermitian_eig(&t.hermitian_part(), tol)?.lambda_min();
    if lambda_min < -tol.psd_tol {
        return Err(GateauxError::NotADensityMatrix(format!(
            "negative eigenvalue {lambda_min:.3e}"
        )));
    }
    Ok(())
}

/// `T = sum_j s_j u_j u_j*` with `s_j > 0`, `sum s_j = 1` and orthonormal
/// `u_j` in the top eigenspace of `A*A`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizerDecomposition {
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl MaximizerDecomposition {
    pub fn to_density(&self) -> ComplexMatrix {
        let n = self.vectors[0].len();
        let mut t = ComplexMatrix::zeros(n, n);
        for (s, u) in self.weights.iter().zip(&self.vectors) {
            t = &t + &ComplexMatrix::outer(u, u).scale_real(*s);
        }
        t
    }

    /// `sum_j s_j <A u_j, B u_j>`.
    pub fn pairing(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.vectors)
            .map(|(s, u)| inner(&a.mul_vec(u), &b.mul_vec(u)) * *s)
            .sum()
    }
}

/// Residuals of a witness against its defining conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub weight_sum_error: f64,
    pub min_weight: f64,
    /// `max_j |A*A u_j - |A|^2 u_j| / |A|^2`.
    pub eigen_residual: f64,
    pub orthonormality_error: f64,
    /// `max_i |sum_j s_j <A u_j, B_i u_j>|` over the generators.
    pub constraint_residual: f64,
    pub accepted: bool,
}

/// Angle and generator along which the norm strictly decreases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub phi: f64,
    pub direction_index: usize,
    /// `D_phi` along `e^{i phi} B_index`; negative.
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityVerdict {
    pub orthogonal: bool,
    /// Present iff orthogonal.
    pub witness: Option<MaximizerDecomposition>,
    pub violation: Option<Violation>,
    /// Coefficients `c` over the split constraints with `sum c_i H_i`
    /// positive definite.
    pub separation: Option<Vec<f64>>,
}

impl OrthogonalityVerdict {
    fn orthogonal(witness: MaximizerDecomposition) -> Self {
        Self {
            orthogonal: true,
            witness: Some(witness),
            violation: None,
            separation: None,
        }
    }

    /// Exactly one of the witness and the refutation is populated.
    pub fn is_well_formed(&self) -> bool {
        let refuted = self.violation.is_some() || self.separation.is_some();
        self.orthogonal == self.witness.is_some() && self.orthogonal != refuted
    }
}

fn check_generators(a: &ComplexMatrix, generators: &[ComplexMatrix]) -> Result<()> {
    if generators.is_empty() {
        return Err(GateauxError::EmptySubspace);
    }
    for (j, b) in generators.iter().enumerate() {
        a.check_same_shape(b, &format!("generator {j}"))?;
    }
    Ok(())
}

/// Compressions `U* A*B_j U` of every generator.
fn compressed_generators(
    space: &MaxEigenspace,
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
) -> Result<Vec<ComplexMatrix>> {
    generators.iter().map(|b| compress(&a.adjoint_mul(b), space)).collect()
}

/// The real Hermitian constraint matrices `H_i` for a subspace.
pub fn subspace_constraints(
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<Vec<ComplexMatrix>> {
    check_generators(a, generators)?;
    let space = max_eigenspace(a, tol)?;
    Ok(split_constraints(&compressed_generators(&space, a, generators)?))
}

/// Is `A` orthogonal to the single direction `B`?
///
/// Decided by the sign of `min_phi D_phi`; `|min| <= feas_eps` counts as
/// orthogonal. The witness comes from [`bj_orthogonal_subspace`] on `{B}`.
pub fn bj_orthogonal_vector(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<OrthogonalityVerdict> {
    a.check_same_shape(b, "direction B")?;
    let space = max_eigenspace(a, tol)?;
    let min = min_phi_in(&space, a, b, tol)?;
    if min.value < -tol.feas_eps {
        return Ok(OrthogonalityVerdict {
            orthogonal: false,
            witness: None,
            violation: Some(Violation {
                phi: min.phi_star,
                direction_index: 0,
                derivative: min.value,
            }),
            separation: None,
        });
    }
    let verdict = subspace_in(&space, a, std::slice::from_ref(b), tol)?;
    if verdict.orthogonal {
        Ok(verdict)
    } else {
        // inside the boundary band the two tests can disagree; report neither
        Err(GateauxError::Indeterminate {
            iterations: 0,
            objective: min.value,
            lower_bound: min.value,
        })
    }
}

/// Is `A` orthogonal to the span of `generators`?
pub fn bj_orthogonal_subspace(
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<OrthogonalityVerdict> {
    check_generators(a, generators)?;
    let space = max_eigenspace(a, tol)?;
    subspace_in(&space, a, generators, tol)
}

fn subspace_in(
    space: &MaxEigenspace,
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<OrthogonalityVerdict> {
    let constraints = split_constraints(&compressed_generators(space, a, generators)?);
    let run = spectrahedron_feasibility(&constraints, tol)?;
    match run.outcome {
        SpectrahedronOutcome::Feasible { state, .. } => {
            let witness = decompose_in_eigenspace(space, &state, tol)?;
            Ok(OrthogonalityVerdict::orthogonal(witness))
        }
        SpectrahedronOutcome::Infeasible { coefficients, lower_bound, .. } => {
            let check = hermitian_eig(&aggregate(&constraints, &coefficients), tol)?;
            if check.lambda_min() > 0.0 {
                return Ok(OrthogonalityVerdict {
                    orthogonal: false,
                    witness: None,
                    violation: None,
                    separation: Some(coefficients),
                });
            }
            // no exact certificate: fall back to a descent direction among the generators
            let mut best: Option<Violation> = None;
            for (j, b) in generators.iter().enumerate() {
                let m = min_phi_in(space, a, b, tol)?;
                if best.is_none_or(|v| m.value < v.derivative) {
                    best = Some(Violation {
                        phi: m.phi_star,
                        direction_index: j,
                        derivative: m.value,
                    });
                }
            }
            match best {
                Some(v) if v.derivative < -tol.feas_eps => Ok(OrthogonalityVerdict {
                    orthogonal: false,
                    witness: None,
                    violation: Some(v),
                    separation: None,
                }),
                _ => Err(GateauxError::Indeterminate {
                    iterations: run.iterations,
                    objective: run.objective_history.last().copied().unwrap_or(f64::NAN),
                    lower_bound,
                }),
            }
        }
    }
}

/// Decomposes a `k x k` state in eigenspace coordinates and lifts the
/// eigenvectors through the basis, so every `u_j` lies in `E` exactly up to
/// rounding.
fn decompose_in_eigenspace(
    space: &MaxEigenspace,
    state: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<MaximizerDecomposition> {
    let decomp = hermitian_eig(&state.hermitian_part(), tol)?;
    let kept: Vec<usize> = (0..decomp.dim())
        .filter(|&j| decomp.eigenvalues[j] > tol.psd_tol)
        .collect();
    let total: f64 = kept.iter().map(|&j| decomp.eigenvalues[j]).sum();
    Ok(MaximizerDecomposition {
        weights: kept.iter().map(|&j| decomp.eigenvalues[j] / total).collect(),
        vectors: kept.iter().map(|&j| space.lift_vector(&decomp.vector(j))).collect(),
    })
}

/// Splits a norm-attaining state `T` (ambient coordinates) into weighted
/// orthonormal norming vectors.
pub fn decompose_maximizer(
    a: &ComplexMatrix,
    t: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<MaximizerDecomposition> {
    let n = a.cols();
    if t.shape() != (n, n) {
        return Err(GateauxError::DimensionMismatch(format!(
            "state T: expected {n}x{n}, found {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    check_density(t, tol)?;
    let space = max_eigenspace(a, tol)?;
    let gram = a.adjoint_mul(a);
    let deviation = (gram.re_inner(t) - space.lambda_max).abs();
    if deviation > MAXIMIZER_REL_TOL * space.lambda_max {
        return Err(GateauxError::NotAMaximizer { deviation });
    }
    let decomp = hermitian_eig(&t.hermitian_part(), tol)?;
    let kept: Vec<usize> = (0..decomp.dim())
        .filter(|&j| decomp.eigenvalues[j] > tol.psd_tol)
        .collect();
    let total: f64 = kept.iter().map(|&j| decomp.eigenvalues[j]).sum();
    Ok(MaximizerDecomposition {
        weights: kept.iter().map(|&j| decomp.eigenvalues[j] / total).collect(),
        vectors: kept.iter().map(|&j| decomp.vector(j)).collect(),
    })
}

/// Checks a witness against `A` and the generators without any solver.
pub fn verify_witness(
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
    witness: &MaximizerDecomposition,
    tol: &ToleranceConfig,
) -> Result<WitnessReport> {
    check_generators(a, generators)?;
    let n = a.cols();
    if witness.weights.is_empty() || witness.weights.len() != witness.vectors.len() {
        return Err(GateauxError::InvalidParameter(
            "witness needs matching, non-empty weights and vectors".into(),
        ));
    }
    if let Some(u) = witness.vectors.iter().find(|u| u.len() != n) {
        return Err(GateauxError::DimensionMismatch(format!(
            "witness vector: expected length {n}, found {}",
            u.len()
        )));
    }
    let space = max_eigenspace(a, tol)?;
    let lambda = space.lambda_max;

    let weight_sum_error = (witness.weights.iter().sum::<f64>() - 1.0).abs();
    let min_weight = witness.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let eigen_residual = witness
        .vectors
        .iter()
        .map(|u| {
            let au = a.mul_vec(u);
            let gu = a.adjoint().mul_vec(&au);
            let r: Vec<Complex64> = gu.iter().zip(u).map(|(g, x)| g - x * lambda).collect();
            vec_norm(&r) / lambda
        })
        .fold(0.0, f64::max);
    let mut orthonormality_error: f64 = 0.0;
    for (i, u) in witness.vectors.iter().enumerate() {
        for (j, v) in witness.vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            orthonormality_error = orthonormality_error.max((inner(u, v) - target).norm());
        }
    }
    let constraint_residual = generators
        .iter()
        .map(|b| witness.pairing(a, b).norm())
        .fold(0.0, f64::max);

    let accepted = weight_sum_error <= DENSITY_TOL
        && min_weight > 0.0
        && eigen_residual <= MAXIMIZER_REL_TOL
        && orthonormality_error <= ORTHONORMAL_TOL
        && constraint_residual <= 2.0 * tol.feas_eps;
    Ok(WitnessReport {
        weight_sum_error,
        min_weight,
        eigen_residual,
        orthonormality_error,
        constraint_residual,
        accepted,
    })
}

/// Smallest eigenvalue of `sum_i c_i H_i`; the certificate is valid iff it
/// is strictly positive.
pub fn separation_min_eigenvalue(
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
    coefficients: &[f64],
    tol: &ToleranceConfig,
) -> Result<f64> {
    let constraints = subspace_constraints(a, generators, tol)?;
    if coefficients.len() != constraints.len() {
        return Err(GateauxError::DimensionMismatch(format!(
            "separation: expected {} coefficients, found {}",
            constraints.len(),
            coefficients.len()
        )));
    }
    Ok(hermitian_eig(&aggregate(&constraints, coefficients), tol)?.lambda_min())
}

/// Recomputes the rotated derivative named by a violation. Valid iff the
/// result is below `-feas_eps`.
pub fn violation_derivative(
    a: &ComplexMatrix,
    generators: &[ComplexMatrix],
    violation: &Violation,
    tol: &ToleranceConfig,
) -> Result<f64> {
    check_generators(a, generators)?;
    let b = generators.get(violation.direction_index).ok_or_else(|| {
        GateauxError::InvalidParameter(format!(
            "direction_index {} out of range",
            violation.direction_index
        ))
    })?;
    Ok(phi_gateaux(a, b, violation.phi, tol)?.value)
}

/// Outcome of a subdifferential membership test with its three residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdiffMembership {
    pub member: bool,
    /// The density matrix `T = A*G / |A|` when `G` is a member.
    pub state: Option<DensityMatrix>,
    /// Why `T` fails to be a density matrix, if it does.
    pub density_error: Option<String>,
    /// `|(I - P_E) T|_F`.
    pub support_residual: f64,
    /// `|A T / |A| - G|_F`.
    pub reconstruction_residual: f64,
}

/// Tests `G` for membership in the subdifferential of the spectral norm at
/// `A`, with the pairing `<G, X> = Re tr(G* X)`.
///
/// The subdifferential is the convex hull of `v u*` over unit `u, v` with
/// `A u = |A| v`, i.e. the set of `(A / |A|) T` for density matrices `T`
/// supported on the top eigenspace. `T` is recovered as `A*G / |A|`.
pub fn subdiff_membership(
    a: &ComplexMatrix,
    g: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<SubdiffMembership> {
    a.check_same_shape(g, "functional G")?;
    let space = max_eigenspace(a, tol)?;
    let t = a.adjoint_mul(g).scale_real(1.0 / space.op_norm);
    state_membership(&space, a, g, &t, tol)
}

/// Checks a claimed state `T` (ambient coordinates) for `G = A T / |A|`
/// without recovering it from `G`.
pub fn check_subdiff_state(
    a: &ComplexMatrix,
    g: &ComplexMatrix,
    t: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<SubdiffMembership> {
    a.check_same_shape(g, "functional G")?;
    let n = a.cols();
    if t.shape() != (n, n) {
        return Err(GateauxError::DimensionMismatch(format!(
            "state T: expected {n}x{n}, found {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let space = max_eigenspace(a, tol)?;
    state_membership(&space, a, g, t, tol)
}

fn state_membership(
    space: &MaxEigenspace,
    a: &ComplexMatrix,
    g: &ComplexMatrix,
    t: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<SubdiffMembership> {
    let norm = space.op_norm;
    let t = t.clone();
    let density_error = match check_density(&t, tol) {
        Ok(()) => None,
        Err(GateauxError::NotADensityMatrix(msg)) => Some(msg),
        Err(e) => return Err(e),
    };
    let off_support = &t - &(&space.projector() * &t);
    let support_residual = off_support.frobenius_norm();
    let reconstruction_residual = (&(a * &t).scale_real(1.0 / norm) - g).frobenius_norm();

    let member = density_error.is_none()
        && support_residual <= tol.feas_eps
        && reconstruction_residual <= tol.feas_eps;
    let state = member.then(|| DensityMatrix {
        mat: compress(&t, space).expect("square by construction"),
        ambient: Some(t.clone()),
    });
    Ok(SubdiffMembership {
        member,
        state,
        density_error,
        support_residual,
        reconstruction_residual,
    })
}
