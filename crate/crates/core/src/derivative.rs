//! One-sided, rotated and two-sided Gateaux derivatives of the spectral norm.
//!
//! At `A != 0` the right derivative in direction `B` is
//!
//! ```text
//!     lim_{t -> 0+} (|A + tB| - |A|) / t
//!         = (1 / |A|) max { Re <Au, Bu> : |u| = 1, A*A u = |A|^2 u }
//! ```
//!
//! and `Re <Au, Bu> = u* Herm(A*B) u` is a Hermitian quadratic form, so the
//! maximum over the unit sphere of the top eigenspace `E` is the largest
//! eigenvalue of the compression of `Herm(A*B)` to `E`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{GateauxError, Result};
use crate::linalg::{
    compress, gram_spectrum, hermitian_eig, max_eigenspace, operator_norm, ComplexMatrix,
    MaxEigenspace,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeResult {
    pub value: f64,
    pub eigenspace_dim: usize,
    /// Unit vector in the top eigenspace attaining the maximum.
    pub maximizing_vector: Vec<Complex64>,
}

/// Minimum over angles of the rotated derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMinimum {
    /// Minimizing angle in `[0, 2pi)`.
    pub phi_star: f64,
    pub value: f64,
}

/// Left and right derivatives in one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSidedPair {
    pub left: f64,
    pub right: f64,
}

impl OneSidedPair {
    /// Relative agreement threshold `1e-8 (1 + |B|)`.
    pub fn two_sided(&self, b_norm: f64) -> Option<f64> {
        ((self.left - self.right).abs() <= 1e-8 * (1.0 + b_norm)).then_some(self.right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Smoothness {
    pub smooth: bool,
    /// The unique norming direction `h` when smooth.
    pub witness: Option<Vec<Complex64>>,
}

/// `U* Herm(X) U`, re-symmetrized so rounding in the congruence cannot trip
/// the eigensolver's Hermitian check.
pub(crate) fn compressed_hermitian(x: &ComplexMatrix, space: &MaxEigenspace) -> Result<ComplexMatrix> {
    Ok(compress(&x.hermitian_part(), space)?.hermitian_part())
}

fn check_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    a.check_same_shape(b, "direction B")
}

/// Right Gateaux derivative of `|.|` at `A` in direction `B`.
pub fn gateaux_plus(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<DerivativeResult> {
    check_pair(a, b)?;
    let space = max_eigenspace(a, tol)?;
    gateaux_plus_in(&space, a, b, tol)
}

pub(crate) fn gateaux_plus_in(
    space: &MaxEigenspace,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<DerivativeResult> {
    if b.is_zero() {
        return Ok(DerivativeResult {
            value: 0.0,
            eigenspace_dim: space.dim_k,
            maximizing_vector: space.vector(0),
        });
    }
    let h = compressed_hermitian(&a.adjoint_mul(b), space)?;
    let decomp = hermitian_eig(&h, tol)?;
    Ok(DerivativeResult {
        value: decomp.lambda_max() / space.op_norm,
        eigenspace_dim: space.dim_k,
        maximizing_vector: space.lift_vector(&decomp.vector(0)),
    })
}

/// Right derivative in the rotated direction `e^{i phi} B`.
pub fn phi_gateaux(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    phi: f64,
    tol: &ToleranceConfig,
) -> Result<DerivativeResult> {
    if !phi.is_finite() {
        return Err(GateauxError::InvalidParameter(format!("phi must be finite, got {phi}")));
    }
    gateaux_plus(a, &b.scale(Complex64::from_polar(1.0, phi)), tol)
}

/// Smallest rotated derivative over `phi`, found on a uniform grid of
/// `grid_phi` angles and refined by golden-section search on the
/// neighbouring cells.
pub fn min_phi_derivative(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PhiMinimum> {
    check_pair(a, b)?;
    let space = max_eigenspace(a, tol)?;
    min_phi_in(&space, a, b, tol)
}

pub(crate) fn min_phi_in(
    space: &MaxEigenspace,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<PhiMinimum> {
    if b.is_zero() {
        return Ok(PhiMinimum { phi_star: 0.0, value: 0.0 });
    }
    let c = compress(&a.adjoint_mul(b), space)?;
    let h = c.hermitian_part();
    let k = c.scale(Complex64::i()).hermitian_part();
    let scale = 1.0 / space.op_norm;

    let pencil = |phi: f64| -> Result<f64> {
        let m = &h.scale_real(phi.cos()) + &k.scale_real(phi.sin());
        Ok(hermitian_eig(&m, tol)?.lambda_max() * scale)
    };
    minimize_periodic(pencil, tol.grid_phi)
        .map(|(phi_star, value)| PhiMinimum { phi_star, value })
}

/// Grid search over `[0, 2pi)` followed by golden-section refinement to
/// bracket width `1e-10`. Returns `(argmin, min)` with the angle in `[0, 2pi)`.
pub(crate) fn minimize_periodic(
    mut f: impl FnMut(f64) -> Result<f64>,
    samples: usize,
) -> Result<(f64, f64)> {
    let step = TAU / samples as f64;
    let mut best = (0.0, f(0.0)?);
    for j in 1..samples {
        let phi = j as f64 * step;
        let v = f(phi)?;
        if v < best.1 {
            best = (phi, v);
        }
    }

    let inv_golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let mut x1 = hi - inv_golden * (hi - lo);
    let mut x2 = lo + inv_golden * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_golden * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_golden * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let refined = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let (phi, value) = if refined.1 <= best.1 { refined } else { best };
    Ok((phi.rem_euclid(TAU), value))
}

/// Left and right derivatives: `left = -D_+(A, -B)`, `right = D_+(A, B)`.
pub fn gateaux_one_sided(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<OneSidedPair> {
    check_pair(a, b)?;
    let space = max_eigenspace(a, tol)?;
    let right = gateaux_plus_in(&space, a, b, tol)?.value;
    let left = -gateaux_plus_in(&space, a, &-b, tol)?.value;
    Ok(OneSidedPair { left, right })
}

/// Two-sided derivative when the one-sided limits agree, `None` otherwise.
/// Non-differentiability is reported per direction; see [`is_smooth`] for
/// the global predicate.
pub fn gateaux_two_sided(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Option<f64>> {
    let pair = gateaux_one_sided(a, b, tol)?;
    Ok(pair.two_sided(operator_norm(b, tol)?))
}

/// `A / |A|` is a smooth point of the unit ball iff the norm is attained on
/// a single direction `+-h`, i.e. the top eigenspace is one-dimensional.
pub fn is_smooth(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Smoothness> {
    let space = max_eigenspace(a, tol)?;
    let smooth = space.dim_k == 1;
    Ok(Smoothness {
        smooth,
        witness: smooth.then(|| space.vector(0)),
    })
}

/// Spectral-cutoff form of the right derivative: the maximum of
/// `Re <Ah, Bh> / |A|` over unit `h` in the span of eigenvectors of `A*A`
/// with eigenvalue above `(|A| - eps)^2`. Coincides with [`gateaux_plus`]
/// once `eps` is below the spectral gap.
pub fn spectral_cutoff_derivative(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    eps: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    check_pair(a, b)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(GateauxError::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if a.is_zero() {
        return Err(GateauxError::ZeroMatrix);
    }
    let spectrum = gram_spectrum(a, tol)?;
    let norm = spectrum.lambda_max().max(0.0).sqrt();
    if eps >= norm {
        return Err(GateauxError::EpsTooLarge { eps, norm });
    }
    if b.is_zero() {
        return Ok(0.0);
    }
    let cut = (norm - eps).powi(2);
    let columns: Vec<Vec<Complex64>> = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l > cut)
        .map(|(j, _)| spectrum.vector(j))
        .collect();
    let basis = ComplexMatrix::from_columns(a.cols(), &columns);
    let h = a.adjoint_mul(b).hermitian_part().congruence(&basis).hermitian_part();
    Ok(hermitian_eig(&h, tol)?.lambda_max() / norm)
}
