//! Cyclic complex Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::config::ToleranceConfig;
use crate::error::{GateauxError, Result};

/// Relative asymmetry above which an input is rejected as non-Hermitian.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

/// Eigenvalues sorted descending with their orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.eigenvectors.column(j)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }
}

/// Relative asymmetry `|M - M*|_F / |M|_F` (zero for the zero matrix).
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let fro = m.frobenius_norm();
    if fro == 0.0 {
        return 0.0;
    }
    (m - &m.adjoint()).frobenius_norm() / fro
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Deterministic: sweeps visit `(p, q)` in row-major order, eigenvalues are
/// sorted descending (stable for ties), and each eigenvector is rotated so
/// its first non-negligible component is real and positive.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SpectralData> {
    if !m.is_square() {
        return Err(GateauxError::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let asymmetry = hermitian_defect(m);
    if asymmetry > HERMITIAN_REL_TOL {
        return Err(GateauxError::NotHermitian { asymmetry });
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol.eig_offdiag * a.frobenius_norm();

    let mut sweep = 0;
    loop {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        if sweep >= tol.max_iter {
            return Err(GateauxError::NoConvergence { iterations: sweep });
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Entries below the rounding level of both diagonals are dropped.
                if sweep > 3 && app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs()
                {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq / r, r, app, aqq);
                rotated = true;
            }
        }
        sweep += 1;
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&j| {
            let mut col = v.column(j);
            fix_phase(&mut col);
            col
        })
        .collect();

    Ok(SpectralData {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(n, &columns),
    })
}

/// Eigenvalues only.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    hermitian_eig(m, tol).map(|s| s.eigenvalues)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Applies `A <- G* A G`, `V <- V G` with the unitary
/// `G = [[c, s], [-s e^{-i theta}, c e^{-i theta}]]` acting on `(p, q)`,
/// chosen so that the `(p, q)` entry vanishes.
#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    phase: Complex64,
    r: f64,
    app: f64,
    aqq: f64,
) {
    let n = a.rows();
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();

    let g00 = Complex64::new(c, 0.0);
    let g01 = Complex64::new(s, 0.0);
    let g10 = conj_phase * (-s);
    let g11 = conj_phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g00 + akq * g10;
        a[(k, q)] = akp * g01 + akq * g11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}

/// Makes the first component with modulus above `1e-12` real and positive.
fn fix_phase(col: &mut [Complex64]) {
    if let Some(pos) = col.iter().position(|z| z.norm() > 1e-12) {
        let lead = col[pos];
        let unit = lead.conj() / lead.norm();
        for z in col.iter_mut() {
            *z *= unit;
        }
        // the product can leave a rounding-level imaginary part
        col[pos] = Complex64::new(lead.norm(), 0.0);
    }
}
