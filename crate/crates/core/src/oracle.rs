//! Brute-force cross-checks built only on norm evaluations.
//!
//! Nothing here touches eigenvectors, eigenspaces or the feasibility
//! solvers: the matrix oracles call [`operator_norm`] and the function
//! oracles call [`sup_norm`].

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{GateauxError, Result};
use crate::function_space::{sup_norm, DiscreteDomainFunction};
use crate::linalg::{operator_norm, ComplexMatrix};

/// Successive Richardson estimates closer than this count as converged.
pub const FD_CONVERGENCE: f64 = 1e-6;
/// Number of log-spaced step sizes in `[1e-4, 1]` for the grid search.
pub const GRID_STEPS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub estimate: f64,
    /// `(parameter, value)` pairs in evaluation order.
    pub samples: Vec<(f64, f64)>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridVerdict {
    /// `estimate` is the smallest sampled `|A + t e^{i phi} B| - |A|`;
    /// `samples` holds the per-`t` minimum over angles.
    pub report: OracleReport,
    pub orthogonal: bool,
    pub argmin_t: f64,
    pub argmin_phi: f64,
}

/// Finite-difference quotients `(|A + tB| - |A|) / t` over `fd_steps`,
/// extrapolated by two-point Richardson on the last pair.
pub fn fd_derivative(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<OracleReport> {
    a.check_same_shape(b, "direction B")?;
    let base = operator_norm(a, tol)?;
    if base == 0.0 {
        return Err(GateauxError::ZeroMatrix);
    }
    let samples = tol
        .fd_steps
        .iter()
        .map(|&t| {
            let moved = a + &b.scale_real(t);
            Ok((t, (operator_norm(&moved, tol)? - base) / t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate(samples))
}

/// Same as [`fd_derivative`] for the sup norm.
pub fn fn_fd_derivative(
    f: &DiscreteDomainFunction,
    g: &DiscreteDomainFunction,
    tol: &ToleranceConfig,
) -> Result<OracleReport> {
    check_domains(f, g)?;
    let base = sup_norm(f);
    if base == 0.0 {
        return Err(GateauxError::ZeroFunction);
    }
    let samples = tol
        .fd_steps
        .iter()
        .map(|&t| (t, (sup_norm(&f.add_scaled(g, Complex64::new(t, 0.0))) - base) / t))
        .collect();
    Ok(extrapolate(samples))
}

fn extrapolate(samples: Vec<(f64, f64)>) -> OracleReport {
    let richardson: Vec<f64> = samples
        .windows(2)
        .map(|w| {
            let ((t1, q1), (t2, q2)) = (w[0], w[1]);
            (t1 * q2 - t2 * q1) / (t1 - t2)
        })
        .collect();
    let estimate = richardson.last().copied().unwrap_or(samples[0].1);
    let converged = match richardson[..] {
        [.., prev, last] => (last - prev).abs() < FD_CONVERGENCE && last.is_finite(),
        _ => false,
    };
    OracleReport {
        estimate,
        samples,
        converged,
    }
}

fn step_grid() -> impl Iterator<Item = f64> {
    (0..GRID_STEPS).map(|i| 10f64.powf(-4.0 + 4.0 * i as f64 / (GRID_STEPS - 1) as f64))
}

fn grid_search(
    tol: &ToleranceConfig,
    mut gain: impl FnMut(Complex64) -> Result<f64>,
) -> Result<GridVerdict> {
    let mut samples = Vec::with_capacity(GRID_STEPS);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for t in step_grid() {
        let mut row_min = f64::INFINITY;
        for j in 0..tol.grid_phi {
            let phi = TAU * j as f64 / tol.grid_phi as f64;
            let v = gain(Complex64::from_polar(t, phi))?;
            row_min = row_min.min(v);
            if v < best.0 {
                best = (v, t, phi);
            }
        }
        samples.push((t, row_min));
    }
    Ok(GridVerdict {
        orthogonal: best.0 >= -tol.feas_eps,
        report: OracleReport {
            estimate: best.0,
            samples,
            converged: true,
        },
        argmin_t: best.1,
        argmin_phi: best.2,
    })
}

/// Scans `|A + t e^{i phi} B| - |A|` over a log grid of `t` and `grid_phi`
/// angles; orthogonal iff no sample drops below `-feas_eps`.
pub fn bj_grid_check(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<GridVerdict> {
    a.check_same_shape(b, "direction B")?;
    let base = operator_norm(a, tol)?;
    if base == 0.0 {
        return Err(GateauxError::ZeroMatrix);
    }
    grid_search(tol, |z| Ok(operator_norm(&(a + &b.scale(z)), tol)? - base))
}

/// Sup-norm analogue of [`bj_grid_check`].
pub fn fn_bj_grid_check(
    f: &DiscreteDomainFunction,
    g: &DiscreteDomainFunction,
    tol: &ToleranceConfig,
) -> Result<GridVerdict> {
    check_domains(f, g)?;
    let base = sup_norm(f);
    if base == 0.0 {
        return Err(GateauxError::ZeroFunction);
    }
    grid_search(tol, |z| Ok(sup_norm(&f.add_scaled(g, z)) - base))
}

fn check_domains(f: &DiscreteDomainFunction, g: &DiscreteDomainFunction) -> Result<()> {
    if f.domain_size() != g.domain_size() {
        return Err(GateauxError::DimensionMismatch(format!(
            "direction g: expected {} values, found {}",
            f.domain_size(),
            g.domain_size()
        )));
    }
    Ok(())
}
