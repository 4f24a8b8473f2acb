//! Feasibility solvers.
//!
//! Both solvers minimize a squared residual `g = |r|^2` over a compact convex
//! set whose linear-minimization oracle is cheap:
//!
//! - the spectrahedron of `k x k` density matrices, where
//!   `r_i = tr(H_i T)` for Hermitian constraint matrices `H_i` and the oracle
//!   is the bottom eigenvector of `sum_i c_i H_i`;
//! - the probability simplex over a finite point set, where `r = sum mu_x p_x`
//!   and the oracle is the point with the smallest inner product against the
//!   gradient.
//!
//! Each iteration yields the convexity lower bound `g - gap` on `min g`, so
//! infeasibility is declared only when that bound exceeds `feas_eps^2`.
//! Both rest on Wolfe's minimum-norm-point method over a finite point set;
//! on the spectrahedron the point set is grown by the eigenvector oracle.

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{GateauxError, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrahedronOutcome {
    /// `state` is a density matrix with `sum_i tr(H_i T)^2 <= feas_eps^2`.
    Feasible { state: ComplexMatrix, residuals: Vec<f64> },
    /// `sum_i coefficients_i H_i` is positive definite with smallest
    /// eigenvalue `min_eigenvalue > 0`, so no density matrix annihilates
    /// every constraint.
    Infeasible {
        coefficients: Vec<f64>,
        min_eigenvalue: f64,
        lower_bound: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrahedronRun {
    pub outcome: SpectrahedronOutcome,
    pub iterations: usize,
    /// Objective value at every iterate, starting from `I / k`.
    pub objective_history: Vec<f64>,
}

/// Residuals `tr(H_i T)` (real parts; exact for Hermitian `H_i`, `T`).
pub fn constraint_residuals(constraints: &[ComplexMatrix], state: &ComplexMatrix) -> Vec<f64> {
    constraints.iter().map(|h| h.re_inner(state)).collect()
}

/// `sum_i c_i H_i`.
pub fn aggregate(constraints: &[ComplexMatrix], coefficients: &[f64]) -> ComplexMatrix {
    let k = constraints[0].rows();
    let mut acc = ComplexMatrix::zeros(k, k);
    for (h, &c) in constraints.iter().zip(coefficients) {
        acc = &acc + &h.scale_real(c);
    }
    acc
}

/// Searches for a density matrix `T` with `|tr(H_i T)| <= feas_eps` for all
/// `i`. Returns [`GateauxError::Indeterminate`] when neither a witness nor
/// a separating certificate is reached.
///
/// Fully corrective Frank-Wolfe: `T` is kept as a convex combination of
/// pure states `w w*`, each step adds the oracle's bottom eigenvector and
/// re-optimizes all weights by [`min_norm_point`] on the residual vectors.
pub fn spectrahedron_feasibility(
    constraints: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<SpectrahedronRun> {
    let Some(first) = constraints.first() else {
        return Err(GateauxError::EmptySubspace);
    };
    let k = first.rows();
    if let Some(bad) = constraints.iter().find(|h| h.shape() != (k, k)) {
        return Err(GateauxError::DimensionMismatch(format!(
            "constraint matrices must all be {k}x{k}, found {}x{}",
            bad.rows(),
            bad.cols()
        )));
    }
    let target = tol.feas_eps * tol.feas_eps;
    let pure_residuals = |w: &[Complex64]| constraint_residuals(constraints, &ComplexMatrix::outer(w, w));

    // start from I / k, the uniform mixture of the standard basis
    let mut atoms: Vec<Vec<Complex64>> = (0..k)
        .map(|i| (0..k).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect())
        .collect();
    let mut points: Vec<Vec<f64>> = atoms.iter().map(|w| pure_residuals(w)).collect();
    let mut weights = vec![1.0 / k as f64; k];
    let mut history = Vec::new();
    let mut lower_bound = f64::NEG_INFINITY;

    for iteration in 0..tol.max_iter {
        let state = mixture(&atoms, &weights, k);
        let residuals = constraint_residuals(constraints, &state);
        let g: f64 = residuals.iter().map(|r| r * r).sum();
        if history.last().is_some_and(|&prev| g >= prev) {
            return Err(GateauxError::Indeterminate { iterations: iteration, objective: g, lower_bound });
        }
        history.push(g);
        if g <= target {
            return Ok(SpectrahedronRun {
                outcome: SpectrahedronOutcome::Feasible { state, residuals },
                iterations: iteration,
                objective_history: history,
            });
        }

        let coefficients: Vec<f64> = residuals.iter().map(|r| 2.0 * r).collect();
        let decomp = hermitian_eig(&aggregate(constraints, &coefficients), tol)?;
        let lambda_min = decomp.lambda_min();
        // tr(grad T) = 2g, min over the spectrahedron is lambda_min
        let gap = 2.0 * g - lambda_min;
        lower_bound = g - gap;
        if lower_bound > target {
            return Ok(SpectrahedronRun {
                outcome: SpectrahedronOutcome::Infeasible {
                    coefficients,
                    min_eigenvalue: lambda_min,
                    lower_bound,
                },
                iterations: iteration,
                objective_history: history,
            });
        }
        if gap <= tol.fw_gap_eps {
            return Err(GateauxError::Indeterminate { iterations: iteration, objective: g, lower_bound });
        }

        let w = decomp.vector(decomp.dim() - 1);
        points.push(pure_residuals(&w));
        atoms.push(w);
        let run = min_norm_point(&points, target, tol.max_iter);
        let kept: Vec<usize> = (0..atoms.len()).filter(|&i| run.weights[i] > 0.0).collect();
        atoms = kept.iter().map(|&i| atoms[i].clone()).collect();
        points = kept.iter().map(|&i| points[i].clone()).collect();
        weights = kept.iter().map(|&i| run.weights[i]).collect();
    }
    Err(GateauxError::Indeterminate {
        iterations: tol.max_iter,
        objective: history.last().copied().unwrap_or(f64::NAN),
        lower_bound,
    })
}

/// `sum_i weights_i w_i w_i*`.
fn mixture(atoms: &[Vec<Complex64>], weights: &[f64], k: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(k, k);
    for (w, &p) in atoms.iter().zip(weights) {
        acc = &acc + &ComplexMatrix::outer(w, w).scale_real(p);
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub enum HullOutcome {
    /// Convex weights (one per point) whose combination has norm `<= feas_eps`.
    Feasible { weights: Vec<f64>, combination: Vec<f64> },
    /// Every convex combination has squared norm at least `lower_bound > feas_eps^2`.
    Infeasible { lower_bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullRun {
    pub outcome: HullOutcome,
    pub iterations: usize,
    pub objective_history: Vec<f64>,
}

/// Decides whether the origin lies in the convex hull of `points` (within
/// `feas_eps`).
pub fn hull_contains_origin(points: &[Vec<f64>], tol: &ToleranceConfig) -> Result<HullRun> {
    let Some(first) = points.first() else {
        return Err(GateauxError::InvalidParameter("point set is empty".into()));
    };
    let dim = first.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(GateauxError::DimensionMismatch("points differ in dimension".into()));
    }
    let target = tol.feas_eps * tol.feas_eps;
    let run = min_norm_point(points, target, tol.max_iter);
    let g = dot(&run.point, &run.point);
    let iterations = run.history.len();
    if g <= target {
        return Ok(HullRun {
            outcome: HullOutcome::Feasible { weights: run.weights, combination: run.point },
            iterations,
            objective_history: run.history,
        });
    }
    let best_dot = points.iter().map(|p| dot(&run.point, p)).fold(f64::INFINITY, f64::min);
    let lower_bound = g - 2.0 * (g - best_dot);
    if lower_bound > target {
        return Ok(HullRun {
            outcome: HullOutcome::Infeasible { lower_bound },
            iterations,
            objective_history: run.history,
        });
    }
    Err(GateauxError::Indeterminate { iterations, objective: g, lower_bound })
}

struct MinNorm {
    /// One convex weight per input point.
    weights: Vec<f64>,
    point: Vec<f64>,
    /// Squared norm at every major step.
    history: Vec<f64>,
}

/// Wolfe's active-set minimum-norm-point method over the convex hull of
/// `points`. Each major step adds the vertex minimizing `<z, p>`; minor steps
/// move to the affine minimum-norm point of the active set, dropping
/// vertices whose weight would turn negative. Stops once `|z|^2 <= target`,
/// at the minimum-norm point (to rounding), or after `max_iter` major steps.
fn min_norm_point(points: &[Vec<f64>], target: f64, max_iter: usize) -> MinNorm {
    let n = points.len();
    let dim = points[0].len();
    let norms: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let start = (0..n).min_by(|&i, &j| norms[i].total_cmp(&norms[j])).unwrap_or(0);
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let mut z = points[start].clone();
    let mut history = Vec::new();

    for _ in 0..max_iter {
        let g = dot(&z, &z);
        history.push(g);
        if g <= target {
            break;
        }
        let (best, best_dot) = points
            .iter()
            .enumerate()
            .map(|(j, p)| (j, dot(&z, p)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        if g - best_dot <= 8.0 * f64::EPSILON * scale || active.contains(&best) {
            break;
        }
        active.push(best);
        lambda.push(0.0);
        let mut stalled = false;
        loop {
            let Some(alpha) = affine_minimizer(points, &active) else {
                active.pop();
                lambda.pop();
                stalled = true;
                break;
            };
            if alpha.iter().all(|&a| a > 0.0) {
                lambda = alpha;
                break;
            }
            // walk from lambda towards alpha until the first weight hits zero
            let (drop, theta) = lambda
                .iter()
                .zip(&alpha)
                .enumerate()
                .filter(|(_, (_, &a))| a <= 0.0)
                .map(|(i, (&l, &a))| (i, l / (l - a)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            lambda[drop] = 0.0;
            (active, lambda) = active
                .iter()
                .zip(&lambda)
                .filter(|(_, &l)| l > 0.0)
                .map(|(&i, &l)| (i, l))
                .unzip();
        }
        if stalled {
            break;
        }
        let total: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= total);
        z = vec![0.0; dim];
        for (&i, &l) in active.iter().zip(&lambda) {
            for (zi, pi) in z.iter_mut().zip(&points[i]) {
                *zi += l * pi;
            }
        }
    }
    let mut weights = vec![0.0; n];
    for (&i, &l) in active.iter().zip(&lambda) {
        weights[i] = l;
    }
    MinNorm { weights, point: z, history }
}

/// Affine weights (summing to one) of the minimum-norm point in the affine
/// hull of the selected points, from the bordered Gram system. `None` when
/// the points are numerically affinely dependent.
fn affine_minimizer(points: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let s = active.len();
    let size = s + 1;
    let mut m = vec![vec![0.0; size + 1]; size];
    for (r, &i) in active.iter().enumerate() {
        for (c, &j) in active.iter().enumerate() {
            m[r][c] = dot(&points[i], &points[j]);
        }
        m[r][s] = 1.0;
        m[s][r] = 1.0;
    }
    m[s][size] = 1.0;
    let scale = (0..s).map(|r| m[r][r]).fold(1.0, f64::max);
    for col in 0..size {
        let pivot = (col..size).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, pivot);
        let pivot_row = m[col].clone();
        for (row, entries) in m.iter_mut().enumerate() {
            let factor = entries[col] / pivot_row[col];
            if row != col && factor != 0.0 {
                for (e, p) in entries[col..].iter_mut().zip(&pivot_row[col..]) {
                    *e -= factor * p;
                }
            }
        }
    }
    Some((0..s).map(|r| m[r][size] / m[r][r]).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Splits complex constraints `C_j` into the real Hermitian pairs
/// `Herm(C_j)`, `Herm(i C_j)`, so that `tr(C_j T) = r_{2j} - i r_{2j+1}`
/// for Hermitian `T`.
pub fn split_constraints(compressed: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    compressed
        .iter()
        .flat_map(|c| [c.hermitian_part(), c.scale(Complex64::i()).hermitian_part()])
        .collect()
}
