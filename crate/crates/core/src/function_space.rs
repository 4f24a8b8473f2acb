//! Sup-norm analogues on a finite domain `Omega = {0, .., n-1}`.
//!
//! For `f != 0` the right derivative of `|.|_inf` at `f` in direction `g` is
//! the maximum of `Re(e^{-i arg f(x)} g(x))` over the points where `|f|`
//! attains its maximum. Every function on a finite set vanishes at infinity,
//! so no essential-norm hypothesis is needed.

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{GateauxError, Result};
use crate::feasibility::{hull_contains_origin, HullOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDomainFunction {
    values: Vec<Complex64>,
}

impl DiscreteDomainFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(GateauxError::DimensionMismatch("function domain must be non-empty".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GateauxError::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `f + t g`, for oracle use.
    pub fn add_scaled(&self, other: &Self, t: Complex64) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b * t).collect(),
        }
    }

    fn check_same_domain(&self, other: &Self, what: &str) -> Result<()> {
        if self.domain_size() != other.domain_size() {
            return Err(GateauxError::DimensionMismatch(format!(
                "{what}: expected {} values, found {}",
                self.domain_size(),
                other.domain_size()
            )));
        }
        Ok(())
    }
}

/// Points where `|f(x)| >= |f|_inf (1 - cluster_rel)` and the unit phases
/// `f(x) / |f(x)|` there.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxModulusSet {
    pub indices: Vec<usize>,
    pub phases: Vec<Complex64>,
}

/// Probability measure on `Omega` supported in the max-modulus set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionOrthogonality {
    pub orthogonal: bool,
    pub measure: Option<ProbabilityMeasure>,
}

pub fn sup_norm(f: &DiscreteDomainFunction) -> f64 {
    f.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_modulus_set(f: &DiscreteDomainFunction, tol: &ToleranceConfig) -> Result<MaxModulusSet> {
    let norm = sup_norm(f);
    if norm == 0.0 {
        return Err(GateauxError::ZeroFunction);
    }
    let cut = norm * (1.0 - tol.cluster_rel);
    let (indices, phases) = f
        .values
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() >= cut)
        .map(|(x, z)| (x, z / z.norm()))
        .unzip();
    Ok(MaxModulusSet { indices, phases })
}

/// `Re(conj(phase) g(x))`, the rate of change of `|f(x) + t g(x)|` at `t = 0`.
fn phase_rate(phase: Complex64, g: Complex64) -> f64 {
    (phase.conj() * g).re
}

/// Right derivative of the sup norm at `f` in direction `g`.
pub fn fn_gateaux_plus(
    f: &DiscreteDomainFunction,
    g: &DiscreteDomainFunction,
    tol: &ToleranceConfig,
) -> Result<f64> {
    f.check_same_domain(g, "direction g")?;
    let set = max_modulus_set(f, tol)?;
    Ok(set
        .indices
        .iter()
        .zip(&set.phases)
        .map(|(&x, &p)| phase_rate(p, g.values[x]))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `sup { Re(e^{-i arg f(x)} g(x)) : |f(x)| >= |f|_inf - delta }`.
///
/// Points with `f(x) = 0` are skipped since `arg f(x)` is undefined there;
/// they can only enter when `delta` reaches `|f|_inf`, which is rejected.
pub fn fn_delta_derivative(
    f: &DiscreteDomainFunction,
    g: &DiscreteDomainFunction,
    delta: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    f.check_same_domain(g, "direction g")?;
    let norm = sup_norm(f);
    if norm == 0.0 {
        return Err(GateauxError::ZeroFunction);
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(GateauxError::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if delta >= norm {
        return Err(GateauxError::DeltaTooLarge { delta, norm });
    }
    // the exact maximizers share their phases with max_modulus_set
    let set = max_modulus_set(f, tol)?;
    let cut = norm - delta;
    Ok(f.values
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() >= cut && z.norm() > 0.0)
        .map(|(x, z)| {
            let phase = match set.indices.binary_search(&x) {
                Ok(pos) => set.phases[pos],
                Err(_) => z / z.norm(),
            };
            phase_rate(phase, g.values[x])
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Is `f` orthogonal to the span of `hs`? Equivalent to the existence of a
/// probability measure `mu` on the max-modulus set with
/// `sum_x mu_x conj(f(x)) h_j(x) = 0` for every generator.
pub fn fn_bj_orthogonal_subspace(
    f: &DiscreteDomainFunction,
    hs: &[DiscreteDomainFunction],
    tol: &ToleranceConfig,
) -> Result<FunctionOrthogonality> {
    if hs.is_empty() {
        return Err(GateauxError::EmptySubspace);
    }
    for (j, h) in hs.iter().enumerate() {
        f.check_same_domain(h, &format!("generator {j}"))?;
    }
    let set = max_modulus_set(f, tol)?;

    if let [x0] = set.indices[..] {
        let orthogonal = hs.iter().all(|h| h.values[x0].norm() <= tol.feas_eps);
        return Ok(FunctionOrthogonality {
            orthogonal,
            measure: orthogonal.then(|| ProbabilityMeasure {
                support: vec![x0],
                weights: vec![1.0],
            }),
        });
    }

    let points: Vec<Vec<f64>> = set
        .indices
        .iter()
        .map(|&x| {
            let fx = f.values[x].conj();
            hs.iter()
                .flat_map(|h| {
                    let z = fx * h.values[x];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let run = hull_contains_origin(&points, tol)?;
    Ok(match run.outcome {
        HullOutcome::Feasible { weights, .. } => {
            let (support, kept): (Vec<usize>, Vec<f64>) = set
                .indices
                .iter()
                .zip(&weights)
                .filter(|(_, &w)| w > 0.0)
                .map(|(&x, &w)| (x, w))
                .unzip();
            let total: f64 = kept.iter().sum();
            FunctionOrthogonality {
                orthogonal: true,
                measure: Some(ProbabilityMeasure {
                    support,
                    weights: kept.iter().map(|w| w / total).collect(),
                }),
            }
        }
        HullOutcome::Infeasible { .. } => FunctionOrthogonality {
            orthogonal: false,
            measure: None,
        },
    })
}

/// Residuals of a measure certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub weight_sum_error: f64,
    pub min_weight: f64,
    /// Smallest `|f(x)| / |f|_inf` over the support.
    pub support_modulus: f64,
    /// `max_j |sum_x mu_x conj(f(x)) h_j(x)|`.
    pub integral_residual: f64,
    pub accepted: bool,
}

pub fn verify_measure(
    f: &DiscreteDomainFunction,
    hs: &[DiscreteDomainFunction],
    measure: &ProbabilityMeasure,
    tol: &ToleranceConfig,
) -> Result<MeasureReport> {
    if measure.support.is_empty() || measure.support.len() != measure.weights.len() {
        return Err(GateauxError::InvalidParameter(
            "measure needs matching, non-empty support and weights".into(),
        ));
    }
    if let Some(&x) = measure.support.iter().find(|&&x| x >= f.domain_size()) {
        return Err(GateauxError::InvalidParameter(format!("support point {x} outside the domain")));
    }
    for (j, h) in hs.iter().enumerate() {
        f.check_same_domain(h, &format!("generator {j}"))?;
    }
    let norm = sup_norm(f);
    if norm == 0.0 {
        return Err(GateauxError::ZeroFunction);
    }
    let weight_sum_error = (measure.weights.iter().sum::<f64>() - 1.0).abs();
    let min_weight = measure.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let support_modulus = measure
        .support
        .iter()
        .map(|&x| f.values[x].norm() / norm)
        .fold(f64::INFINITY, f64::min);
    let integral_residual = hs
        .iter()
        .map(|h| {
            measure
                .support
                .iter()
                .zip(&measure.weights)
                .map(|(&x, &w)| f.values[x].conj() * h.values[x] * w)
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max);
    let accepted = weight_sum_error <= 1e-12
        && min_weight > 0.0
        && support_modulus >= 1.0 - tol.cluster_rel
        && integral_residual <= 2.0 * tol.feas_eps;
    Ok(MeasureReport {
        weight_sum_error,
        min_weight,
        support_modulus,
        integral_residual,
        accepted,
    })
}
