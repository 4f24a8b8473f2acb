//! Offline certificate checks: every test evaluates the defining residuals
//! of the certificate directly, without rerunning a feasibility solver.

use gateaux_core::function_space::{verify_measure, ProbabilityMeasure};
use gateaux_core::linalg::{inner, max_eigenspace, operator_norm, vec_norm};
use gateaux_core::orthogonality::{
    check_subdiff_state, separation_min_eigenvalue, subdiff_membership, verify_witness,
    violation_derivative, MaximizerDecomposition, Violation, DENSITY_TOL, MAXIMIZER_REL_TOL,
    ORTHONORMAL_TOL,
};
use gateaux_core::{Complex64, ComplexMatrix, ToleranceConfig};
use serde_json::{json, Map, Value};

use crate::encode::num;
use crate::error::CliError;
use crate::problem::{MatrixJson, ProblemFile};
use crate::Command;

/// Accepted flag plus the residuals that decided it.
pub struct Verification {
    pub accepted: bool,
    pub details: Value,
}

fn rejected(reason: &str) -> Verification {
    Verification {
        accepted: false,
        details: json!({"reason": reason}),
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, CliError> {
    v.get(name)
        .ok_or_else(|| CliError::Input(format!("certificate: missing field `{name}`")))
}

fn as_f64(v: &Value, path: &str) -> Result<f64, CliError> {
    v.as_f64()
        .ok_or_else(|| CliError::Input(format!("certificate: `{path}` is not a number")))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, CliError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| CliError::Input(format!("certificate: `{path}` is not a non-negative integer")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::Input(format!("certificate: `{path}` is not an array")))
}

fn f64_list(v: &Value, path: &str) -> Result<Vec<f64>, CliError> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
        .collect()
}

fn complex_vector(v: &Value, path: &str) -> Result<Vec<Complex64>, CliError> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let p = format!("{path}[{i}]");
            match as_array(z, &p)?.as_slice() {
                [re, im] => Ok(Complex64::new(as_f64(re, &p)?, as_f64(im, &p)?)),
                _ => Err(CliError::Input(format!("certificate: `{p}` is not an [re, im] pair"))),
            }
        })
        .collect()
}

fn vector_list(v: &Value, path: &str) -> Result<Vec<Vec<Complex64>>, CliError> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, u)| complex_vector(u, &format!("{path}[{i}]")))
        .collect()
}

fn check_lengths(vectors: &[Vec<Complex64>], n: usize, path: &str) -> Result<(), CliError> {
    match vectors.iter().position(|u| u.len() != n) {
        Some(i) => Err(CliError::Input(format!(
            "certificate: `{path}[{i}]` has length {}, expected {n}",
            vectors[i].len()
        ))),
        None => Ok(()),
    }
}

fn decomposition(cert: &Value, n: usize) -> Result<MaximizerDecomposition, CliError> {
    let weights = f64_list(field(cert, "weights")?, "weights")?;
    let vectors = vector_list(field(cert, "vectors")?, "vectors")?;
    if weights.is_empty() || weights.len() != vectors.len() {
        return Err(CliError::Input(
            "certificate: `weights` and `vectors` must be non-empty and of equal length".into(),
        ));
    }
    check_lengths(&vectors, n, "vectors")?;
    Ok(MaximizerDecomposition { weights, vectors })
}

/// `max_j |A*A u_j - |A|^2 u_j| / |A|^2`.
fn eigen_residual(a: &ComplexMatrix, vectors: &[Vec<Complex64>], lambda: f64) -> f64 {
    vectors
        .iter()
        .map(|u| {
            let gu = a.adjoint().mul_vec(&a.mul_vec(u));
            let r: Vec<Complex64> = gu.iter().zip(u).map(|(g, x)| g - x * lambda).collect();
            vec_norm(&r) / lambda
        })
        .fold(0.0, f64::max)
}

fn orthonormality_error(vectors: &[Vec<Complex64>]) -> f64 {
    let mut err: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((inner(u, v) - target).norm());
        }
    }
    err
}

fn verify_witness_cert(
    a: &ComplexMatrix,
    gens: &[ComplexMatrix],
    cert: &Value,
    tol: &ToleranceConfig,
) -> Result<Verification, CliError> {
    let w = decomposition(cert, a.cols())?;
    let r = verify_witness(a, gens, &w, tol)?;
    Ok(Verification {
        accepted: r.accepted,
        details: json!({
            "weight_sum_error": num(r.weight_sum_error),
            "min_weight": num(r.min_weight),
            "eigen_residual": num(r.eigen_residual),
            "orthonormality_error": num(r.orthonormality_error),
            "constraint_residual": num(r.constraint_residual),
        }),
    })
}

fn verify_violation_cert(
    a: &ComplexMatrix,
    gens: &[ComplexMatrix],
    cert: &Value,
    tol: &ToleranceConfig,
) -> Result<Verification, CliError> {
    let viol = Violation {
        phi: as_f64(field(cert, "phi")?, "phi")?,
        direction_index: as_usize(field(cert, "direction_index")?, "direction_index")?,
        derivative: as_f64(field(cert, "derivative")?, "derivative")?,
    };
    if viol.direction_index >= gens.len() {
        return Ok(rejected("direction_index out of range"));
    }
    let d = violation_derivative(a, gens, &viol, tol)?;
    Ok(Verification {
        accepted: d < -tol.feas_eps,
        details: json!({"derivative": num(d)}),
    })
}

fn verify_separation_cert(
    a: &ComplexMatrix,
    gens: &[ComplexMatrix],
    cert: &Value,
    tol: &ToleranceConfig,
) -> Result<Verification, CliError> {
    let c = f64_list(field(cert, "coefficients")?, "coefficients")?;
    if c.len() != 2 * gens.len() {
        return Ok(rejected("coefficient count does not match the generators"));
    }
    let lambda = separation_min_eigenvalue(a, gens, &c, tol)?;
    Ok(Verification {
        accepted: lambda > 0.0,
        details: json!({"min_eigenvalue": num(lambda)}),
    })
}

fn orthogonality_cert(
    a: &ComplexMatrix,
    gens: &[ComplexMatrix],
    kind: &str,
    cert: &Value,
    tol: &ToleranceConfig,
    allow_separation: bool,
) -> Result<Verification, CliError> {
    match kind {
        "witness" => verify_witness_cert(a, gens, cert, tol),
        "violation" => verify_violation_cert(a, gens, cert, tol),
        "separation" if allow_separation => verify_separation_cert(a, gens, cert, tol),
        other => Err(unsupported(other)),
    }
}

fn unsupported(kind: &str) -> CliError {
    CliError::Input(format!("certificate kind `{kind}` does not apply to this command"))
}

fn smooth_cert(a: &ComplexMatrix, kind: &str, cert: &Value, tol: &ToleranceConfig) -> Result<Verification, CliError> {
    let n = a.cols();
    let lambda = operator_norm(a, tol)?.powi(2);
    match kind {
        "smooth_witness" => {
            let h = complex_vector(field(cert, "vector")?, "vector")?;
            check_lengths(std::slice::from_ref(&h), n, "vector")?;
            let unit_error = (vec_norm(&h) - 1.0).abs();
            let residual = eigen_residual(a, std::slice::from_ref(&h), lambda);
            let dim_k = max_eigenspace(a, tol)?.dim_k;
            Ok(Verification {
                accepted: unit_error <= ORTHONORMAL_TOL && residual <= MAXIMIZER_REL_TOL && dim_k == 1,
                details: json!({
                    "unit_error": num(unit_error),
                    "eigen_residual": num(residual),
                    "dim_k": dim_k,
                }),
            })
        }
        "multiplicity" => {
            let vs = vector_list(field(cert, "vectors")?, "vectors")?;
            check_lengths(&vs, n, "vectors")?;
            let orth = orthonormality_error(&vs);
            let residual = eigen_residual(a, &vs, lambda);
            Ok(Verification {
                accepted: vs.len() >= 2 && orth <= ORTHONORMAL_TOL && residual <= MAXIMIZER_REL_TOL,
                details: json!({
                    "orthonormality_error": num(orth),
                    "eigen_residual": num(residual),
                }),
            })
        }
        other => Err(unsupported(other)),
    }
}

fn subdiff_cert(
    a: &ComplexMatrix,
    g: &ComplexMatrix,
    kind: &str,
    cert: &Value,
    tol: &ToleranceConfig,
) -> Result<Verification, CliError> {
    match kind {
        "state" => {
            let raw: MatrixJson = serde_json::from_value(field(cert, "state")?.clone())
                .map_err(|e| CliError::Input(format!("certificate: `state`: {e}")))?;
            let t = raw.to_matrix("certificate.state")?;
            let m = check_subdiff_state(a, g, &t, tol)?;
            Ok(Verification {
                accepted: m.member,
                details: json!({
                    "density_error": m.density_error.as_deref().map_or(Value::Null, |s| json!(s)),
                    "support_residual": num(m.support_residual),
                    "reconstruction_residual": num(m.reconstruction_residual),
                }),
            })
        }
        "residuals" => {
            // non-membership: the state recovered from G fails a condition
            let m = subdiff_membership(a, g, tol)?;
            Ok(Verification {
                accepted: !m.member,
                details: json!({
                    "density_error": m.density_error.as_deref().map_or(Value::Null, |s| json!(s)),
                    "support_residual": num(m.support_residual),
                    "reconstruction_residual": num(m.reconstruction_residual),
                }),
            })
        }
        other => Err(unsupported(other)),
    }
}

fn decomposition_cert(
    a: &ComplexMatrix,
    t: &ComplexMatrix,
    kind: &str,
    cert: &Value,
    tol: &ToleranceConfig,
) -> Result<Verification, CliError> {
    if kind != "decomposition" {
        return Err(unsupported(kind));
    }
    let d = decomposition(cert, a.cols())?;
    let lambda = operator_norm(a, tol)?.powi(2);
    let weight_sum_error = (d.weights.iter().sum::<f64>() - 1.0).abs();
    let min_weight = d.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let orth = orthonormality_error(&d.vectors);
    let residual = eigen_residual(a, &d.vectors, lambda);
    let rebuild = (&d.to_density() - t).frobenius_norm();
    Ok(Verification {
        accepted: weight_sum_error <= DENSITY_TOL
            && min_weight > 0.0
            && orth <= ORTHONORMAL_TOL
            && residual <= MAXIMIZER_REL_TOL
            && rebuild <= tol.feas_eps,
        details: json!({
            "weight_sum_error": num(weight_sum_error),
            "min_weight": num(min_weight),
            "orthonormality_error": num(orth),
            "eigen_residual": num(residual),
            "rebuild_error": num(rebuild),
        }),
    })
}

fn measure_cert(p: &ProblemFile, kind: &str, cert: &Value, tol: &ToleranceConfig) -> Result<Verification, CliError> {
    if kind != "measure" {
        return Err(unsupported(kind));
    }
    let f = p.function_f()?;
    let hs = p.function_generators(&f)?;
    let support = as_array(field(cert, "support")?, "support")?
        .iter()
        .enumerate()
        .map(|(i, x)| as_usize(x, &format!("support[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let weights = f64_list(field(cert, "weights")?, "weights")?;
    let r = verify_measure(&f, &hs, &ProbabilityMeasure { support, weights }, tol)?;
    Ok(Verification {
        accepted: r.accepted,
        details: json!({
            "weight_sum_error": num(r.weight_sum_error),
            "min_weight": num(r.min_weight),
            "support_modulus": num(r.support_modulus),
            "integral_residual": num(r.integral_residual),
        }),
    })
}

/// Checks a certificate document against the problem.
///
/// `document` is either a full output document (its `command` and
/// `inputs_digest` must match) or a bare certificate object.
pub fn verify(
    command: Command,
    command_name: &str,
    problem: &ProblemFile,
    digest: &str,
    document: &Value,
    tol: &ToleranceConfig,
) -> Result<Verification, CliError> {
    let cert = if let Some(cmd) = document.get("command") {
        if cmd.as_str() != Some(command_name) {
            return Ok(rejected("certificate was issued for a different command"));
        }
        if document.get("inputs_digest").and_then(Value::as_str) != Some(digest) {
            return Ok(rejected("inputs_digest does not match the problem file"));
        }
        match document.get("certificate") {
            Some(c) if !c.is_null() => c,
            _ => return Err(CliError::Input("certificate file carries no certificate".into())),
        }
    } else {
        document
    };
    let kind = field(cert, "kind")?
        .as_str()
        .ok_or_else(|| CliError::Input("certificate: `kind` is not a string".into()))?;

    let mut outcome = match command {
        Command::Bj => {
            let a = problem.matrix_a()?;
            let b = problem.matrix_b(&a)?;
            orthogonality_cert(&a, std::slice::from_ref(&b), kind, cert, tol, false)
        }
        Command::BjSubspace => {
            let a = problem.matrix_a()?;
            let gens = problem.generators(&a)?;
            orthogonality_cert(&a, &gens, kind, cert, tol, true)
        }
        Command::Smooth => smooth_cert(&problem.matrix_a()?, kind, cert, tol),
        Command::Subdiff => {
            let a = problem.matrix_a()?;
            let g = problem.matrix_g(&a)?;
            subdiff_cert(&a, &g, kind, cert, tol)
        }
        Command::Decompose => {
            let a = problem.matrix_a()?;
            let t = problem.state(&a)?;
            decomposition_cert(&a, &t, kind, cert, tol)
        }
        Command::FnBj => measure_cert(problem, kind, cert, tol),
        _ => Err(CliError::Input(format!(
            "`{command_name}` emits no certificate that can be verified offline"
        ))),
    }?;

    let mut details = Map::new();
    details.insert("kind".into(), json!(kind));
    if let Value::Object(m) = &mut outcome.details {
        details.append(m);
    }
    outcome.details = Value::Object(details);
    Ok(outcome)
}
