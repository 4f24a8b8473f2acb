//! One function per subcommand: computes the result, its certificate and,
//! on request, a brute-force oracle built only on norm evaluations.

use gateaux_core::derivative::{
    gateaux_one_sided, gateaux_plus, is_smooth, min_phi_derivative, phi_gateaux,
    spectral_cutoff_derivative,
};
use gateaux_core::function_space::{
    fn_bj_orthogonal_subspace, fn_delta_derivative, fn_gateaux_plus, max_modulus_set, sup_norm,
};
use gateaux_core::linalg::{max_eigenspace, operator_norm, vec_norm};
use gateaux_core::oracle::{
    bj_grid_check, fd_derivative, fn_bj_grid_check, fn_fd_derivative, OracleReport,
};
use gateaux_core::orthogonality::{
    bj_orthogonal_subspace, bj_orthogonal_vector, decompose_maximizer, separation_min_eigenvalue,
    subdiff_membership, MaximizerDecomposition, OrthogonalityVerdict,
};
use gateaux_core::{Complex64, ComplexMatrix, ToleranceConfig};
use serde_json::{json, Value};

use crate::encode::{matrix, num, nums, vector};
use crate::error::CliError;
use crate::problem::ProblemFile;
use crate::Command;

/// Largest accepted gap between an analytic value and its oracle estimate.
pub const ORACLE_AGREEMENT: f64 = 1e-6;
/// Smallest accepted slack in the subgradient inequality.
pub const SUBGRADIENT_SLACK: f64 = -1e-8;

pub struct Report {
    pub result: Value,
    pub certificate: Option<Value>,
    pub oracle: Option<Value>,
    /// A predicate command answered "no".
    pub negative: bool,
}

impl Report {
    fn value(result: Value) -> Self {
        Self {
            result,
            certificate: None,
            oracle: None,
            negative: false,
        }
    }

    fn with_certificate(mut self, certificate: Value) -> Self {
        self.certificate = Some(certificate);
        self
    }
}

pub fn execute(
    command: Command,
    problem: &ProblemFile,
    tol: &ToleranceConfig,
    check: bool,
) -> Result<Report, CliError> {
    let mut report = match command {
        Command::Norm => norm(problem, tol, check),
        Command::Dplus => dplus(problem, tol, check),
        Command::Dphi => dphi(problem, tol, check),
        Command::Dmin => dmin(problem, tol, check),
        Command::Dtwo => dtwo(problem, tol, check),
        Command::Smooth => smooth(problem, tol, check),
        Command::Dcutoff => dcutoff(problem, tol, check),
        Command::Bj => bj(problem, tol, check),
        Command::BjSubspace => bj_subspace(problem, tol, check),
        Command::Subdiff => subdiff(problem, tol, check),
        Command::Decompose => decompose(problem, tol, check),
        Command::FnNorm => fn_norm(problem, tol),
        Command::FnDplus => fn_dplus(problem, tol, check),
        Command::FnDdelta => fn_ddelta(problem, tol, check),
        Command::FnBj => fn_bj(problem, tol, check),
    }?;
    if !check {
        report.oracle = None;
    }
    Ok(report)
}

fn fd_oracle(report: &OracleReport, analytic: f64) -> Value {
    let deviation = (report.estimate - analytic).abs();
    json!({
        "method": "finite_difference",
        "estimate": num(report.estimate),
        "converged": report.converged,
        "steps": nums(&report.samples.iter().map(|s| s.0).collect::<Vec<_>>()),
        "quotients": nums(&report.samples.iter().map(|s| s.1).collect::<Vec<_>>()),
        "deviation": num(deviation),
        "agrees": report.converged && deviation <= ORACLE_AGREEMENT,
    })
}

/// Real and imaginary matrix units `E_ij`, `i E_ij`.
fn unit_directions(rows: usize, cols: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            for z in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                out.push(ComplexMatrix::from_fn(rows, cols, |r, c| {
                    if (r, c) == (i, j) {
                        z
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }));
            }
        }
    }
    out
}

fn norm(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let value = operator_norm(&a, tol)?;
    let mut report = Report::value(num(value));
    if !a.is_zero() {
        let e = max_eigenspace(&a, tol)?;
        report = report.with_certificate(json!({
            "kind": "top_eigenspace",
            "dim_k": e.dim_k,
            "vector": vector(&e.vector(0)),
        }));
    }
    if check {
        // |A e_j| <= |A| <= |A|_F
        let lower = (0..a.cols())
            .map(|j| vec_norm(&a.column(j)))
            .fold(0.0, f64::max);
        let upper = a.frobenius_norm();
        let slack = ORACLE_AGREEMENT * (1.0 + value);
        report.oracle = Some(json!({
            "method": "column_and_frobenius_bounds",
            "lower": num(lower),
            "upper": num(upper),
            "agrees": lower <= value + slack && value <= upper + slack,
        }));
    }
    Ok(report)
}

fn dplus(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let b = p.matrix_b(&a)?;
    let d = gateaux_plus(&a, &b, tol)?;
    let mut report = Report::value(num(d.value)).with_certificate(json!({
        "kind": "maximizing_vector",
        "eigenspace_dim": d.eigenspace_dim,
        "vector": vector(&d.maximizing_vector),
    }));
    if check {
        report.oracle = Some(fd_oracle(&fd_derivative(&a, &b, tol)?, d.value));
    }
    Ok(report)
}

fn dphi(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let b = p.matrix_b(&a)?;
    let phi = p.scalar(p.phi, "phi")?;
    let d = phi_gateaux(&a, &b, phi, tol)?;
    let mut report = Report::value(num(d.value)).with_certificate(json!({
        "kind": "maximizing_vector",
        "eigenspace_dim": d.eigenspace_dim,
        "vector": vector(&d.maximizing_vector),
    }));
    if check {
        let rotated = b.scale(Complex64::from_polar(1.0, phi));
        report.oracle = Some(fd_oracle(&fd_derivative(&a, &rotated, tol)?, d.value));
    }
    Ok(report)
}

fn dmin(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let b = p.matrix_b(&a)?;
    let m = min_phi_derivative(&a, &b, tol)?;
    let mut report = Report::value(num(m.value)).with_certificate(json!({
        "kind": "angle",
        "phi_star": num(m.phi_star),
    }));
    if check {
        let rotated = b.scale(Complex64::from_polar(1.0, m.phi_star));
        report.oracle = Some(fd_oracle(&fd_derivative(&a, &rotated, tol)?, m.value));
    }
    Ok(report)
}

fn dtwo(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let b = p.matrix_b(&a)?;
    let pair = gateaux_one_sided(&a, &b, tol)?;
    let b_norm = operator_norm(&b, tol)?;
    let value = pair.two_sided(b_norm);
    let mut report = Report::value(value.map_or(Value::Null, num)).with_certificate(json!({
        "kind": "one_sided",
        "left": num(pair.left),
        "right": num(pair.right),
    }));
    if check {
        let right = fd_derivative(&a, &b, tol)?;
        let left = fd_derivative(&a, &b.scale_real(-1.0), tol)?;
        let dev = (right.estimate - pair.right)
            .abs()
            .max((-left.estimate - pair.left).abs());
        report.oracle = Some(json!({
            "method": "finite_difference",
            "right_estimate": num(right.estimate),
            "left_estimate": num(-left.estimate),
            "converged": right.converged && left.converged,
            "deviation": num(dev),
            "agrees": right.converged && left.converged && dev <= ORACLE_AGREEMENT,
        }));
    }
    Ok(report)
}

fn smooth(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let s = is_smooth(&a, tol)?;
    let certificate = match &s.witness {
        Some(h) => json!({"kind": "smooth_witness", "vector": vector(h)}),
        None => {
            let e = max_eigenspace(&a, tol)?;
            json!({
                "kind": "multiplicity",
                "dim_k": e.dim_k,
                "vectors": [vector(&e.vector(0)), vector(&e.vector(1))],
            })
        }
    };
    let mut report = Report {
        result: Value::Bool(s.smooth),
        certificate: Some(certificate),
        oracle: None,
        negative: !s.smooth,
    };
    if check {
        // the two one-sided difference quotients along every matrix unit
        let mut max_jump: f64 = 0.0;
        let mut converged = true;
        for dir in unit_directions(a.rows(), a.cols()) {
            let right = fd_derivative(&a, &dir, tol)?;
            let left = fd_derivative(&a, &dir.scale_real(-1.0), tol)?;
            converged &= right.converged && left.converged;
            max_jump = max_jump.max(right.estimate + left.estimate);
        }
        let oracle_smooth = max_jump <= 10.0 * ORACLE_AGREEMENT;
        report.oracle = Some(json!({
            "method": "one_sided_finite_differences",
            "directions": 2 * a.rows() * a.cols(),
            "max_jump": num(max_jump),
            "converged": converged,
            "agrees": oracle_smooth == s.smooth,
        }));
    }
    Ok(report)
}

fn dcutoff(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let b = p.matrix_b(&a)?;
    let eps = p.scalar(p.eps, "eps")?;
    let value = spectral_cutoff_derivative(&a, &b, eps, tol)?;
    let mut report = Report::value(num(value));
    if check {
        // a wider window can only raise the value above the derivative
        let fd = fd_derivative(&a, &b, tol)?;
        report.oracle = Some(json!({
            "method": "finite_difference_lower_bound",
            "estimate": num(fd.estimate),
            "converged": fd.converged,
            "agrees": fd.converged && value >= fd.estimate - ORACLE_AGREEMENT,
        }));
    }
    Ok(report)
}

pub fn witness_json(w: &MaximizerDecomposition) -> Value {
    json!({
        "kind": "witness",
        "weights": nums(&w.weights),
        "vectors": Value::Array(w.vectors.iter().map(|u| vector(u)).collect()),
    })
}

fn verdict_certificate(
    v: &OrthogonalityVerdict,
    a: &ComplexMatrix,
    gens: &[ComplexMatrix],
    tol: &ToleranceConfig,
) -> Result<Value, CliError> {
    if let Some(w) = &v.witness {
        return Ok(witness_json(w));
    }
    if let Some(c) = &v.separation {
        let lambda = separation_min_eigenvalue(a, gens, c, tol)?;
        return Ok(json!({
            "kind": "separation",
            "coefficients": nums(c),
            "min_eigenvalue": num(lambda),
        }));
    }
    let viol = v.violation.expect("a verdict carries exactly one certificate");
    Ok(json!({
        "kind": "violation",
        "phi": num(viol.phi),
        "direction_index": viol.direction_index,
        "derivative": num(viol.derivative),
    }))
}

fn grid_json(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<(bool, Value), CliError> {
    let g = bj_grid_check(a, b, tol)?;
    Ok((
        g.orthogonal,
        json!({
            "orthogonal": g.orthogonal,
            "min_gain": num(g.report.estimate),
            "argmin_t": num(g.argmin_t),
            "argmin_phi": num(g.argmin_phi),
        }),
    ))
}

fn bj(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let b = p.matrix_b(&a)?;
    let v = bj_orthogonal_vector(&a, &b, tol)?;
    let mut report = Report {
        result: Value::Bool(v.orthogonal),
        certificate: Some(verdict_certificate(&v, &a, std::slice::from_ref(&b), tol)?),
        oracle: None,
        negative: !v.orthogonal,
    };
    if check {
        let (orthogonal, mut grid) = grid_json(&a, &b, tol)?;
        let obj = grid.as_object_mut().expect("object");
        let mut oracle = serde_json::Map::new();
        oracle.insert("method".into(), json!("norm_grid"));
        oracle.append(obj);
        oracle.insert("agrees".into(), json!(orthogonal == v.orthogonal));
        report.oracle = Some(Value::Object(oracle));
    }
    Ok(report)
}

fn bj_subspace(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let gens = p.generators(&a)?;
    let v = bj_orthogonal_subspace(&a, &gens, tol)?;
    let mut report = Report {
        result: Value::Bool(v.orthogonal),
        certificate: Some(verdict_certificate(&v, &a, &gens, tol)?),
        oracle: None,
        negative: !v.orthogonal,
    };
    if check {
        // orthogonality to the span forces orthogonality to each generator
        let mut per = Vec::with_capacity(gens.len());
        let mut all = true;
        for b in &gens {
            let (o, g) = grid_json(&a, b, tol)?;
            all &= o;
            per.push(g);
        }
        report.oracle = Some(json!({
            "method": "norm_grid_per_generator",
            "generators": per,
            "agrees": !v.orthogonal || all,
        }));
    }
    Ok(report)
}

fn subgradient_oracle(a: &ComplexMatrix, g: &ComplexMatrix, tol: &ToleranceConfig) -> Result<(f64, usize), CliError> {
    let base = operator_norm(a, tol)?;
    let mut min_slack = f64::INFINITY;
    let mut count = 0;
    for dir in unit_directions(a.rows(), a.cols()) {
        for scale in [1.0, 1e-3, -1.0, -1e-3] {
            let x = dir.scale_real(scale);
            let slack = operator_norm(&(a + &x), tol)? - base - g.re_inner(&x);
            min_slack = min_slack.min(slack);
            count += 1;
        }
    }
    Ok((min_slack, count))
}

fn subdiff(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let g = p.matrix_g(&a)?;
    let m = subdiff_membership(&a, &g, tol)?;
    let certificate = match &m.state {
        Some(state) => json!({
            "kind": "state",
            "state": matrix(state.ambient.as_ref().unwrap_or(&state.mat)),
            "support_residual": num(m.support_residual),
            "reconstruction_residual": num(m.reconstruction_residual),
        }),
        None => json!({
            "kind": "residuals",
            "density_error": m.density_error.as_deref().map_or(Value::Null, |s| json!(s)),
            "support_residual": num(m.support_residual),
            "reconstruction_residual": num(m.reconstruction_residual),
        }),
    };
    let mut report = Report {
        result: Value::Bool(m.member),
        certificate: Some(certificate),
        oracle: None,
        negative: !m.member,
    };
    if check {
        let (min_slack, count) = subgradient_oracle(&a, &g, tol)?;
        report.oracle = Some(json!({
            "method": "subgradient_inequality",
            "directions": count,
            "min_slack": num(min_slack),
            // the unit directions can miss a violation, so only members are checked
            "agrees": !m.member || min_slack >= SUBGRADIENT_SLACK,
        }));
    }
    Ok(report)
}

fn decompose(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let a = p.matrix_a()?;
    let t = p.state(&a)?;
    let d = decompose_maximizer(&a, &t, tol)?;
    let mut cert = witness_json(&d);
    cert["kind"] = json!("decomposition");
    let mut report = Report::value(json!(d.weights.len())).with_certificate(cert);
    if check {
        let err = (&d.to_density() - &t).frobenius_norm();
        let lambda = operator_norm(&a, tol)?.powi(2);
        // each u_j attains the norm: |A u_j| = |A| |u_j|
        let attain = d
            .vectors
            .iter()
            .map(|u| (vec_norm(&a.mul_vec(u)).powi(2) - lambda).abs() / lambda)
            .fold(0.0, f64::max);
        report.oracle = Some(json!({
            "method": "rebuild",
            "rebuild_error": num(err),
            "attainment_error": num(attain),
            "agrees": err <= ORACLE_AGREEMENT && attain <= ORACLE_AGREEMENT,
        }));
    }
    Ok(report)
}

fn fn_norm(p: &ProblemFile, tol: &ToleranceConfig) -> Result<Report, CliError> {
    let f = p.function_f()?;
    let value = sup_norm(&f);
    let mut report = Report::value(num(value));
    if value > 0.0 {
        let set = max_modulus_set(&f, tol)?;
        report = report.with_certificate(json!({
            "kind": "max_modulus_set",
            "indices": set.indices,
        }));
    }
    Ok(report)
}

fn fn_dplus(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let f = p.function_f()?;
    let g = p.function_g(&f)?;
    let value = fn_gateaux_plus(&f, &g, tol)?;
    let mut report = Report::value(num(value));
    if check {
        report.oracle = Some(fd_oracle(&fn_fd_derivative(&f, &g, tol)?, value));
    }
    Ok(report)
}

fn fn_ddelta(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let f = p.function_f()?;
    let g = p.function_g(&f)?;
    let delta = p.scalar(p.delta, "delta")?;
    let value = fn_delta_derivative(&f, &g, delta, tol)?;
    let mut report = Report::value(num(value));
    if check {
        let fd = fn_fd_derivative(&f, &g, tol)?;
        report.oracle = Some(json!({
            "method": "finite_difference_lower_bound",
            "estimate": num(fd.estimate),
            "converged": fd.converged,
            "agrees": fd.converged && value >= fd.estimate - ORACLE_AGREEMENT,
        }));
    }
    Ok(report)
}

fn fn_bj(p: &ProblemFile, tol: &ToleranceConfig, check: bool) -> Result<Report, CliError> {
    let f = p.function_f()?;
    let hs = p.function_generators(&f)?;
    let v = fn_bj_orthogonal_subspace(&f, &hs, tol)?;
    let certificate = v.measure.as_ref().map(|mu| {
        json!({
            "kind": "measure",
            "support": mu.support,
            "weights": nums(&mu.weights),
        })
    });
    let mut report = Report {
        result: Value::Bool(v.orthogonal),
        certificate,
        oracle: None,
        negative: !v.orthogonal,
    };
    if check {
        let mut per = Vec::with_capacity(hs.len());
        let mut all = true;
        for h in &hs {
            let g = fn_bj_grid_check(&f, h, tol)?;
            all &= g.orthogonal;
            per.push(json!({
                "orthogonal": g.orthogonal,
                "min_gain": num(g.report.estimate),
                "argmin_t": num(g.argmin_t),
                "argmin_phi": num(g.argmin_phi),
            }));
        }
        // with one generator the grid decides the same question
        let agrees = if hs.len() == 1 { all == v.orthogonal } else { !v.orthogonal || all };
        report.oracle = Some(json!({
            "method": "norm_grid_per_generator",
            "generators": per,
            "agrees": agrees,
        }));
    }
    Ok(report)
}
