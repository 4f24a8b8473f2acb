mod common;

use common::*;
use gateaux_core::derivative::{gateaux_plus, min_phi_derivative};
use gateaux_core::feasibility::{spectrahedron_feasibility, SpectrahedronOutcome};
use gateaux_core::linalg::operator_norm;
use gateaux_core::oracle::bj_grid_check;
use gateaux_core::orthogonality::{
    bj_orthogonal_subspace, bj_orthogonal_vector, decompose_maximizer, separation_min_eigenvalue,
    subdiff_membership, subspace_constraints, verify_witness, violation_derivative,
};
use gateaux_core::{ComplexMatrix, GateauxError, ToleranceConfig};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn constructed_feasible_instances_yield_valid_witnesses() {
    let t = tol();
    let mut r = rng(21);
    for trial in 0..30 {
        let k = 1 + trial % 3;
        let m = 1 + trial % 2;
        let mut s = vec![2.0; k];
        s.extend([1.2, 0.4]);
        let (a, gens, _) = feasible_instance(&mut r, &s, k, m);
        let v = bj_orthogonal_subspace(&a, &gens, &t).unwrap();
        assert!(v.orthogonal, "trial {trial}");
        assert!(v.is_well_formed());
        let report = verify_witness(&a, &gens, v.witness.as_ref().unwrap(), &t).unwrap();
        assert!(report.accepted, "trial {trial}: {report:?}");
        assert!(report.weight_sum_error <= 1e-10);
        assert!(report.constraint_residual <= 2e-6);
    }
}

#[test]
fn random_subspaces_give_well_formed_certificates() {
    let t = tol();
    let mut r = rng(22);
    let (mut feasible, mut infeasible) = (0, 0);
    for trial in 0..40 {
        let k = 2 + trial % 2;
        let mut s = vec![1.5; k];
        s.extend([1.0, 0.3]);
        let (a, _, _) = with_singular_values(&mut r, &s);
        let n = s.len();
        let m = 1 + trial % 3;
        let gens: Vec<_> = (0..m).map(|_| random_complex(&mut r, n, n)).collect();
        let v = match bj_orthogonal_subspace(&a, &gens, &t) {
            Ok(v) => v,
            Err(GateauxError::Indeterminate { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(v.is_well_formed());
        if v.orthogonal {
            feasible += 1;
            assert!(verify_witness(&a, &gens, v.witness.as_ref().unwrap(), &t).unwrap().accepted);
        } else if let Some(c) = &v.separation {
            infeasible += 1;
            assert!(separation_min_eigenvalue(&a, &gens, c, &t).unwrap() > 0.0);
        } else {
            let viol = v.violation.as_ref().unwrap();
            assert!(violation_derivative(&a, &gens, viol, &t).unwrap() < -t.feas_eps);
        }
    }
    assert!(feasible > 0 && infeasible > 0, "{feasible} / {infeasible}");
}

#[test]
fn separation_implies_a_descent_direction_in_the_span() {
    // a positive definite sum c_i H_i means some real combination of the
    // generators has a strictly negative rotated derivative
    let t = tol();
    let mut r = rng(23);
    for _ in 0..20 {
        let (a, _, _) = with_singular_values(&mut r, &[1.0, 0.5, 0.2]);
        let gens: Vec<_> = (0..2).map(|_| random_complex(&mut r, 3, 3)).collect();
        let v = bj_orthogonal_subspace(&a, &gens, &t).unwrap();
        let Some(c) = v.separation else { continue };
        // tr(C_j T) = r0 - i r1, so c pairs generator j as (c0 + i c1) B_j
        let mut b = ComplexMatrix::zeros(3, 3);
        for (j, g) in gens.iter().enumerate() {
            let w = gateaux_core::Complex64::new(c[2 * j], c[2 * j + 1]);
            b = &b + &g.scale(w);
        }
        let d = gateaux_plus(&a, &b.scale_real(-1.0), &t).unwrap().value;
        assert!(d < 0.0, "{d}");
    }
}

#[test]
fn vector_verdict_agrees_with_norm_grid() {
    let t = tol();
    let mut r = rng(24);
    for trial in 0..30 {
        let n = 2 + trial % 3;
        let a = random_complex(&mut r, n, n);
        let b = random_complex(&mut r, n, n);
        let grid = bj_grid_check(&a, &b, &t).unwrap();
        let min = min_phi_derivative(&a, &b, &t).unwrap();
        if min.value.abs() < 1e-3 {
            continue;
        }
        let v = bj_orthogonal_vector(&a, &b, &t).unwrap();
        assert_eq!(v.orthogonal, grid.orthogonal);
    }
}

#[test]
fn gram_reduction_preserves_orthogonality() {
    let t = tol();
    let mut r = rng(25);
    for trial in 0..40 {
        let n = 2 + trial % 4;
        let (a, b) = if trial % 2 == 0 {
            let mut s = vec![1.0; 1 + trial % 3];
            s.extend((0..n).map(|i| 0.5 - 0.1 * i as f64));
            let (a, gens, _) = feasible_instance(&mut r, &s, 1 + trial % 3, 1);
            (a, gens[0].clone())
        } else {
            (random_complex(&mut r, n, n), random_complex(&mut r, n, n))
        };
        let lhs = bj_orthogonal_vector(&a, &b, &t).unwrap();
        let rhs = bj_orthogonal_vector(&a.adjoint_mul(&a), &a.adjoint_mul(&b), &t).unwrap();
        assert_eq!(lhs.orthogonal, rhs.orthogonal, "trial {trial}");
    }
}

#[test]
fn members_satisfy_the_subgradient_inequality() {
    let t = tol();
    let mut r = rng(26);
    for trial in 0..20 {
        let k = 1 + trial % 3;
        let mut s = vec![2.0; k];
        s.extend([1.0, 0.5]);
        let n = s.len();
        let (a, _, tt) = feasible_instance(&mut r, &s, k, 1);
        let g = (&a * &tt).scale_real(1.0 / 2.0);
        let m = subdiff_membership(&a, &g, &t).unwrap();
        assert!(m.member, "trial {trial}: {m:?}");
        for _ in 0..50 {
            let x = random_complex(&mut r, n, n).scale_real(0.5 * gaussian(&mut r).abs());
            let lhs = operator_norm(&(&a + &x), &t).unwrap();
            let slack = lhs - 2.0 - g.re_inner(&x);
            assert!(slack >= -1e-8, "{slack}");
        }
        // pairing with any member never exceeds the right derivative
        let b = random_complex(&mut r, n, n);
        assert!(g.re_inner(&b) <= gateaux_plus(&a, &b, &t).unwrap().value + 1e-9);
    }
}

#[test]
fn random_functionals_are_rejected() {
    let t = tol();
    let mut r = rng(27);
    for _ in 0..20 {
        let a = random_complex(&mut r, 3, 3);
        let g = random_complex(&mut r, 3, 3).scale_real(0.3);
        assert!(!subdiff_membership(&a, &g, &t).unwrap().member);
    }
}

#[test]
fn maximizer_decomposition_rebuilds_the_state() {
    let t = tol();
    let mut r = rng(28);
    for k in 1..=3 {
        let mut s = vec![3.0; k];
        s.extend([1.0, 1.0]);
        let (a, gens, tt) = feasible_instance(&mut r, &s, k, 1);
        let d = decompose_maximizer(&a, &tt, &t).unwrap();
        assert!((&d.to_density() - &tt).frobenius_norm() <= 1e-10);
        assert!(verify_witness(&a, &gens, &d, &t).unwrap().accepted);
    }
    let a = ComplexMatrix::from_real_diag(&[2.0, 1.0]);
    let wrong = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
    assert!(matches!(
        decompose_maximizer(&a, &wrong, &t),
        Err(GateauxError::NotAMaximizer { .. })
    ));
}

#[test]
fn frank_wolfe_objective_is_monotone() {
    let t = tol();
    let mut r = rng(29);
    for trial in 0..15 {
        let k = 2 + trial % 3;
        let mut s = vec![1.0; k];
        s.push(0.2);
        let (a, gens, _) = if trial % 2 == 0 {
            feasible_instance(&mut r, &s, k, 2)
        } else {
            let (a, _, _) = with_singular_values(&mut r, &s);
            let gens = (0..2).map(|_| random_complex(&mut r, s.len(), s.len())).collect();
            (a, gens, ComplexMatrix::zeros(1, 1))
        };
        let constraints = subspace_constraints(&a, &gens, &t).unwrap();
        let Ok(run) = spectrahedron_feasibility(&constraints, &t) else { continue };
        assert!(run
            .objective_history
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300));
        if trial % 2 == 0 {
            assert!(matches!(run.outcome, SpectrahedronOutcome::Feasible { .. }));
        }
    }
}
